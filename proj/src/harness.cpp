#include "kpzlab/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "kpzlab/coupling.hpp"
#include "kpzlab/experiments.hpp"

namespace kpzlab {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version_string() { return std::string("kpzlab ") + KPZLAB_VERSION; }

void RunConfig::validate() const {
  if (experiment.empty()) throw std::invalid_argument("config: experiment name missing");
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), experiment) == names.end())
    throw std::invalid_argument("config: unknown experiment '" + experiment + "'");
  if (replicas < 1) throw std::invalid_argument("config: replicas must be >= 1");
  if (!seed) throw std::invalid_argument("config: --seed is required");
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  if (!params.is_object()) throw std::invalid_argument("config: params must be a JSON object");
}

std::uint64_t RunConfig::master_seed() const {
  if (!seed) throw std::invalid_argument("config: --seed is required");
  return *seed;
}

json RunConfig::to_json() const {
  json j{{"experiment", experiment}, {"params", params}, {"N_list", N_list},
         {"replicas", replicas}, {"workers", workers}, {"out_dir", out_dir.string()}};
  if (seed) j["seed"] = *seed;
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  c.experiment = j.value("experiment", std::string());
  c.params = j.value("params", json::object());
  c.N_list = j.value("N_list", std::vector<long>{});
  c.replicas = j.value("replicas", 1L);
  c.workers = j.value("workers", 1);
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  return c;
}

fs::path resolve_output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("KPZLAB_OUT"); env && *env) return env;
  return "out";
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {
std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}
std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}
double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}
}  // namespace

std::uint64_t fnv1a64_file(const fs::path& p) { return fnv1a64(read_file(p)); }

void write_file_atomic(const fs::path& p, const std::string& content) {
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, p);
}

RunManifest::RunManifest(const RunConfig& cfg) : cfg_(cfg), dir_(cfg.out_dir / cfg.experiment) {}

json RunManifest::json() const {
  nlohmann::json seeds = nlohmann::json::array();
  for (auto s : seeds_) seeds.push_back(s);
  nlohmann::json j{{"status", status_}, {"version", version_string()}, {"config", cfg_.to_json()},
                   {"replica_seeds", seeds}, {"wall_seconds", wall_}, {"files", files_}};
  for (auto it = extra_.begin(); it != extra_.end(); ++it) j[it.key()] = it.value();
  return j;
}

void RunManifest::write() const { write_file_atomic(dir_ / "manifest.json", json().dump(2) + "\n"); }

void RunManifest::begin() {
  fs::create_directories(dir_);
  fs::remove(dir_ / "FAILED");
  started_ = now_seconds();
  status_ = "running";
  write();
}

void RunManifest::record_seeds(long replicas) {
  seeds_.clear();
  for (long i = 0; i < replicas; ++i) seeds_.push_back(derive_replica_seed(cfg_.master_seed(), static_cast<std::uint64_t>(i)));
}

void RunManifest::add_file(const std::string& name, const std::string& content) {
  write_file_atomic(dir_ / name, content);
  files_.push_back({{"name", name}, {"bytes", content.size()}, {"fnv1a64", hex64(fnv1a64(content))}});
}

void RunManifest::finalize() {
  wall_ = now_seconds() - started_;
  status_ = "complete";
  write();
}

void RunManifest::fail(const std::string& message) {
  wall_ = now_seconds() - started_;
  status_ = "failed";
  extra_["error"] = message;
  try {
    fs::create_directories(dir_);
    write();
    write_file_atomic(dir_ / "FAILED", message + "\n");
  } catch (...) {
  }
}

bool verify_manifest(const fs::path& dir, std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (fs::exists(dir / "FAILED")) return fail("FAILED marker present");
  if (!fs::exists(dir / "manifest.json")) return fail("manifest missing");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(dir / "manifest.json"));
  } catch (const std::exception& e) {
    return fail(std::string("manifest unreadable: ") + e.what());
  }
  if (j.value("status", "") != "complete") return fail("run not complete");
  for (const auto& f : j.at("files")) {
    fs::path p = dir / f.at("name").get<std::string>();
    if (!fs::exists(p)) return fail("missing " + p.string());
    std::string content = read_file(p);
    if (content.size() != f.at("bytes").get<std::size_t>()) return fail("size mismatch for " + p.string());
    if (hex64(fnv1a64(content)) != f.at("fnv1a64").get<std::string>()) return fail("hash mismatch for " + p.string());
  }
  return true;
}

// ---- experiments ----

namespace {

using Handler = std::function<void(const RunConfig&, RunManifest&)>;

template <class T>
T param(const RunConfig& c, const std::string& key, T def) {
  return c.params.contains(key) ? c.params.at(key).get<T>() : def;
}

std::vector<long> n_list_or(const RunConfig& c, std::vector<long> def) { return c.N_list.empty() ? def : c.N_list; }

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

ScalingSpec spec_from(const RunConfig& c) {
  std::string model = param<std::string>(c, "model", "SV");
  if (model == "SV") return ScalingSpec::sv(param(c, "mu", 1.0), param(c, "zeta", 0.5), param(c, "q", 0.5));
  if (model == "ASEP") return ScalingSpec::asep(param(c, "alpha", 0.5), param(c, "L", 0.4));
  throw std::invalid_argument("config: model must be SV or ASEP");
}

TWReference tw_from(const RunConfig& c) {
  std::string path = param<std::string>(c, "tw_reference", "");
  if (!path.empty()) return TWReference::from_json(json::parse(read_file(path)));
  TwOracleParams p;
  p.replicas = param(c, "tw_replicas", 100000L);
  p.n = param(c, "tw_n", 1000);
  p.seed = derive_replica_seed(c.master_seed(), 0xFFFFFFFFULL);
  p.workers = c.workers;
  return tw_reference_build(p);
}

void exp_sample_asep(const RunConfig& c, RunManifest& m) {
  double t = param(c, "t", 0.4);
  double T = c.params.contains("T") ? param(c, "T", 0.0) : param(c, "N", 64L) / (1 - t);
  auto policy = TruncationPolicy::for_time(T);
  m.set("truncation", policy.log);
  long xl = static_cast<long>(std::ceil(-T / 2)), xh = static_cast<long>(std::ceil(T)) + 1;
  auto csv = run_replicas<std::string>(c.replicas, c.workers, c.master_seed(), [&](Rng& rng, long) {
    auto s = simulate_asep(rng, t, T, policy);
    if (!s.truncation_ok()) throw std::runtime_error("truncation assertion failed; " + policy.log);
    return height_to_csv(s, xl, xh);
  });
  for (long i = 0; i < c.replicas; ++i) m.add_file("heights_" + std::to_string(i) + ".csv", csv[i]);
}

S6VParams s6v_from(const RunConfig& c) {
  double q = param(c, "q", 0.5);
  if (c.params.contains("xi")) return S6VParams::homogeneous(q, param(c, "xi", 1.0), param(c, "u", 1.0));
  return sv_params(param(c, "zeta", 0.5), q);
}

void exp_sample_s6v(const RunConfig& c, RunManifest& m) {
  auto params = s6v_from(c);
  int X = param(c, "X", 64), Y = param(c, "Y", 64);
  bool bits = param(c, "bitplanes", false);
  auto b = vertex_probs(params, 1, 1);
  m.set("b1", b.b1);
  m.set("b2", b.b2);
  auto out = run_replicas<std::pair<std::string, std::string>>(c.replicas, c.workers, c.master_seed(), [&](Rng& rng, long) {
    auto f = sample_s6v(rng, params, X, Y);
    std::string planes;
    if (bits) {
      auto v = f.to_bitplanes();
      planes.assign(v.begin(), v.end());
    }
    return std::make_pair(f.row_to_csv(Y), planes);
  });
  for (long i = 0; i < c.replicas; ++i) {
    m.add_file("heights_" + std::to_string(i) + ".csv", out[i].first);
    if (bits) m.add_file("field_" + std::to_string(i) + ".s6v", out[i].second);
  }
}

void exp_sample_hahp(const RunConfig& c, RunManifest& m) {
  HahpParams hp{param(c, "M", 6), param(c, "N", 4), param(c, "t", 0.5), param(c, "zeta", 0.5)};
  hp.validate();
  int K = param(c, "K", -1);
  if (K < 0) {
    K = 1;
    while (hp.normalization() * hahp_size_tail_bound(hp, K) > 1e-9) ++K;
  }
  HahpSampler sampler(hp, K);
  Rng rng(derive_replica_seed(c.master_seed(), 0));
  std::ostringstream os;
  os << "replica,i,partition\n";
  for (long r = 0; r < c.replicas; ++r) {
    auto seq = sampler.sample(rng);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      os << r << ',' << i + 1 << ',';
      for (std::size_t k = 0; k < seq[i].size(); ++k) os << (k ? " " : "") << seq[i][k];
      os << '\n';
    }
  }
  m.set("size_cap", K);
  m.set("tail_bound", sampler.tail_bound());
  m.set("restarts", sampler.restarts());
  m.add_file("samples.csv", os.str());
}

void exp_mcmc_hahp(const RunConfig& c, RunManifest& m) {
  int M = param(c, "M", 2), N = param(c, "N", 2), H = param(c, "H", 2);
  double t = param(c, "t", 0.5), zeta = param(c, "zeta", 0.5);
  long thin = param(c, "thin", 10L), burn = param(c, "burn_in", 100L);
  PlanePartitionChain chain(M, N, H, t, zeta);
  Rng rng(derive_replica_seed(c.master_seed(), 0));
  const long sweep = static_cast<long>(M) * N;
  for (long k = 0; k < burn * sweep; ++k) chain.step(rng);
  std::ostringstream os;
  os << "sample,entries\n";
  std::map<PlanePartition, double> hist;
  for (long s = 0; s < c.replicas; ++s) {
    for (long k = 0; k < thin * sweep; ++k) chain.step(rng);
    os << s << ',';
    for (std::size_t k = 0; k < chain.state().a.size(); ++k) os << (k ? " " : "") << chain.state().a[k];
    os << '\n';
    hist[chain.state()] += 1;
  }
  m.add_file("states.csv", os.str());
  m.set("acceptance_rate", static_cast<double>(chain.accepted()) / static_cast<double>(std::max(1L, chain.proposed())));
  if (enumerate_plane_partitions(M, N, H).size() <= 20000) {
    auto k = mcmc_exact_kernel(M, N, H, t, zeta);
    std::vector<double> counts;
    for (const auto& st : k.states) counts.push_back(hist.count(st) ? hist[st] : 0.0);
    auto chi = chi_square_gof(counts, k.target);
    m.set("chi2_p", chi.p_value);
    m.set("slem", second_eigenvalue_modulus(k));
  }
}

void exp_verify_gibbs(const RunConfig& c, RunManifest& m) {
  HahpParams hp{param(c, "M", 3), param(c, "N", 2), param(c, "t", 0.3), param(c, "zeta", 0.3)};
  auto rep = hahp_gibbs_invariance(hp, param(c, "H", 4));
  json s{{"max_tv", rep.max_tv}, {"groups", rep.groups}};
  m.add_file("summary.json", s.dump(2) + "\n");
}

void exp_verify_monotone(const RunConfig& c, RunManifest& m) {
  double t = param(c, "t", 0.5);
  if (c.params.contains("bottom")) {
    std::vector<long> v = c.params.at("bottom").get<std::vector<long>>();
    long t1 = param(c, "t1", 0L);
    BridgeSpec spec{t1, t1 + static_cast<long>(v.size()) - 1, param(c, "a", v.front()), param(c, "b", v.back())};
    std::vector<long> S = c.params.contains("S") ? c.params.at("S").get<std::vector<long>>() : full_S(spec.t0, spec.t1);
    auto rep = verify_monotone_lemma(t, spec, UpRightPath(t1, v), S);
    m.add_file("lemma.csv", rep.to_csv());
    json s{{"c", rep.c}, {"lemma_failures", rep.lemma_failures}, {"set_checks", rep.set_checks},
           {"set_failures", rep.set_failures}, {"tail_checks", rep.tail_checks}, {"tail_failures", rep.tail_failures}};
    m.add_file("summary.json", s.dump(2) + "\n");
    return;
  }
  auto rep = verify_monotone_suite(t, param(c, "n_max", 4), param(c, "box", 4));
  json s{{"t", t}, {"instances", rep.instances}, {"lemma_checks", rep.lemma_checks}, {"set_checks", rep.set_checks},
         {"tail_checks", rep.tail_checks}, {"failures", rep.failures}, {"worst_margin", rep.worst_margin}};
  m.add_file("summary.json", s.dump(2) + "\n");
}

void exp_couple_kmt(const RunConfig& c, RunManifest& m) {
  double p = param(c, "p", 0.5);
  if (!c.N_list.empty()) {
    Rng rng(derive_replica_seed(c.master_seed(), 0));
    auto g = delta_growth_experiment(rng, p, c.N_list, c.replicas, param(c, "z_offset", 0L));
    m.add_file("delta_growth.csv", g.to_csv());
    json s{{"slope", g.slope}, {"intercept", g.intercept}, {"residual_rms", g.residual_rms}};
    m.add_file("summary.json", s.dump(2) + "\n");
    return;
  }
  long n = param(c, "n", 64L);
  long z = param(c, "z", static_cast<long>(std::floor(p * static_cast<double>(n))));
  bool dump = param(c, "dump", false);
  auto samples = run_replicas<CouplingSample>(c.replicas, c.workers, c.master_seed(),
                                              [&](Rng& rng, long) { return kmt_couple(rng, n, z, p); });
  std::ostringstream os;
  os << "replica,delta\n";
  for (long i = 0; i < c.replicas; ++i) os << i << ',' << fmt_double(samples[i].delta) << '\n';
  m.add_file("deltas.csv", os.str());
  if (dump) {
    std::ostringstream d;
    d << "replica,t,bridge,walk\n";
    for (long i = 0; i < c.replicas; ++i)
      for (long k = 0; k <= n; ++k)
        d << i << ',' << k << ',' << fmt_double(samples[i].bridge[k]) << ',' << samples[i].walk.values()[k] << '\n';
    m.add_file("samples.csv", d.str());
  }
}

void exp_local_clt(const RunConfig& c, RunManifest& m) {
  double we = param(c, "w_exponent", 0.6);
  std::ostringstream os;
  os << "n,z,w_range,max_rel_error\n";
  for (long n : n_list_or(c, {100, 1000, 10000})) {
    long z = param(c, "z", n / 2);
    double w = std::pow(static_cast<double>(n), we);
    os << n << ',' << z << ',' << fmt_double(w) << ',' << fmt_double(local_clt_check(n, z, w)) << '\n';
  }
  m.add_file("local_clt.csv", os.str());
}

void exp_tw_reference(const RunConfig& c, RunManifest& m) {
  TwOracleParams p;
  p.n = param(c, "n", 1000);
  p.replicas = c.replicas;
  p.seed = c.master_seed();
  p.workers = c.workers;
  auto ref = tw_reference_build(p);
  m.set("median", ref.median());
  m.set("mean", ref.mean);
  m.set("variance", ref.variance);
  m.add_file("tw_reference.json", ref.to_json().dump() + "\n");
  m.add_file("tw_reference.csv", ref.to_csv());
}

void exp_onepoint(const RunConfig& c, RunManifest& m) {
  auto spec = spec_from(c);
  auto tw = tw_from(c);
  Reach reach{0, 0, 0};
  std::ostringstream os;
  os << "N,replica,f0\n";
  json rows = json::array();
  for (long N : n_list_or(c, {64, 128, 256})) {
    long idf = 0;
    auto raws = sample_raw_curves(spec, N, c.replicas, derive_replica_seed(c.master_seed(), static_cast<std::uint64_t>(N)),
                                  c.workers, reach, &idf);
    auto row = onepoint_row(spec, N, raws, tw);
    for (std::size_t i = 0; i < row.f0.size(); ++i) os << N << ',' << i << ',' << fmt_double(row.f0[i]) << '\n';
    rows.push_back({{"N", N}, {"ks", row.ks}, {"mean", row.mean}, {"variance", row.variance}, {"identity_failures", idf}});
  }
  m.add_file("onepoint.csv", os.str());
  m.add_file("summary.json", json{{"model", model_name(spec.model)}, {"rows", rows}}.dump(2) + "\n");
}

void exp_transversal(const RunConfig& c, RunManifest& m) {
  auto spec = spec_from(c);
  double s = param(c, "s", 1.0);
  Reach reach{0, s, s};
  std::map<long, std::vector<RawCurve>> raws;
  for (long N : n_list_or(c, {64, 128, 256}))
    raws[N] = sample_raw_curves(spec, N, c.replicas, derive_replica_seed(c.master_seed(), static_cast<std::uint64_t>(N)),
                                c.workers, reach);
  auto rep = transversal_exponent_diag(spec, raws, s);
  m.add_file("summary.json", rep.to_json().dump(2) + "\n");
}

void exp_identity(const RunConfig& c, RunManifest& m) {
  auto rep = identity_svhl(param(c, "M", 6), param(c, "N", 4), param(c, "t", 0.5), param(c, "zeta", 0.5), c.replicas,
                           c.master_seed(), c.workers);
  m.add_file("summary.json", rep.to_json().dump(2) + "\n");
}

void exp_acceptance(const RunConfig& c, RunManifest& m) {
  int M = param(c, "M", 64), N = param(c, "N", 64), H = param(c, "H", 64);
  double t = param(c, "t", 0.5), zeta = param(c, "zeta", 0.5), r = param(c, "r", 1.0), alpha = param(c, "alpha", 2.0 / 3);
  long s1 = static_cast<long>(std::floor(r * std::pow(static_cast<double>(N), alpha)));
  auto pairs = mcmc_top_pairs(M, N, H, t, zeta, param(c, "burn_in", 200L), param(c, "thin", 5L), c.replicas, s1,
                              derive_replica_seed(c.master_seed(), 0));
  Rng rng(derive_replica_seed(c.master_seed(), 1));
  auto rep = acceptance_probability_experiment(rng, pairs.pairs, s1, t, {1e-6, 1e-4, 1e-3, 1e-2, 0.1, 0.5});
  json s = rep.to_json();
  s["s1"] = s1;
  s["mcmc_acceptance_rate"] = pairs.acceptance_rate;
  s["exploratory"] = true;
  m.add_file("summary.json", s.dump(2) + "\n");
}

void exp_increments(const RunConfig& c, RunManifest& m) {
  double r = param(c, "r", 1.0);
  long N = n_list_or(c, {256}).front();
  auto spec = spec_from(c);
  json out;
  if (spec.model == Model::SV) {
    auto g = sv_g_curves(spec, N, r, c.replicas, c.master_seed(), c.workers);
    out["sv"] = increment_variance_diag(g, r, spec.bridge_slope()).to_json();
  }
  double p = param(c, "bernoulli_p", 0.5);
  auto b = bernoulli_g_curves(p, param(c, "bernoulli_N", 512L), r, c.replicas, derive_replica_seed(c.master_seed(), 7));
  out["bernoulli"] = increment_variance_diag(b, r, p).to_json();
  m.add_file("summary.json", out.dump(2) + "\n");
}

const std::map<std::string, Handler>& registry() {
  static const std::map<std::string, Handler> r{
      {"sample-asep", exp_sample_asep},       {"sample-s6v", exp_sample_s6v},
      {"sample-hahp", exp_sample_hahp},       {"mcmc-hahp", exp_mcmc_hahp},
      {"verify-gibbs", exp_verify_gibbs},     {"verify-monotone", exp_verify_monotone},
      {"couple-kmt", exp_couple_kmt},         {"local-clt", exp_local_clt},
      {"tw-reference", exp_tw_reference},     {"exp-onepoint", exp_onepoint},
      {"exp-transversal", exp_transversal},   {"exp-identity-svhl", exp_identity},
      {"exp-acceptance", exp_acceptance},     {"exp-increments", exp_increments},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : registry()) v.push_back(k);
    return v;
  }();
  return names;
}

int run(const RunConfig& cfg) {
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  RunManifest man(cfg);
  try {
    man.begin();
    man.record_seeds(cfg.replicas);
    registry().at(cfg.experiment)(cfg, man);
    man.finalize();
  } catch (const std::exception& e) {
    man.fail(e.what());
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << man.dir().string() << "\n";
  return 0;
}

}  // namespace kpzlab
