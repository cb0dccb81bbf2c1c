#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "kpzlab/harness.hpp"

using namespace kpzlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("kpzlab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig s6v_cfg(const fs::path& out, int workers) {
  RunConfig c;
  c.experiment = "sample-s6v";
  c.seed = 1234;
  c.replicas = 12;
  c.workers = workers;
  c.out_dir = out;
  c.params = {{"X", 40}, {"Y", 20}, {"zeta", 0.4}, {"q", 0.3}, {"bitplanes", true}};
  return c;
}

}  // namespace

TEST_CASE("harness: config validation") {
  RunConfig c;
  c.experiment = "no-such-thing";
  c.seed = 1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.experiment = "local-clt";
  c.seed.reset();
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.seed = 1;
  c.replicas = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.replicas = 3;
  CHECK_NOTHROW(c.validate());
  auto back = RunConfig::from_json(c.to_json());
  CHECK(back.experiment == c.experiment);
  CHECK(*back.seed == 1);
  CHECK(back.replicas == 3);
  c.experiment = "bogus";
  CHECK(run(c) == 2);
  CHECK(experiment_names().size() == 14);
}

TEST_CASE("harness: output directory resolution") {
  CHECK(resolve_output_dir("x/y") == fs::path("x/y"));
  setenv("KPZLAB_OUT", "/tmp/kpz_env_out", 1);
  CHECK(resolve_output_dir("") == fs::path("/tmp/kpz_env_out"));
  unsetenv("KPZLAB_OUT");
  CHECK(resolve_output_dir("") == fs::path("out"));
}

TEST_CASE("harness: fnv1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("harness: runs are reproducible and independent of worker count") {
  auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  REQUIRE(run(s6v_cfg(a, 1)) == 0);
  REQUIRE(run(s6v_cfg(b, 1)) == 0);
  REQUIRE(run(s6v_cfg(c, 8)) == 0);
  for (int i = 0; i < 12; ++i) {
    std::string h = "sample-s6v/heights_" + std::to_string(i) + ".csv";
    std::string f = "sample-s6v/field_" + std::to_string(i) + ".s6v";
    CHECK(slurp(a / h) == slurp(b / h));
    CHECK(slurp(a / h) == slurp(c / h));
    CHECK(slurp(a / f) == slurp(c / f));
  }
  CHECK(verify_manifest(a / "sample-s6v"));
  auto man = nlohmann::json::parse(slurp(a / "sample-s6v/manifest.json"));
  CHECK(man["status"] == "complete");
  CHECK(man["replica_seeds"].size() == 12);
  CHECK(man["replica_seeds"][3].get<std::uint64_t>() == derive_replica_seed(1234, 3));
}

TEST_CASE("harness: manifest detects tampering") {
  auto a = scratch("tamper");
  REQUIRE(run(s6v_cfg(a, 1)) == 0);
  std::string why;
  REQUIRE(verify_manifest(a / "sample-s6v", &why));
  {
    std::ofstream out(a / "sample-s6v/heights_0.csv", std::ios::app);
    out << "x";
  }
  CHECK_FALSE(verify_manifest(a / "sample-s6v", &why));
  CHECK_FALSE(why.empty());
}

TEST_CASE("harness: failed runs leave a marker") {
  auto a = scratch("fail");
  RunConfig c;
  c.experiment = "sample-s6v";
  c.seed = 5;
  c.out_dir = a;
  c.params = {{"q", 0.5}, {"xi", 0.5}, {"u", 1.0}};  // violates xi u > q^{-1/2}
  CHECK(run(c) == 1);
  CHECK(fs::exists(a / "sample-s6v/FAILED"));
  auto man = nlohmann::json::parse(slurp(a / "sample-s6v/manifest.json"));
  CHECK(man["status"] == "failed");
  CHECK_FALSE(verify_manifest(a / "sample-s6v"));
  // a good rerun clears the marker
  c.params = {{"X", 8}, {"Y", 8}};
  CHECK(run(c) == 0);
  CHECK_FALSE(fs::exists(a / "sample-s6v/FAILED"));
}

TEST_CASE("harness: small experiments through the library entry point") {
  auto a = scratch("small");
  RunConfig c;
  c.seed = 9;
  c.out_dir = a;
  c.experiment = "local-clt";
  c.N_list = {100, 1000};
  CHECK(run(c) == 0);
  CHECK(slurp(a / "local-clt/local_clt.csv").rfind("n,", 0) == 0);
  c.experiment = "verify-gibbs";
  c.N_list = {};
  c.params = {{"M", 2}, {"N", 1}, {"H", 3}};
  CHECK(run(c) == 0);
  auto s = nlohmann::json::parse(slurp(a / "verify-gibbs/summary.json"));
  CHECK(s["max_tv"].get<double>() < 1e-12);
  c.experiment = "sample-asep";
  c.replicas = 2;
  c.params = {{"T", 10.0}, {"t", 0.3}};
  CHECK(run(c) == 0);
  CHECK(verify_manifest(a / "sample-asep"));
}

TEST_CASE("harness: command line tool") {
  auto a = scratch("cli");
  std::string cli = KPZLAB_CLI;
  std::string base = cli + " sample-hahp --seed 3 --replicas 5 --out " + a.string();
  CHECK(std::system((base + " --set M=3 --set N=2 > /dev/null").c_str()) == 0);
  CHECK(verify_manifest(a / "sample-hahp"));
  // missing seed and unknown subcommand are usage errors
  CHECK(std::system((cli + " sample-hahp --out " + a.string() + " > /dev/null 2>&1").c_str()) != 0);
  CHECK(std::system((cli + " frobnicate --seed 1 > /dev/null 2>&1").c_str()) != 0);
  CHECK(std::system((cli + " --version > /dev/null").c_str()) == 0);
  // config file plus override
  std::ofstream(a / "cfg.json") << R"({"replicas": 2, "params": {"X": 5, "Y": 4}})";
  CHECK(std::system((cli + " sample-s6v --seed 8 --config " + (a / "cfg.json").string() + " --out " +
                     a.string() + " > /dev/null")
                        .c_str()) == 0);
  CHECK(fs::exists(a / "sample-s6v/heights_1.csv"));
  CHECK_FALSE(fs::exists(a / "sample-s6v/heights_2.csv"));
}
