/*
 * Run configuration, deterministic seeding, manifests and the experiment
 * dispatcher behind the command line tool.
 */
#ifndef KPZLAB_HARNESS_HPP
#define KPZLAB_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kpzlab/parallel.hpp"
#include "kpzlab/rng.hpp"

namespace kpzlab {

std::string version_string();

struct RunConfig {
  std::string experiment;
  nlohmann::json params = nlohmann::json::object();
  std::vector<long> N_list;
  long replicas = 1;
  std::optional<std::uint64_t> seed;  // required, no clock default
  int workers = 1;
  std::filesystem::path out_dir;

  void validate() const;  // throws std::invalid_argument
  std::uint64_t master_seed() const;
  nlohmann::json to_json() const;
  // merges a JSON config file; explicit fields already set win
  static RunConfig from_json(const nlohmann::json& j);
};

// flag, else $KPZLAB_OUT, else ./out
std::filesystem::path resolve_output_dir(const std::string& flag);

std::uint64_t fnv1a64(const std::string& bytes);
std::uint64_t fnv1a64_file(const std::filesystem::path& p);

// write to <p>.tmp then rename
void write_file_atomic(const std::filesystem::path& p, const std::string& content);

// Manifest lifecycle: begin() writes status "running"; finalize() records the
// file index with sizes and hashes and flips the status to "complete";
// fail() leaves a FAILED marker next to the manifest.
class RunManifest {
 public:
  explicit RunManifest(const RunConfig& cfg);
  void begin();
  // writes an artifact under the run directory and indexes it
  void add_file(const std::string& name, const std::string& content);
  void set(const std::string& key, nlohmann::json value) { extra_[key] = std::move(value); }
  void record_seeds(long replicas);
  void finalize();
  void fail(const std::string& message);
  const std::filesystem::path& dir() const { return dir_; }
  nlohmann::json json() const;

 private:
  RunConfig cfg_;
  std::filesystem::path dir_;
  nlohmann::json files_ = nlohmann::json::array();
  nlohmann::json extra_ = nlohmann::json::object();
  std::vector<std::uint64_t> seeds_;
  std::string status_ = "new";
  double started_ = 0;
  double wall_ = 0;
  void write() const;
};

// true when the manifest is complete and every indexed file matches size and hash
bool verify_manifest(const std::filesystem::path& dir, std::string* why = nullptr);

// f(rng, i) per replica, each with Rng(derive_replica_seed(master, i)); results by index
template <class T, class F>
std::vector<T> run_replicas(long replicas, int workers, std::uint64_t master, F&& f) {
  return parallel_map<T>(replicas, workers, [&](long i) {
    Rng rng(derive_replica_seed(master, static_cast<std::uint64_t>(i)));
    return f(rng, i);
  });
}

const std::vector<std::string>& experiment_names();
// runs cfg.experiment; returns the process exit status
int run(const RunConfig& cfg);

}  // namespace kpzlab

#endif
