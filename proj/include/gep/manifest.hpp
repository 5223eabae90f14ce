#pragma once

#include <chrono>
#include <map>

#include <json.hpp>

#include "gep/common.hpp"
#include "gep/version.hpp"

namespace gep {

// Reproducibility record written next to every command's outputs: input
// digests, the seed, the effective configuration and per-phase wall clock.
// Re-running with an identical manifest must reproduce the outputs
// byte-for-byte.
class RunManifest {
 public:
  explicit RunManifest(std::string command) : command_(std::move(command)) {}

  void record_input(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) return;
    inputs_[path.string()] = hex64(fnv1a64(read_text_file(path)));
  }
  void record_input_dir(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (auto& e : std::filesystem::directory_iterator(dir))
      if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (auto& f : files) record_input(f);
  }
  void record_output(const std::string& name) { outputs_.push_back(name); }
  void set_seed(uint64_t seed) { seed_ = seed; }
  void set_config_snapshot(std::string snapshot) { config_ = std::move(snapshot); }

  struct Phase {
    RunManifest* owner;
    std::string name;
    std::chrono::steady_clock::time_point start;
    ~Phase() {
      owner->phases_.emplace_back(
          name, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
  };
  Phase phase(std::string name) { return Phase{this, std::move(name), std::chrono::steady_clock::now()}; }

  void write(const std::filesystem::path& dir) const {
    nlohmann::json j;
    j["tool"] = "gep";
    j["version"] = kVersion;
    j["command"] = command_;
    j["seed"] = seed_;
    j["inputs"] = inputs_;
    j["outputs"] = outputs_;
    j["config"] = config_;
    nlohmann::json ph = nlohmann::json::array();
    for (auto& [name, secs] : phases_) ph.push_back({{"phase", name}, {"wall_clock_s", secs}});
    j["phases"] = ph;
    write_text_file(dir / "manifest.json", j.dump(2) + "\n");
  }

 private:
  std::string command_;
  uint64_t seed_ = 0;
  std::map<std::string, std::string> inputs_;
  std::vector<std::string> outputs_;
  std::string config_;
  std::vector<std::pair<std::string, double>> phases_;
};

}  // namespace gep
