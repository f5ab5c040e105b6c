#pragma once

#include "json.hpp"

#include <chrono>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace fastr::cli {

/// One record per command invocation: resolved configuration, file paths,
/// per-phase wall time, and library version.
class RunManifest {
 public:
  explicit RunManifest(std::string command);

  nlohmann::json& config() { return config_; }
  void input(const std::string& role, const std::filesystem::path& path);
  void output(const std::string& role, const std::filesystem::path& path);

  /// Starts timing `phase`; the phase ends at the next begin_phase() or write().
  void begin_phase(const std::string& phase);
  void add_timing(const std::string& phase, double seconds);

  void write(const std::filesystem::path& path);

 private:
  void end_phase();

  std::string command_;
  nlohmann::json config_ = nlohmann::json::object();
  nlohmann::json inputs_ = nlohmann::json::object();
  nlohmann::json outputs_ = nlohmann::json::object();
  std::vector<std::pair<std::string, double>> timings_;
  std::string open_phase_;
  std::chrono::steady_clock::time_point phase_start_;
};

}  // namespace fastr::cli
