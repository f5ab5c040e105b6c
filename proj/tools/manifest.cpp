#include "manifest.hpp"

#include "fastr/errors.hpp"
#include "fastr/version.hpp"

#include <fstream>

namespace fastr::cli {

RunManifest::RunManifest(std::string command) : command_(std::move(command)) {}

void RunManifest::input(const std::string& role, const std::filesystem::path& path) {
  inputs_[role] = path.string();
}

void RunManifest::output(const std::string& role, const std::filesystem::path& path) {
  outputs_[role] = path.string();
}

void RunManifest::begin_phase(const std::string& phase) {
  end_phase();
  open_phase_ = phase;
  phase_start_ = std::chrono::steady_clock::now();
}

void RunManifest::add_timing(const std::string& phase, double seconds) {
  timings_.emplace_back(phase, seconds < 0.0 ? 0.0 : seconds);
}

void RunManifest::end_phase() {
  if (open_phase_.empty()) return;
  add_timing(open_phase_,
             std::chrono::duration<double>(std::chrono::steady_clock::now() - phase_start_).count());
  open_phase_.clear();
}

void RunManifest::write(const std::filesystem::path& path) {
  end_phase();
  output("manifest", path);
  nlohmann::json doc;
  doc["command"] = command_;
  doc["version"] = kVersion;
  doc["config"] = config_;
  doc["inputs"] = inputs_;
  doc["outputs"] = outputs_;
  auto& t = doc["timings_s"] = nlohmann::json::object();
  for (const auto& [phase, s] : timings_) t[phase] = s;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot write manifest " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace fastr::cli
