#include "rectnet/manifest.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "rectnet/io.hpp"

#include <json.hpp>

namespace rectnet {

const char* kVersion = "rectnet 0.1.0";

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest::RunManifest(std::string out_dir, std::string command)
    : dir_(std::move(out_dir)), command_(std::move(command)) {
  std::filesystem::create_directories(dir_);
}

std::string RunManifest::path_in_dir(const std::string& name) const {
  return (std::filesystem::path(dir_) / name).string();
}

void RunManifest::set_option(const std::string& key, const std::string& value) {
  options_[key] = value;
}

void RunManifest::add_output(const std::string& path) { outputs_.push_back(path); }

void RunManifest::write_started() {
  started_ = timestamp_utc();
  write("running", "");
}

void RunManifest::finalize(bool ok, const std::string& message) {
  write(ok ? "ok" : "failed", message);
}

void RunManifest::write(const std::string& status, const std::string& message) const {
  nlohmann::ordered_json j;
  j["command"] = command_;
  j["version"] = kVersion;
  j["config"] = options_;
  j["started"] = started_;
  j["finished"] = status == "running" ? "" : timestamp_utc();
  j["status"] = status;
  if (!message.empty()) j["message"] = message;
  auto outs = nlohmann::ordered_json::array();
  for (const auto& p : outputs_) {
    nlohmann::ordered_json o;
    o["path"] = p;
    std::error_code ec;
    const auto sz = std::filesystem::file_size(p, ec);
    o["bytes"] = ec ? 0 : static_cast<uint64_t>(sz);
    o["fnv64"] = ec ? "" : file_checksum(p);
    outs.push_back(o);
  }
  j["outputs"] = outs;
  std::ofstream out(path_in_dir("manifest.json"), std::ios::binary);
  out << j.dump(2) << "\n";
}

}  // namespace rectnet
