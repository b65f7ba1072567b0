#pragma once

#include <map>
#include <string>
#include <vector>

namespace rectnet {

extern const char* kVersion;

// Reproducibility record: the config echo, code version, wall-clock stamps
// and per-output checksums. Written once at start and finalized at the end,
// so failed runs leave a diagnosable trace.
class RunManifest {
 public:
  RunManifest(std::string out_dir, std::string command);

  void set_option(const std::string& key, const std::string& value);
  void add_output(const std::string& path);

  void write_started();
  void finalize(bool ok, const std::string& message = "");

  const std::string& dir() const { return dir_; }
  std::string path_in_dir(const std::string& name) const;

 private:
  void write(const std::string& status, const std::string& message) const;

  std::string dir_;
  std::string command_;
  std::map<std::string, std::string> options_;
  std::vector<std::string> outputs_;
  std::string started_;
};

std::string timestamp_utc();

}  // namespace rectnet
