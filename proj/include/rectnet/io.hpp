#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rectnet {

// Shortest decimal that round-trips the exact double ("inf" / "-inf" / "nan").
std::string fmt_double(double v);

// Fixed-precision helper for SVG coordinates (byte-stable output).
std::string fmt_fixed(double v, int digits = 6);

struct CsvWriter {
  explicit CsvWriter(std::string path);
  void comment(const std::string& line);              // "# ..." header lines
  void row(const std::vector<std::string>& cells);
  void close();
  ~CsvWriter();

 private:
  struct Impl;
  Impl* impl_;
};

std::string csv_cell(double v);

void write_text_file(const std::string& path, const std::string& content);

// FNV-1a 64-bit over a file's bytes, hex-encoded.
std::string file_checksum(const std::string& path);
uint64_t fnv1a64(const void* data, size_t n);

}  // namespace rectnet
