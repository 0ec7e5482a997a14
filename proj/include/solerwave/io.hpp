#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace solerwave {

//! Fixed scientific formatting used by every CSV artifact. NaN or Inf in an
//! output is a bug, never serialized.
inline std::string format_sci(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("format_sci: non-finite value in output");
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

//! Write-temp-then-rename so failures never leave a partial file behind.
inline void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path() && !target.parent_path().empty() &&
      !fs::is_directory(target.parent_path()))
    throw std::invalid_argument("atomic_write_file: directory does not exist: " +
                                target.parent_path().string());
  std::random_device rd;
  const fs::path tmp = target.parent_path() /
                       (target.filename().string() + ".tmp" + std::to_string(rd() % 1000000));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::invalid_argument("atomic_write_file: cannot open " + tmp.string());
    out << content;
    if (!out.good()) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::invalid_argument("atomic_write_file: write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::invalid_argument("atomic_write_file: rename failed for " + path);
  }
}

//! CSV document with a fixed header; all values go through format_sci.
class CsvWriter {
 public:
  explicit CsvWriter(std::string header) : body_(std::move(header)) { body_ += '\n'; }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) body_ += ',';
      body_ += format_sci(values[i]);
    }
    body_ += '\n';
  }

  const std::string& str() const { return body_; }

 private:
  std::string body_;
};

}  // namespace solerwave
