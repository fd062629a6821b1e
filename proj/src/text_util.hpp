#pragma once

// Internal helpers for the CSV/JSON file formats.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "bustop/error.hpp"

namespace bustop::detail {

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto end = line.find(sep, start);
    if (end == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, end - start));
    start = end + 1;
  }
}

inline std::string_view trim_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, p.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline void write_file(const std::filesystem::path& p, std::string_view content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + p.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

// Line-oriented reader that tracks 1-based line numbers for diagnostics.
class CsvReader {
 public:
  CsvReader(std::string content, std::string name) : content_(std::move(content)), name_(std::move(name)) {}

  // Consumes the header line and checks it matches exactly.
  void expect_header(std::string_view header) {
    std::string_view line;
    if (!next(line) || line != header) {
      fail("expected header '" + std::string(header) + "'");
    }
  }

  bool next(std::string_view& line) {
    while (pos_ < content_.size()) {
      auto end = content_.find('\n', pos_);
      if (end == std::string::npos) end = content_.size();
      line = trim_cr(std::string_view(content_).substr(pos_, end - pos_));
      pos_ = end + 1;
      ++line_no_;
      if (!line.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::MalformedRecord, name_ + " line " + std::to_string(line_no_) + ": " + what);
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::string content_;
  std::string name_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

}  // namespace bustop::detail
