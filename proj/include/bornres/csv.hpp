#pragma once

// Plain CSV tables with a '#' metadata header. Numbers are written in the
// shortest round-trip form, so output is byte-identical across runs.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

namespace bornres {

inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
  return {buf, res.ptr};
}

inline std::string format_number(int v) { return std::to_string(v); }
inline std::string format_number(std::size_t v) { return std::to_string(v); }

inline double parse_number(const std::string &s) {
  double v = 0.0;
  const char *first = s.data();
  const char *last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw std::runtime_error("csv: not a number: '" + s + "'");
  }
  return v;
}

class CsvTable {
 public:
  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void set_meta(const std::string &key, const std::string &value) {
    for (auto &kv : meta_) {
      if (kv.first == key) {
        kv.second = value;
        return;
      }
    }
    meta_.emplace_back(key, value);
  }
  void set_meta(const std::string &key, double value) { set_meta(key, format_number(value)); }

  // Footer entries are written as '#' lines after the rows.
  void set_footer(const std::string &key, double value) { footer_.emplace_back(key, format_number(value)); }

  void add_row(std::vector<std::string> row) {
    if (row.size() != columns_.size()) {
      throw std::invalid_argument("csv: row has " + std::to_string(row.size()) + " fields, expected " +
                                  std::to_string(columns_.size()));
    }
    rows_.push_back(std::move(row));
  }

  void add_row(const std::vector<double> &values) {
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values) row.push_back(format_number(v));
    add_row(std::move(row));
  }

  [[nodiscard]] const std::vector<std::string> &columns() const { return columns_; }
  [[nodiscard]] const std::vector<std::vector<std::string>> &rows() const { return rows_; }
  [[nodiscard]] const std::vector<std::pair<std::string, std::string>> &meta() const { return meta_; }
  [[nodiscard]] const std::vector<std::pair<std::string, std::string>> &footer() const { return footer_; }

  [[nodiscard]] std::size_t column_index(const std::string &name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
      if (columns_[i] == name) return i;
    throw std::out_of_range("csv: no column '" + name + "'");
  }

  [[nodiscard]] std::vector<double> column(const std::string &name) const {
    const std::size_t idx = column_index(name);
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto &row : rows_) out.push_back(row[idx].empty() ? 0.0 : parse_number(row[idx]));
    return out;
  }

  [[nodiscard]] std::string meta_value(const std::string &key) const {
    for (const auto &kv : meta_)
      if (kv.first == key) return kv.second;
    for (const auto &kv : footer_)
      if (kv.first == key) return kv.second;
    throw std::out_of_range("csv: no metadata key '" + key + "'");
  }

  [[nodiscard]] std::string to_string() const {
    std::ostringstream out;
    write(out);
    return out.str();
  }

  void write(std::ostream &out) const {
    for (const auto &[k, v] : meta_) out << "# " << k << ": " << v << '\n';
    write_line(out, columns_);
    for (const auto &row : rows_) write_line(out, row);
    for (const auto &[k, v] : footer_) out << "# " << k << ": " << v << '\n';
  }

  /// Header '#' lines become metadata, '#' lines after the first data row
  /// become footer entries.
  static CsvTable read(std::istream &in) {
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (line[0] == '#') {
        auto body = line.substr(1);
        if (!body.empty() && body[0] == ' ') body.erase(0, 1);
        const auto colon = body.find(": ");
        std::string key = colon == std::string::npos ? body : body.substr(0, colon);
        std::string value = colon == std::string::npos ? "" : body.substr(colon + 2);
        (have_header && !t.rows_.empty() ? t.footer_ : t.meta_).emplace_back(std::move(key), std::move(value));
        continue;
      }
      auto fields = split(line);
      if (!have_header) {
        t.columns_ = std::move(fields);
        have_header = true;
      } else {
        t.add_row(std::move(fields));
      }
    }
    if (!have_header) throw std::runtime_error("csv: missing column header");
    return t;
  }

 private:
  static void write_line(std::ostream &out, const std::vector<std::string> &fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << fields[i];
    }
    out << '\n';
  }

  static std::vector<std::string> split(const std::string &line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        out.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    out.push_back(cur);
    return out;
  }

  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::pair<std::string, std::string>> footer_;
};

/// Writes `content` to `path` through a sibling temporary file and a rename,
/// so readers never observe a partial file.
inline void write_file_atomically(const std::filesystem::path &path, const std::string &content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace bornres
