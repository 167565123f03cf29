// Copyright (c) 2026 The rgscale developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0.txt
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rgscale/common.hpp"
#include "rgscale/scaling.hpp"

namespace rgscale {

// ---------------------------------------------------------------------------
// Emission-side JSON with insertion-ordered keys and floats at 17 significant
// digits (parsing is a separate concern; this is the writer used for every
// machine-readable report).
// ---------------------------------------------------------------------------

class Json {
 public:
  Json() : value_(nullptr) {}
  Json(std::nullptr_t) : value_(nullptr) {}
  Json(bool b) : value_(b) {}
  Json(int v) : value_(static_cast<std::int64_t>(v)) {}
  Json(std::int64_t v) : value_(v) {}
  Json(std::uint64_t v) : value_(static_cast<std::int64_t>(v)) {}
  Json(double v) : value_(v) {}
  Json(const char* s) : value_(std::string(s)) {}
  Json(std::string s) : value_(std::move(s)) {}

  static Json object() {
    Json j;
    j.value_ = Object{};
    return j;
  }
  static Json array() {
    Json j;
    j.value_ = Array{};
    return j;
  }
  template <typename T>
  static Json array_of(const std::vector<T>& values) {
    Json j = array();
    for (const T& v : values) j.push(Json(v));
    return j;
  }

  Json& set(const std::string& key, Json value) {
    std::get<Object>(value_).emplace_back(key, std::move(value));
    return *this;
  }
  Json& push(Json value) {
    std::get<Array>(value_).push_back(std::move(value));
    return *this;
  }

  std::string dump(int indent = 2) const {
    std::string out;
    write(out, indent, 0);
    out.push_back('\n');
    return out;
  }

 private:
  using Array = std::vector<Json>;
  using Object = std::vector<std::pair<std::string, Json>>;
  std::variant<std::nullptr_t, bool, std::int64_t, double, std::string, Array, Object> value_;

  static void write_escaped(std::string& out, const std::string& s) {
    out.push_back('"');
    for (char c : s) {
      switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            out += buf;
          } else {
            out.push_back(c);
          }
      }
    }
    out.push_back('"');
  }

  void write(std::string& out, int indent, int depth) const {
    const std::string pad(static_cast<size_t>(indent) * (depth + 1), ' ');
    const std::string pad_close(static_cast<size_t>(indent) * depth, ' ');
    if (std::holds_alternative<std::nullptr_t>(value_)) {
      out += "null";
    } else if (auto* b = std::get_if<bool>(&value_)) {
      out += *b ? "true" : "false";
    } else if (auto* i = std::get_if<std::int64_t>(&value_)) {
      out += std::to_string(*i);
    } else if (auto* d = std::get_if<double>(&value_)) {
      out += std::isfinite(*d) ? format_g17(*d) : "null";
    } else if (auto* s = std::get_if<std::string>(&value_)) {
      write_escaped(out, *s);
    } else if (auto* a = std::get_if<Array>(&value_)) {
      if (a->empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (size_t k = 0; k < a->size(); ++k) {
        out += pad;
        (*a)[k].write(out, indent, depth + 1);
        if (k + 1 < a->size()) out.push_back(',');
        out.push_back('\n');
      }
      out += pad_close + "]";
    } else if (auto* o = std::get_if<Object>(&value_)) {
      if (o->empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      for (size_t k = 0; k < o->size(); ++k) {
        out += pad;
        write_escaped(out, (*o)[k].first);
        out += ": ";
        (*o)[k].second.write(out, indent, depth + 1);
        if (k + 1 < o->size()) out.push_back(',');
        out.push_back('\n');
      }
      out += pad_close + "}";
    }
  }
};

// ---------------------------------------------------------------------------
// Files and CSV.
// ---------------------------------------------------------------------------

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw domain_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw domain_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw domain_error("cannot open: " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content;
}

inline std::string series_to_csv(const ScalingSeries& series) {
  std::string csv = "R,value,stderr,samples\n";
  for (const auto& p : series.points) {
    csv += format_g17(p.R);
    csv += ',';
    csv += format_g17(p.value);
    csv += ',';
    csv += format_g17(p.stderr_value);
    csv += ',';
    csv += std::to_string(p.samples);
    csv += '\n';
  }
  return csv;
}

/// Generic numeric CSV: header row plus rows of 17-digit floats.
inline std::string table_to_csv(const std::vector<std::string>& header,
                                const std::vector<std::vector<double>>& rows) {
  std::string csv;
  for (size_t i = 0; i < header.size(); ++i) {
    csv += header[i];
    csv += (i + 1 < header.size()) ? ',' : '\n';
  }
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      csv += format_g17(row[i]);
      csv += (i + 1 < row.size()) ? ',' : '\n';
    }
  }
  return csv;
}

struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    throw domain_error("CSV column not found: " + name);
  }
};

inline CsvData parse_csv(const std::string& text) {
  CsvData data;
  size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = eol + 1;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    size_t c = 0;
    while (true) {
      size_t comma = line.find(',', c);
      cells.push_back(line.substr(c, comma == std::string::npos ? std::string::npos : comma - c));
      if (comma == std::string::npos) break;
      c = comma + 1;
    }
    if (first) {
      data.header = cells;
      first = false;
    } else {
      std::vector<double> row;
      row.reserve(cells.size());
      for (const auto& cell : cells) {
        try {
          row.push_back(std::stod(cell));
        } catch (...) {
          throw domain_error("malformed CSV cell: '" + cell + "'");
        }
      }
      if (row.size() != data.header.size()) throw domain_error("malformed CSV: ragged row");
      data.rows.push_back(std::move(row));
    }
  }
  if (data.header.empty()) throw domain_error("malformed CSV: no header");
  return data;
}

}  // namespace rgscale
