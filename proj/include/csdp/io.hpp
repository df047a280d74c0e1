//
// Copyright 2026 The CSDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// File formats.
//
// Model file (JSON):
//
//   {
//     "format": "cmc-model/1",
//     "orientation": "column-stochastic",
//     "num_states": 2,
//     "num_sequences": 2,
//     "transitions": [[P11, P12], [P21, P22]],
//     "coupling": [[0.75, 0.25], [0.25, 0.75]]
//   }
//
// Each P is written row-major as a list of m rows. With the column-stochastic
// orientation entry [b][a] is Pr[next = b | source = a]; "row-stochastic"
// files are transposed on load.
//
// Database file (CSV): a header row of sequence identifiers, then one row per
// time step (row r is time t = r + 1) with integer states.

#ifndef CSDP_IO_HPP
#define CSDP_IO_HPP

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "csdp/cmc.hpp"
#include "csdp/error.hpp"
#include "csdp/fran.hpp"

namespace csdp {

using Json = nlohmann::ordered_json;

inline constexpr const char* kModelFormat = "cmc-model/1";

inline std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("", "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

inline Json ParseJsonText(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("", source + ": " + e.what());
  }
}

namespace detail {

inline const Json& Field(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(path.empty() ? key : path + "." + key, "missing required field");
  }
  return obj.at(key);
}

inline double JsonNumber(const Json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path, "expected a number");
  return v.get<double>();
}

inline int JsonInt(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ParseError(path, "expected an integer");
  return v.get<int>();
}

inline Eigen::MatrixXd JsonMatrix(const Json& v, int rows, int cols, const std::string& path) {
  if (!v.is_array() || v.size() != static_cast<std::size_t>(rows)) {
    throw ParseError(path, "expected " + std::to_string(rows) + " rows");
  }
  Eigen::MatrixXd out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    const Json& row = v[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(cols)) {
      throw ParseError(row_path, "expected " + std::to_string(cols) + " entries");
    }
    for (int c = 0; c < cols; ++c) {
      out(r, c) = JsonNumber(row[static_cast<std::size_t>(c)],
                             row_path + "[" + std::to_string(c) + "]");
    }
  }
  return out;
}

inline Json MatrixJson(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline CmcModel ModelFromJson(const Json& doc) {
  if (!doc.is_object()) throw ParseError("", "model document must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "format" && key != "orientation" && key != "num_states" &&
        key != "num_sequences" && key != "transitions" && key != "coupling" &&
        key != "description") {
      throw ParseError(key, "unknown field");
    }
  }
  const Json& format = detail::Field(doc, "format", "");
  if (!format.is_string() || format.get<std::string>() != kModelFormat) {
    throw ParseError("format", std::string("expected \"") + kModelFormat + "\"");
  }
  const Json& orientation = detail::Field(doc, "orientation", "");
  if (!orientation.is_string() || (orientation != "column-stochastic" &&
                                   orientation != "row-stochastic")) {
    throw ParseError("orientation", "expected \"column-stochastic\" or \"row-stochastic\"");
  }
  const bool transpose = orientation == "row-stochastic";
  const int m = detail::JsonInt(detail::Field(doc, "num_states", ""), "num_states");
  const int s = detail::JsonInt(detail::Field(doc, "num_sequences", ""), "num_sequences");
  if (s < 1) throw ParseError("num_sequences", "must be >= 1");
  if (m < 2) throw ParseError("num_states", "must be >= 2");

  const Json& trans = detail::Field(doc, "transitions", "");
  if (!trans.is_array() || trans.size() != static_cast<std::size_t>(s)) {
    throw ParseError("transitions", "expected " + std::to_string(s) + " rows of matrices");
  }
  std::vector<std::vector<TransitionMatrix>> transitions(static_cast<std::size_t>(s));
  for (int j = 0; j < s; ++j) {
    const std::string row_path = "transitions[" + std::to_string(j) + "]";
    const Json& row = trans[static_cast<std::size_t>(j)];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(s)) {
      throw ParseError(row_path, "expected " + std::to_string(s) + " matrices");
    }
    for (int k = 0; k < s; ++k) {
      Eigen::MatrixXd p = detail::JsonMatrix(row[static_cast<std::size_t>(k)], m, m,
                                             row_path + "[" + std::to_string(k) + "]");
      if (transpose) p.transposeInPlace();
      transitions[static_cast<std::size_t>(j)].emplace_back(std::move(p));
    }
  }
  const Eigen::MatrixXd lambda =
      detail::JsonMatrix(detail::Field(doc, "coupling", ""), s, s, "coupling");

  CmcModel model(StateSpace{s, m}, std::move(transitions), CouplingWeights(lambda));
  const ValidationReport report = ValidateModel(model);
  if (!report.ok()) throw ParseError("model", report.violations.front());
  return model;
}

inline CmcModel LoadModel(const std::filesystem::path& path) {
  const Json doc = ParseJsonText(ReadTextFile(path), path.string());
  try {
    return ModelFromJson(doc);
  } catch (const ParseError& e) {
    throw ParseError(e.field(), path.string() + ": " + std::string(e.what()));
  }
}

inline Json ModelToJson(const CmcModel& model) {
  Json doc;
  doc["format"] = kModelFormat;
  doc["orientation"] = "column-stochastic";
  doc["num_states"] = model.m();
  doc["num_sequences"] = model.s();
  Json trans = Json::array();
  for (int j = 0; j < model.s(); ++j) {
    Json row = Json::array();
    for (int k = 0; k < model.s(); ++k) row.push_back(detail::MatrixJson(model.transition(j, k).entries));
    trans.push_back(std::move(row));
  }
  doc["transitions"] = std::move(trans);
  doc["coupling"] = detail::MatrixJson(model.weights().lambda);
  return doc;
}

namespace detail {

inline std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

inline SequenceDatabase DatabaseFromCsv(const std::string& text, int num_states,
                                        const std::string& source = "database") {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("header", source + ": empty file");
  const std::vector<std::string> header = detail::SplitCsvLine(line);
  const int s = static_cast<int>(header.size());
  if (s < 1) throw ParseError("header", source + ": no sequence columns");
  std::vector<std::vector<int>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> cells = detail::SplitCsvLine(line);
    const std::string where = "line " + std::to_string(line_no);
    if (static_cast<int>(cells.size()) != s) {
      throw ParseError(where, source + ": expected " + std::to_string(s) + " columns");
    }
    std::vector<int> row;
    for (const std::string& c : cells) {
      int v = 0;
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || ptr != c.data() + c.size()) {
        throw ParseError(where, source + ": '" + c + "' is not an integer state");
      }
      if (v < 0 || v >= num_states) {
        throw ParseError(where, source + ": state " + c + " outside 0.." +
                                    std::to_string(num_states - 1));
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("rows", source + ": no time steps");
  return SequenceDatabase::Create(StateSpace{s, num_states}, std::move(rows));
}

inline SequenceDatabase LoadDatabase(const std::filesystem::path& path, int num_states) {
  return DatabaseFromCsv(ReadTextFile(path), num_states, path.string());
}

// Shortest round-trip decimal representation.
inline std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline void AppendReleaseLog(const std::filesystem::path& path, int t, const AoiVector& age,
                             const std::string& query, double eps_c, std::uint64_t seed,
                             const std::vector<double>& value) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error("cannot append to " + path.string());
  if (fresh) out << "t,age,query,eps_c,seed,value\n";
  out << t << ',' << age.Format() << ',' << query << ',' << FormatDouble(eps_c) << ',' << seed
      << ',';
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (i) out << ';';
    out << FormatDouble(value[i]);
  }
  out << '\n';
}

// A rectangular result table with typed cells. Empty cells are absent values.
class Table {
 public:
  using Cell = std::variant<std::monostate, double, std::int64_t, std::uint64_t, bool, std::string>;

  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }

  void AddRow(std::vector<Cell> row) {
    detail::Require(row.size() == columns_.size(), "table: row width mismatch");
    rows_.push_back(std::move(row));
  }

  std::string ToCsv() const {
    std::string out;
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      if (c) out += ',';
      out += columns_[c];
    }
    out += '\n';
    for (const auto& row : rows_) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += ',';
        out += CellText(row[c]);
      }
      out += '\n';
    }
    return out;
  }

  Json ToJson() const {
    Json arr = Json::array();
    for (const auto& row : rows_) {
      Json obj = Json::object();
      for (std::size_t c = 0; c < row.size(); ++c) obj[columns_[c]] = CellJson(row[c]);
      arr.push_back(std::move(obj));
    }
    return arr;
  }

  std::string Render(const std::string& format) const {
    if (format == "csv") return ToCsv();
    if (format == "json") return ToJson().dump(2) + "\n";
    throw ParseError("format", "expected csv or json, got '" + format + "'");
  }

 private:
  static std::string CellText(const Cell& cell) {
    return std::visit(
        [](const auto& v) -> std::string {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::monostate>) return "";
          else if constexpr (std::is_same_v<T, double>) return FormatDouble(v);
          else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
          else if constexpr (std::is_same_v<T, std::string>) return v;
          else return std::to_string(v);
        },
        cell);
  }

  static Json CellJson(const Cell& cell) {
    return std::visit(
        [](const auto& v) -> Json {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::monostate>) return nullptr;
          else if constexpr (std::is_same_v<T, double>) {
            if (!std::isfinite(v)) return FormatDouble(v);
            return v;
          } else {
            return v;
          }
        },
        cell);
  }

  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

// 64-bit FNV-1a.
inline std::uint64_t Fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string HexDigest(std::uint64_t h) {
  std::ostringstream os;
  os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace csdp

#endif  // CSDP_IO_HPP
