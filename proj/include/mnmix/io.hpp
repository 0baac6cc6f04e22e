// mnmix/io.hpp

// Copyright 2026  The mnmix authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//  http://www.apache.org/licenses/LICENSE-2.0

// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mnmix/errors.hpp"
#include "mnmix/matrix_normal.hpp"
#include "mnmix/mixture.hpp"

namespace mnmix {

namespace io_detail {

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc())
    throw IoError("failed to format a number");
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view token, int line_number) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw IoError("row " + std::to_string(line_number) + ": invalid number '" +
                  std::string(token) + "'");
  return value;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << contents;
  if (!out) throw IoError("failed writing " + path.string());
}

inline std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  for (int i = 15; i >= 0; --i) {
    buf[i] = "0123456789abcdef"[hash & 0xf];
    hash >>= 4;
  }
  return std::string(buf, 16);
}

}  // namespace io_detail

struct DatasetManifest {
  int n = 0;
  int r = 0;
  int p = 0;
  std::string layout = "row-major-stacked";
  bool labels_present = false;
  std::string checksum;
};

struct Dataset {
  MatrixStack stack;
  std::optional<std::vector<int>> labels;
  DatasetManifest manifest;
};

inline void write_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
  std::string out;
  for (int lab : labels) {
    out += std::to_string(lab);
    out += '\n';
  }
  io_detail::write_file(path, out);
}

inline std::vector<int> read_labels(const std::filesystem::path& path) {
  const std::string contents = io_detail::read_file(path);
  std::vector<int> labels;
  std::istringstream lines(contents);
  std::string line;
  int line_number = 0;
  while (std::getline(lines, line)) {
    ++line_number;
    if (line.empty()) continue;
    int value = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
    if (ec != std::errc() || ptr != line.data() + line.size())
      throw IoError("row " + std::to_string(line_number) + ": invalid label '" + line + "'");
    labels.push_back(value);
  }
  return labels;
}

/// Writes data.csv (n*r rows by p columns, sample i in rows i*r .. i*r+r-1),
/// labels.csv when labels are given, and the manifest with a checksum of the
/// data file.
inline DatasetManifest write_dataset(const std::filesystem::path& dir, const MatrixStack& stack,
                                     const std::optional<std::vector<int>>& labels = {}) {
  if (stack.empty()) throw IoError("refusing to write an empty dataset");
  if (labels && labels->size() != stack.size())
    throw LengthMismatch("labels length does not match the stack");
  std::filesystem::create_directories(dir);

  const auto r = stack.front().rows();
  const auto p = stack.front().cols();
  std::string csv;
  for (const auto& y : stack) {
    if (y.rows() != r || y.cols() != p)
      throw DimensionMismatch("stack matrices have inconsistent dimensions");
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) {
        if (j > 0) csv += ',';
        csv += io_detail::format_double(y(i, j));
      }
      csv += '\n';
    }
  }
  io_detail::write_file(dir / "data.csv", csv);
  if (labels) write_labels(dir / "labels.csv", *labels);

  DatasetManifest manifest;
  manifest.n = static_cast<int>(stack.size());
  manifest.r = static_cast<int>(r);
  manifest.p = static_cast<int>(p);
  manifest.labels_present = labels.has_value();
  manifest.checksum = io_detail::fnv1a64_hex(csv);

  nlohmann::json doc;
  doc["n"] = manifest.n;
  doc["r"] = manifest.r;
  doc["p"] = manifest.p;
  doc["layout"] = manifest.layout;
  doc["labels_present"] = manifest.labels_present;
  doc["checksum"] = manifest.checksum;
  io_detail::write_file(dir / "manifest.json", doc.dump(2) + "\n");
  return manifest;
}

inline Dataset read_dataset(const std::filesystem::path& dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(io_detail::read_file(dir / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed manifest.json: " + std::string(e.what()));
  }
  Dataset out;
  try {
    out.manifest.n = doc.at("n").get<int>();
    out.manifest.r = doc.at("r").get<int>();
    out.manifest.p = doc.at("p").get<int>();
    out.manifest.layout = doc.at("layout").get<std::string>();
    out.manifest.labels_present = doc.at("labels_present").get<bool>();
    out.manifest.checksum = doc.at("checksum").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("manifest.json missing fields: " + std::string(e.what()));
  }
  if (out.manifest.layout != "row-major-stacked")
    throw IoError("unsupported layout '" + out.manifest.layout + "'");
  if (out.manifest.n < 1 || out.manifest.r < 1 || out.manifest.p < 1)
    throw IoError("manifest.json declares empty dimensions");

  const std::string csv = io_detail::read_file(dir / "data.csv");
  const int expected_rows = out.manifest.n * out.manifest.r;
  out.stack.assign(static_cast<std::size_t>(out.manifest.n),
                   Eigen::MatrixXd(out.manifest.r, out.manifest.p));
  std::istringstream lines(csv);
  std::string line;
  int row = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    if (row >= expected_rows)
      throw IoError("row " + std::to_string(row + 1) + ": more rows than the manifest declares");
    Eigen::MatrixXd& y = out.stack[static_cast<std::size_t>(row / out.manifest.r)];
    const int i = row % out.manifest.r;
    int j = 0;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      if (j >= out.manifest.p)
        throw IoError("row " + std::to_string(row + 1) + ": too many columns");
      y(i, j) = io_detail::parse_double(
          std::string_view(line).substr(pos, comma - pos), row + 1);
      ++j;
      pos = comma + 1;
    }
    if (j != out.manifest.p)
      throw IoError("row " + std::to_string(row + 1) + ": expected " +
                    std::to_string(out.manifest.p) + " columns, got " + std::to_string(j));
    ++row;
  }
  if (row != expected_rows)
    throw IoError("row " + std::to_string(row) + ": expected " +
                  std::to_string(expected_rows) + " data rows");
  // after row-level checks so parse errors surface with their row number
  if (io_detail::fnv1a64_hex(csv) != out.manifest.checksum)
    throw IoError("data.csv checksum mismatch");

  if (out.manifest.labels_present) {
    out.labels = read_labels(dir / "labels.csv");
    if (static_cast<int>(out.labels->size()) != out.manifest.n)
      throw IoError("labels.csv length does not match the manifest");
  }
  return out;
}

/// Serialized fitted model plus the settings that produced it.
struct ModelDocument {
  std::string schema_version = "1";
  MixtureModel model;
  PenaltySpec penalty;
  int iterations = 0;
  bool converged = false;
  double final_objective = 0.0;
  Seed seed = 0;
};

namespace io_detail {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows, int r, int p,
                                        const char* name) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != r)
    throw IoError(std::string("model field '") + name + "' has the wrong shape");
  Eigen::MatrixXd m(r, p);
  for (int i = 0; i < r; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != p)
      throw IoError(std::string("model field '") + name + "' has the wrong shape");
    for (int j = 0; j < p; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  return m;
}

}  // namespace io_detail

inline void write_model(const std::filesystem::path& path, const ModelDocument& doc) {
  if (doc.model.components.empty()) throw IoError("refusing to write an empty model");
  const auto r = doc.model.components.front().mean.rows();
  const auto p = doc.model.components.front().mean.cols();
  nlohmann::json j;
  j["schema_version"] = doc.schema_version;
  j["k"] = doc.model.count();
  j["r"] = static_cast<int>(r);
  j["p"] = static_cast<int>(p);
  j["weights"] = std::vector<double>(doc.model.weights.data(),
                                     doc.model.weights.data() + doc.model.weights.size());
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : doc.model.components) {
    if (!c.mean.allFinite() || !c.row_cov.allFinite() || !c.col_cov.allFinite())
      throw IoError("model contains non-finite values");
    nlohmann::json cj;
    cj["mean"] = io_detail::matrix_to_json(c.mean);
    cj["row_cov"] = io_detail::matrix_to_json(c.row_cov);
    cj["col_cov"] = io_detail::matrix_to_json(c.col_cov);
    comps.push_back(std::move(cj));
  }
  j["components"] = std::move(comps);
  j["penalty"] = {{"kind", to_string(doc.penalty.kind)}, {"lambda", doc.penalty.lambda}};
  j["fit"] = {{"iterations", doc.iterations},
              {"converged", doc.converged},
              {"final_objective", doc.final_objective},
              {"seed", doc.seed}};
  io_detail::write_file(path, j.dump(2) + "\n");
}

inline ModelDocument read_model(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io_detail::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed model file: " + std::string(e.what()));
  }
  ModelDocument doc;
  try {
    doc.schema_version = j.at("schema_version").get<std::string>();
    const int k = j.at("k").get<int>();
    const int r = j.at("r").get<int>();
    const int p = j.at("p").get<int>();
    const auto weights = j.at("weights").get<std::vector<double>>();
    if (static_cast<int>(weights.size()) != k)
      throw IoError("model weights length does not match k");
    doc.model.weights = Eigen::Map<const Eigen::VectorXd>(weights.data(), k);
    const auto& comps = j.at("components");
    if (static_cast<int>(comps.size()) != k)
      throw IoError("model component count does not match k");
    for (const auto& cj : comps) {
      ComponentParams c;
      c.mean = io_detail::matrix_from_json(cj.at("mean"), r, p, "mean");
      c.row_cov = io_detail::matrix_from_json(cj.at("row_cov"), r, r, "row_cov");
      c.col_cov = io_detail::matrix_from_json(cj.at("col_cov"), p, p, "col_cov");
      doc.model.components.push_back(std::move(c));
    }
    doc.penalty.kind = penalty_from_string(j.at("penalty").at("kind").get<std::string>());
    doc.penalty.lambda = j.at("penalty").at("lambda").get<double>();
    doc.iterations = j.at("fit").at("iterations").get<int>();
    doc.converged = j.at("fit").at("converged").get<bool>();
    doc.final_objective = j.at("fit").at("final_objective").get<double>();
    doc.seed = j.at("fit").at("seed").get<Seed>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("model file missing fields: " + std::string(e.what()));
  }
  return doc;
}

}  // namespace mnmix
