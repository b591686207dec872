#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "tomoforge/matrix.hpp"
#include "tomoforge/reconstruct.hpp"

namespace tomoforge {

using Json = nlohmann::ordered_json;

/// Matrix exchange format shared by every module and the CLI:
/// {"rows": r, "cols": c, "re": [...], "im": [...]}, row-major.
inline Json matrix_to_json(const ComplexMatrix& m) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

inline ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.contains("rows") || !j.contains("cols") || !j.contains("re") || !j.contains("im")) {
    throw DataError("matrix JSON: expected fields rows, cols, re, im");
  }
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  if (rows <= 0 || cols <= 0) throw DataError("matrix JSON: non-positive dimensions");
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<Eigen::Index>(re.size()) != rows * cols ||
      static_cast<Eigen::Index>(im.size()) != rows * cols) {
    throw DataError("matrix JSON: entry count does not match rows*cols");
  }
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      const std::size_t k = static_cast<std::size_t>(r * cols + c);
      m(r, c) = Complex(re.at(k).get<double>(), im.at(k).get<double>());
    }
  if (!is_finite(m)) throw DataError("matrix JSON: non-finite entries");
  return m;
}

/// Measurement record file: {"frame": matrix, "expectations": [...]}.
inline Json record_to_json(const MeasurementRecord& rec) {
  Json j;
  j["frame"] = matrix_to_json(rec.frame);
  Json e = Json::array();
  for (Eigen::Index i = 0; i < rec.expectations.size(); ++i) e.push_back(rec.expectations[i]);
  j["expectations"] = std::move(e);
  return j;
}

inline MeasurementRecord record_from_json(const Json& j) {
  if (!j.contains("frame") || !j.contains("expectations")) {
    throw DataError("measurement record JSON: expected fields frame, expectations");
  }
  MeasurementRecord rec;
  rec.frame = matrix_from_json(j.at("frame"));
  const auto& e = j.at("expectations");
  rec.expectations.resize(static_cast<Eigen::Index>(e.size()));
  for (Eigen::Index i = 0; i < rec.expectations.size(); ++i) {
    rec.expectations[i] = e.at(static_cast<std::size_t>(i)).get<double>();
  }
  return rec;
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

/// Writes the full content through a temp file and renames it into place, so
/// a failed run never leaves a partial output behind.
inline void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    if (!out.good()) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot move output into place at " + path + ": " + ec.message());
  }
}

}  // namespace tomoforge
