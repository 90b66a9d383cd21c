// Copyright 2026 The headpose Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Pose files. One file holds one set of poses (ground truth or predictions)
// keyed by sample id, in one of four representations:
//
//   euler_deg        pitch,yaw,roll            degrees
//   quaternion_wxyz  qw,qx,qy,qz
//   matrix_rowmajor  m00,m01,m02,m10,...,m22
//   sixd             c1x,c1y,c1z,c2x,c2y,c2z   first two matrix columns
//
// CSV files start with the header `id,group,<columns>`; `group` may be empty.
// JSONL files hold one object per line with the same keys; `group` may be
// omitted or null.

#ifndef HEADPOSE_IO_HPP_
#define HEADPOSE_IO_HPP_

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "headpose/errors.hpp"
#include "headpose/so3.hpp"

namespace headpose {

enum class FileFormat { kCsv, kJsonl };
enum class Representation { kEulerDeg, kQuaternionWxyz, kMatrixRowMajor, kSixD };

/// Orthonormality defect accepted on matrix input before projecting onto
/// SO(3). Matrices printed with ~7 significant digits pass; visibly skewed
/// ones do not.
inline constexpr double kLoadMatrixTolerance = 1e-6;

inline FileFormat parse_file_format(std::string_view name) {
  if (name == "csv") return FileFormat::kCsv;
  if (name == "jsonl") return FileFormat::kJsonl;
  throw InvalidArgument("unknown file format '" + std::string(name) + "' (csv, jsonl)");
}

inline const char* file_format_name(FileFormat f) {
  return f == FileFormat::kCsv ? "csv" : "jsonl";
}

inline Representation parse_representation(std::string_view name) {
  if (name == "euler_deg") return Representation::kEulerDeg;
  if (name == "quaternion_wxyz") return Representation::kQuaternionWxyz;
  if (name == "matrix_rowmajor") return Representation::kMatrixRowMajor;
  if (name == "sixd") return Representation::kSixD;
  throw InvalidArgument("unknown representation '" + std::string(name) +
                        "' (euler_deg, quaternion_wxyz, matrix_rowmajor, sixd)");
}

inline const char* representation_name(Representation r) {
  switch (r) {
    case Representation::kEulerDeg: return "euler_deg";
    case Representation::kQuaternionWxyz: return "quaternion_wxyz";
    case Representation::kMatrixRowMajor: return "matrix_rowmajor";
    case Representation::kSixD: return "sixd";
  }
  return "unknown";
}

inline std::vector<std::string> representation_columns(Representation r) {
  switch (r) {
    case Representation::kEulerDeg: return {"pitch", "yaw", "roll"};
    case Representation::kQuaternionWxyz: return {"qw", "qx", "qy", "qz"};
    case Representation::kMatrixRowMajor:
      return {"m00", "m01", "m02", "m10", "m11", "m12", "m20", "m21", "m22"};
    case Representation::kSixD: return {"c1x", "c1y", "c1z", "c2x", "c2y", "c2z"};
  }
  return {};
}

/// Converts the representation's columns, in header order, to a rotation.
inline Rotation values_to_rotation(Representation rep, std::span<const double> v) {
  switch (rep) {
    case Representation::kEulerDeg:
      return euler_to_rotation(EulerAngles{v[0], v[1], v[2]});
    case Representation::kQuaternionWxyz:
      return quat_to_rotation(make_unit_quaternion(v[0], v[1], v[2], v[3]));
    case Representation::kMatrixRowMajor: {
      Matrix3<double> m;
      m << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
      const double defect = orthonormality_defect(m);
      if (!(defect <= kLoadMatrixTolerance)) {
        std::ostringstream msg;
        msg << "matrix is not a rotation (Frobenius defect " << defect << ")";
        throw InvalidArgument(msg.str());
      }
      return Rotation::project(m);
    }
    case Representation::kSixD:
      return sixd_to_rotation(SixDRep{Vector3<double>(v[0], v[1], v[2]),
                                      Vector3<double>(v[3], v[4], v[5])});
  }
  throw InvalidArgument("unknown representation");
}

inline std::vector<double> rotation_to_values(Representation rep, const Rotation& r) {
  switch (rep) {
    case Representation::kEulerDeg: {
      const EulerAngles e = rotation_to_euler(r);
      return {e.pitch, e.yaw, e.roll};
    }
    case Representation::kQuaternionWxyz: {
      const Quaternion q = rotation_to_quat(r);
      return {q.w, q.x, q.y, q.z};
    }
    case Representation::kMatrixRowMajor: {
      const Matrix3<double>& m = r.matrix();
      return {m(0, 0), m(0, 1), m(0, 2), m(1, 0), m(1, 1), m(1, 2), m(2, 0), m(2, 1), m(2, 2)};
    }
    case Representation::kSixD: {
      const SixDRep s = rotation_to_sixd(r);
      return {s.c1.x(), s.c1.y(), s.c1.z(), s.c2.x(), s.c2.y(), s.c2.z()};
    }
  }
  return {};
}

/// One pose of one file.
struct PoseRecord {
  std::string id;
  std::optional<std::string> group;
  Rotation rotation;
};

/// A ground-truth pose and, once paired, the matching prediction.
struct SampleRecord {
  std::string id;
  std::optional<std::string> group;
  Rotation ground_truth;
  std::optional<Rotation> prediction;
};

namespace io_detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return data;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

inline bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r") == std::string::npos;
}

inline double parse_number(const std::string& text, std::size_t line, const std::string& column) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "column '" + column + "' is not a number: '" + text + "'");
  }
  while (used < text.size() && (text[used] == ' ' || text[used] == '\t')) ++used;
  if (used != text.size()) {
    throw ParseError(line, "column '" + column + "' is not a number: '" + text + "'");
  }
  if (!std::isfinite(v)) throw ParseError(line, "column '" + column + "' is not finite");
  return v;
}

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class RecordCollector {
 public:
  explicit RecordCollector(Representation rep) : rep_(rep) {}

  void add(std::size_t line, std::string id, std::optional<std::string> group,
           std::span<const double> values) {
    if (id.empty()) throw ParseError(line, "empty sample id");
    if (!seen_.emplace(id, line).second) {
      throw ParseError(line, "duplicate sample id '" + id + "' (first on line " +
                                 std::to_string(seen_[id]) + ")");
    }
    try {
      records_.push_back({id, std::move(group), values_to_rotation(rep_, values)});
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line, "row '" + id + "': " + e.what());
    }
  }

  std::vector<PoseRecord> take() { return std::move(records_); }

 private:
  Representation rep_;
  std::map<std::string, std::size_t> seen_;
  std::vector<PoseRecord> records_;
};

inline std::vector<PoseRecord> parse_csv(const std::string& data, Representation rep) {
  const std::vector<std::string> columns = representation_columns(rep);
  std::string expected = "id,group";
  for (const auto& c : columns) expected += "," + c;

  std::istringstream in(data);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  RecordCollector collector(rep);
  std::vector<double> values(columns.size());
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (blank(line)) continue;
    if (!have_header) {
      if (line != expected) {
        throw ParseError(line_no, "expected header '" + expected + "', got '" + line + "'");
      }
      have_header = true;
      continue;
    }
    const std::vector<std::string> fields = split(line, ',');
    if (fields.size() != columns.size() + 2) {
      throw ParseError(line_no, "expected " + std::to_string(columns.size() + 2) +
                                    " fields, got " + std::to_string(fields.size()));
    }
    for (std::size_t k = 0; k < columns.size(); ++k) {
      values[k] = parse_number(fields[k + 2], line_no, columns[k]);
    }
    std::optional<std::string> group;
    if (!fields[1].empty()) group = fields[1];
    collector.add(line_no, fields[0], std::move(group), values);
  }
  return collector.take();
}

inline std::vector<PoseRecord> parse_jsonl(const std::string& data, Representation rep) {
  const std::vector<std::string> columns = representation_columns(rep);
  std::istringstream in(data);
  std::string line;
  std::size_t line_no = 0;
  RecordCollector collector(rep);
  std::vector<double> values(columns.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!row.is_object()) throw ParseError(line_no, "expected a JSON object");
    if (!row.contains("id") || !row["id"].is_string()) {
      throw ParseError(line_no, "missing string field 'id'");
    }
    std::optional<std::string> group;
    if (row.contains("group") && !row["group"].is_null()) {
      if (!row["group"].is_string()) throw ParseError(line_no, "field 'group' must be a string");
      group = row["group"].get<std::string>();
      if (group->empty()) group.reset();
    }
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (!row.contains(columns[k]) || !row[columns[k]].is_number()) {
        throw ParseError(line_no, "missing numeric field '" + columns[k] + "'");
      }
      values[k] = row[columns[k]].get<double>();
      if (!std::isfinite(values[k])) {
        throw ParseError(line_no, "field '" + columns[k] + "' is not finite");
      }
    }
    collector.add(line_no, row["id"].get<std::string>(), std::move(group), values);
  }
  return collector.take();
}

}  // namespace io_detail

/// Parses pose text already in memory.
inline std::vector<PoseRecord> parse_poses(const std::string& data, FileFormat format,
                                           Representation rep) {
  std::vector<PoseRecord> records = format == FileFormat::kCsv
                                        ? io_detail::parse_csv(data, rep)
                                        : io_detail::parse_jsonl(data, rep);
  if (records.empty()) throw EmptyInput("no pose rows found");
  return records;
}

inline std::vector<PoseRecord> load_poses(const std::string& path, FileFormat format,
                                          Representation rep) {
  const std::string data = io_detail::read_file(path);
  try {
    return parse_poses(data, format, rep);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.detail());
  } catch (const EmptyInput& e) {
    throw EmptyInput(path + ": " + e.what());
  }
}

/// Ground-truth records as samples without predictions.
inline std::vector<SampleRecord> load_samples(const std::string& path, FileFormat format,
                                              Representation rep) {
  std::vector<SampleRecord> out;
  for (PoseRecord& r : load_poses(path, format, rep)) {
    out.push_back({std::move(r.id), std::move(r.group), r.rotation, std::nullopt});
  }
  return out;
}

/// Attaches predictions to ground truth by id. Every prediction must name a
/// ground-truth sample; ground truth without a prediction is left unpaired.
inline std::vector<SampleRecord> pair_samples(const std::vector<PoseRecord>& ground_truth,
                                              const std::vector<PoseRecord>& predictions) {
  std::map<std::string, std::size_t> index;
  std::vector<SampleRecord> out;
  out.reserve(ground_truth.size());
  for (const PoseRecord& r : ground_truth) {
    index.emplace(r.id, out.size());
    out.push_back({r.id, r.group, r.rotation, std::nullopt});
  }
  for (const PoseRecord& p : predictions) {
    auto it = index.find(p.id);
    if (it == index.end()) {
      throw InvalidArgument("prediction '" + p.id + "' has no ground-truth sample");
    }
    out[it->second].prediction = p.rotation;
  }
  return out;
}

inline std::string format_poses(std::span<const PoseRecord> records, FileFormat format,
                                Representation rep) {
  const std::vector<std::string> columns = representation_columns(rep);
  std::ostringstream out;
  if (format == FileFormat::kCsv) {
    out << "id,group";
    for (const auto& c : columns) out << ',' << c;
    out << '\n';
    for (const PoseRecord& r : records) {
      out << r.id << ',' << r.group.value_or("");
      for (double v : rotation_to_values(rep, r.rotation)) out << ',' << io_detail::format_number(v);
      out << '\n';
    }
  } else {
    for (const PoseRecord& r : records) {
      // Written by hand to keep %.17g numbers and a fixed key order.
      out << "{\"id\":" << nlohmann::json(r.id).dump() << ",\"group\":"
          << (r.group ? nlohmann::json(*r.group).dump() : "null");
      const std::vector<double> values = rotation_to_values(rep, r.rotation);
      for (std::size_t k = 0; k < columns.size(); ++k) {
        out << ",\"" << columns[k] << "\":" << io_detail::format_number(values[k]);
      }
      out << "}\n";
    }
  }
  return out.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("error writing '" + path + "'");
}

inline void write_poses(const std::string& path, std::span<const PoseRecord> records,
                        FileFormat format, Representation rep) {
  write_text_file(path, format_poses(records, format, rep));
}

/// Lower-case hex SHA-256 of a byte string.
inline std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

inline std::string file_digest(const std::string& path) {
  return sha256_hex(io_detail::read_file(path));
}

}  // namespace headpose

#endif  // HEADPOSE_IO_HPP_
