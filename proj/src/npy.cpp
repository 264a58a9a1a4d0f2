// Copyright 2026 The neurotask Authors.
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

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include "neurotask/error.hpp"
#include "neurotask/format.hpp"
#include "neurotask/ingest.hpp"

namespace neurotask {

static_assert(std::endian::native == std::endian::little, "NPY I/O assumes a little-endian host");

namespace {

constexpr std::string_view kMagic = "\x93NUMPY";

// Pulls the value text that follows `'key':` in the header dict.
std::string_view dict_value(std::string_view header, std::string_view key) {
  const std::string quoted_single = "'" + std::string(key) + "'";
  const std::string quoted_double = "\"" + std::string(key) + "\"";
  std::size_t pos = header.find(quoted_single);
  std::size_t key_len = quoted_single.size();
  if (pos == std::string_view::npos) {
    pos = header.find(quoted_double);
    key_len = quoted_double.size();
  }
  if (pos == std::string_view::npos) {
    fail(ErrorKind::kCorruptHeader, "NPY header lacks '" + std::string(key) + "'");
  }
  std::size_t colon = header.find(':', pos + key_len);
  if (colon == std::string_view::npos) fail(ErrorKind::kCorruptHeader, "NPY header is malformed");
  std::size_t start = header.find_first_not_of(' ', colon + 1);
  if (start == std::string_view::npos) fail(ErrorKind::kCorruptHeader, "NPY header is malformed");
  std::size_t end;
  if (header[start] == '(') {
    end = header.find(')', start);
    if (end == std::string_view::npos) fail(ErrorKind::kCorruptHeader, "unterminated shape");
    ++end;
  } else if (header[start] == '\'' || header[start] == '"') {
    end = header.find(header[start], start + 1);
    if (end == std::string_view::npos) fail(ErrorKind::kCorruptHeader, "unterminated string");
    ++end;
  } else {
    end = header.find_first_of(",}", start);
    if (end == std::string_view::npos) fail(ErrorKind::kCorruptHeader, "NPY header is malformed");
  }
  std::string_view v = header.substr(start, end - start);
  while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
  return v;
}

std::vector<std::size_t> parse_shape(std::string_view tuple) {
  if (tuple.size() < 2 || tuple.front() != '(' || tuple.back() != ')') {
    fail(ErrorKind::kCorruptHeader, "bad shape '" + std::string(tuple) + "'");
  }
  tuple = tuple.substr(1, tuple.size() - 2);
  std::vector<std::size_t> dims;
  std::size_t i = 0;
  while (i < tuple.size()) {
    while (i < tuple.size() && (tuple[i] == ' ' || tuple[i] == ',')) ++i;
    if (i >= tuple.size()) break;
    std::size_t j = i;
    std::size_t value = 0;
    while (j < tuple.size() && tuple[j] >= '0' && tuple[j] <= '9') {
      value = value * 10 + static_cast<std::size_t>(tuple[j] - '0');
      ++j;
    }
    if (j == i) fail(ErrorKind::kCorruptHeader, "bad shape entry in '" + std::string(tuple) + "'");
    if (j < tuple.size() && tuple[j] == 'L') ++j;
    dims.push_back(value);
    i = j;
  }
  return dims;
}

}  // namespace

std::string encode_npy(const Matrix& m) {
  std::string dict = "{'descr': '<f8', 'fortran_order': False, 'shape': (" +
                     std::to_string(m.rows()) + ", " + std::to_string(m.cols()) + "), }";
  // magic(6) + version(2) + length(2) + dict + padding + '\n' is a multiple of 64.
  std::size_t unpadded = 10 + dict.size() + 1;
  std::size_t padding = (64 - unpadded % 64) % 64;
  dict.append(padding, ' ');
  dict.push_back('\n');
  std::string out;
  out.reserve(10 + dict.size() + static_cast<std::size_t>(m.size()) * sizeof(double));
  out.append(kMagic);
  out.push_back('\x01');
  out.push_back('\x00');
  const auto hlen = static_cast<std::uint16_t>(dict.size());
  out.push_back(static_cast<char>(hlen & 0xff));
  out.push_back(static_cast<char>(hlen >> 8));
  out.append(dict);
  const auto* data = reinterpret_cast<const char*>(m.data());
  out.append(data, static_cast<std::size_t>(m.size()) * sizeof(double));
  return out;
}

Matrix decode_npy(std::string_view bytes) {
  if (bytes.size() < 10 || bytes.substr(0, 6) != kMagic) {
    fail(ErrorKind::kCorruptHeader, "missing NPY magic");
  }
  const auto major = static_cast<unsigned char>(bytes[6]);
  std::size_t header_len = 0;
  std::size_t prefix = 0;
  if (major == 1) {
    header_len = static_cast<unsigned char>(bytes[8]) |
                 (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
    prefix = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) fail(ErrorKind::kCorruptHeader, "truncated NPY header");
    for (int i = 0; i < 4; ++i) {
      header_len |= static_cast<std::size_t>(static_cast<unsigned char>(bytes[8 + i])) << (8 * i);
    }
    prefix = 12;
  } else {
    fail(ErrorKind::kCorruptHeader, "unsupported NPY version " + std::to_string(major));
  }
  if (bytes.size() < prefix + header_len) fail(ErrorKind::kCorruptHeader, "truncated NPY header");
  const std::string_view header = bytes.substr(prefix, header_len);

  std::string_view descr = dict_value(header, "descr");
  if (descr.size() >= 2) descr = descr.substr(1, descr.size() - 2);
  if (descr != "<f8" && descr != "=f8" && descr != "f8") {
    fail(ErrorKind::kUnsupportedDtype, "dtype '" + std::string(descr) + "' is not <f8");
  }
  const std::string_view fortran = dict_value(header, "fortran_order");
  if (fortran != "False" && fortran != "True") {
    fail(ErrorKind::kCorruptHeader, "bad fortran_order '" + std::string(fortran) + "'");
  }
  const auto shape = parse_shape(dict_value(header, "shape"));
  if (shape.size() != 2) {
    fail(ErrorKind::kUnsupportedRank, "expected a 2-D array, got rank " + std::to_string(shape.size()));
  }
  const std::size_t rows = shape[0];
  const std::size_t cols = shape[1];
  const std::size_t count = rows * cols;
  const std::string_view payload = bytes.substr(prefix + header_len);
  if (payload.size() < count * sizeof(double)) {
    fail(ErrorKind::kCorruptHeader, "NPY payload holds " + std::to_string(payload.size()) +
                                        " bytes, shape needs " +
                                        std::to_string(count * sizeof(double)));
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  if (fortran == "False") {
    std::memcpy(m.data(), payload.data(), count * sizeof(double));
  } else {
    Eigen::MatrixXd col_major(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    std::memcpy(col_major.data(), payload.data(), count * sizeof(double));
    m = col_major;
  }
  return m;
}

Matrix decode_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t pos = 0;
  bool header_seen = false;
  std::size_t width = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    if (!header_seen) {
      header_seen = true;
      width = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
      continue;
    }
    std::vector<double> row;
    row.reserve(width);
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string_view tok = line.substr(start, comma == std::string_view::npos ? line.size() - start
                                                                                 : comma - start);
      try {
        row.push_back(parse_double(tok));
      } catch (const Error& e) {
        fail(ErrorKind::kParseError, "CSV line " + std::to_string(line_no) + ": " + e.what());
      }
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (row.size() != width) {
      fail(ErrorKind::kParseError, "CSV line " + std::to_string(line_no) + " has " +
                                       std::to_string(row.size()) + " fields, header has " +
                                       std::to_string(width));
    }
    rows.push_back(std::move(row));
  }
  if (!header_seen) fail(ErrorKind::kParseError, "CSV has no header line");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

std::string encode_csv(const Matrix& m) {
  std::string out;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    if (c) out += ',';
    out += "c" + std::to_string(c);
  }
  out += '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

Matrix read_array(const std::filesystem::path& path) {
  const std::string bytes = read_text_file(path);
  if (bytes.size() >= kMagic.size() && std::string_view(bytes).substr(0, kMagic.size()) == kMagic) {
    return decode_npy(bytes);
  }
  return decode_csv(bytes);
}

void write_array(const Matrix& m, const std::filesystem::path& path, ArrayFormat format) {
  if (m.size() == 0) fail(ErrorKind::kEmptyMatrix, "refusing to write an empty matrix");
  require_finite(m, "matrix for '" + path.string() + "'");
  write_text_file(path, format == ArrayFormat::kNpy ? encode_npy(m) : encode_csv(m));
}

std::vector<std::string> read_sample_ids(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  std::vector<std::string> ids;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ids.push_back(std::move(line));
  }
  return ids;
}

void write_sample_ids(const std::vector<std::string>& ids, const std::filesystem::path& path) {
  std::string out;
  for (const auto& id : ids) out += id + "\n";
  write_text_file(path, out);
}

}  // namespace neurotask
