/*
 * Copyright 2026 The ldpembed Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "ldpembed/features.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace ldpembed {
namespace {

constexpr char kMagic[4] = {'P', 'G', 'E', '1'};
constexpr std::size_t kHeaderBytes = 4 + 8 + 8;

static_assert(std::endian::native == std::endian::little,
              "binary matrix I/O assumes a little-endian host");

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool ParseDouble(std::string_view tok, double& out) {
  tok = Trim(tok);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

template <typename Fn>
void ForEachLine(const std::string& text, Fn&& fn) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line, line_no);
  }
}

std::uint64_t ReadU64(const char* p) {
  std::uint64_t v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

}  // namespace

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path, 0, "cannot open file for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw ParseError(path, 0, "write failed");
}

FeatureMatrix ParseCsvMatrix(const std::string& text, const std::string& source) {
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  ForEachLine(text, [&](std::string_view line, std::size_t line_no) {
    if (Trim(line).empty() || Trim(line).starts_with("#")) return;
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string_view tok = line.substr(start, comma == std::string_view::npos
                                                    ? std::string_view::npos
                                                    : comma - start);
      double v = 0;
      if (!ParseDouble(tok, v)) {
        throw ParseError(source, line_no, "bad number '" + std::string(Trim(tok)) + "'");
      }
      values.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw ParseError(source, line_no,
                       "ragged row: expected " + std::to_string(cols) +
                           " values, got " + std::to_string(count));
    }
    ++rows;
  });
  if (rows == 0) throw ParseError(source, 0, "empty feature file");
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(
      values.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

std::string FormatCsvMatrix(const FeatureMatrix& x) {
  std::string out;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (j) out += ',';
      out += FormatDouble(x(i, j));
    }
    out += '\n';
  }
  return out;
}

FeatureMatrix ParseBinaryMatrix(const std::string& bytes, const std::string& source) {
  if (bytes.empty()) throw ParseError(source, 0, "empty feature file");
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw ParseError(source, 0, "bad magic: expected PGE1 binary matrix");
  }
  const std::uint64_t n = ReadU64(bytes.data() + 4);
  const std::uint64_t d = ReadU64(bytes.data() + 12);
  if (d != 0 && n > (bytes.size() - kHeaderBytes) / 8 / d) {
    throw ParseError(source, 0, "truncated matrix payload");
  }
  if (bytes.size() != kHeaderBytes + n * d * 8) {
    throw ParseError(source, 0,
                     "payload size mismatch for " + std::to_string(n) + "x" +
                         std::to_string(d) + " matrix");
  }
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(
      static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  if (n != 0 && d != 0) std::memcpy(rm.data(), bytes.data() + kHeaderBytes, n * d * 8);
  return rm;
}

std::string FormatBinaryMatrix(const FeatureMatrix& x) {
  const std::uint64_t n = static_cast<std::uint64_t>(x.rows());
  const std::uint64_t d = static_cast<std::uint64_t>(x.cols());
  std::string out(kHeaderBytes + n * d * 8, '\0');
  std::memcpy(out.data(), kMagic, 4);
  std::memcpy(out.data() + 4, &n, 8);
  std::memcpy(out.data() + 12, &d, 8);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = x;
  if (n != 0 && d != 0) std::memcpy(out.data() + kHeaderBytes, rm.data(), n * d * 8);
  return out;
}

FeatureMatrix LoadFeatures(const std::string& path) {
  std::string bytes = ReadFile(path);
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0) {
    return ParseBinaryMatrix(bytes, path);
  }
  if (path.ends_with(".pge") || path.ends_with(".bin")) {
    return ParseBinaryMatrix(bytes, path);
  }
  return ParseCsvMatrix(bytes, path);
}

void SaveFeaturesCsv(const FeatureMatrix& x, const std::string& path) {
  WriteFile(path, FormatCsvMatrix(x));
}

void SaveFeaturesBinary(const FeatureMatrix& x, const std::string& path) {
  WriteFile(path, FormatBinaryMatrix(x));
}

FeatureBounds LoadBounds(const std::string& path) {
  FeatureMatrix m = ParseCsvMatrix(ReadFile(path), path);
  if (m.rows() != 2) throw ParseError(path, 0, "bounds file must have exactly two rows");
  FeatureBounds b{m.row(0).transpose(), m.row(1).transpose()};
  for (Eigen::Index j = 0; j < b.lo.size(); ++j) {
    if (b.lo[j] > b.hi[j]) {
      throw ParseError(path, 0, "lo > hi in column " + std::to_string(j));
    }
  }
  return b;
}

void SaveBounds(const FeatureBounds& b, const std::string& path) {
  FeatureMatrix m(2, b.lo.size());
  m.row(0) = b.lo.transpose();
  m.row(1) = b.hi.transpose();
  SaveFeaturesCsv(m, path);
}

std::vector<int> LoadLabels(const std::string& path) {
  std::string text = ReadFile(path);
  std::vector<int> labels;
  ForEachLine(text, [&](std::string_view line, std::size_t line_no) {
    line = Trim(line);
    if (line.empty() || line.starts_with("#")) return;
    int v = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size() || v < -1) {
      throw ParseError(path, line_no, "expected an integer class label >= -1");
    }
    labels.push_back(v);
  });
  if (labels.empty()) throw ParseError(path, 0, "empty labels file");
  return labels;
}

void SaveLabels(const std::vector<int>& labels, const std::string& path) {
  std::string out;
  for (int l : labels) {
    out += std::to_string(l);
    out += '\n';
  }
  WriteFile(path, out);
}

std::vector<std::int64_t> RestrictToTopClasses(std::vector<int>& labels, int top) {
  std::map<int, std::int64_t> freq;
  for (int l : labels) {
    if (l >= 0) ++freq[l];
  }
  std::vector<std::pair<int, std::int64_t>> order(freq.begin(), freq.end());
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::map<int, int> remap;
  for (int i = 0; i < top && i < static_cast<int>(order.size()); ++i) {
    remap[order[i].first] = i;
  }
  std::vector<std::int64_t> kept;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    auto it = remap.find(labels[v]);
    if (it == remap.end()) {
      labels[v] = -1;
    } else {
      labels[v] = it->second;
      kept.push_back(static_cast<std::int64_t>(v));
    }
  }
  return kept;
}

}  // namespace ldpembed
