#pragma once

// File formats.
//
// Feature matrix (".fmat"):
//   bytes 0-5   ASCII "FMAT1\n"
//   bytes 6-9   u32 little-endian row count
//   bytes 10-13 u32 little-endian column count
//   then rows*cols IEEE-754 binary32 little-endian values, row-major.
// Values are held as double in memory and narrowed to binary32 on save, so
// a matrix loaded from disk saves back to the identical bytes.
//
// Labels: CSV with header "index,label", 0-based class index per row.
// Class names: one name per line, line i is class i.

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "frolic/error.hpp"
#include "frolic/types.hpp"

namespace frolic::io {

inline constexpr std::array<char, 6> kMagic = {'F', 'M', 'A', 'T', '1', '\n'};
inline constexpr std::size_t kHeaderBytes = 14;

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFFu));
}

inline std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace detail

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), ptr};
}

inline std::string encode_feature_matrix(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw Error(ErrorCode::kEmptyInput, "refusing to save an empty matrix");
  }
  std::string out(kMagic.begin(), kMagic.end());
  detail::put_u32(out, static_cast<std::uint32_t>(m.rows()));
  detail::put_u32(out, static_cast<std::uint32_t>(m.cols()));
  out.reserve(kHeaderBytes + static_cast<std::size_t>(m.size()) * 4);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      detail::put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(m(i, j))));
    }
  }
  return out;
}

inline Matrix decode_feature_matrix(std::string_view bytes) {
  if (bytes.size() < kMagic.size() ||
      !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw Error(ErrorCode::kMagicMismatch, "missing FMAT1 header");
  }
  if (bytes.size() < kHeaderBytes) {
    throw Error(ErrorCode::kTruncatedFile, "header shorter than 14 bytes");
  }
  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t rows = detail::get_u32(raw + 6);
  const std::uint32_t cols = detail::get_u32(raw + 10);
  if (rows == 0 || cols == 0) {
    throw Error(ErrorCode::kInvalidHeader,
                "degenerate shape " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  const std::uint64_t expected = kHeaderBytes + std::uint64_t{rows} * cols * 4;
  if (bytes.size() != expected) {
    throw Error(ErrorCode::kTruncatedFile, "expected " + std::to_string(expected) +
                                               " bytes, found " + std::to_string(bytes.size()));
  }
  Matrix m(rows, cols);
  const unsigned char* p = raw + kHeaderBytes;
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j, p += 4) {
      const float v = std::bit_cast<float>(detail::get_u32(p));
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFiniteEntry,
                    "row " + std::to_string(i) + ", col " + std::to_string(j));
      }
      m(i, j) = static_cast<double>(v);
    }
  }
  return m;
}

inline Matrix load_feature_matrix(const std::filesystem::path& path) {
  try {
    return decode_feature_matrix(detail::read_file(path));
  } catch (Error& e) {
    if (e.code() == ErrorCode::kIoFailure) throw;
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

inline void save_feature_matrix(const Matrix& m, const std::filesystem::path& path) {
  detail::write_file(path, encode_feature_matrix(m));
}

inline Matrix l2_normalize_rows(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (norm == 0.0) throw Error(ErrorCode::kZeroRow, "row " + std::to_string(i));
    out.row(i) = m.row(i) / norm;
  }
  return out;
}

inline EmbeddingSet load_embeddings(const std::filesystem::path& path) {
  return EmbeddingSet{load_feature_matrix(path), false};
}

inline EmbeddingSet normalized(const EmbeddingSet& e) { return {l2_normalize_rows(e.data), true}; }

inline PrototypeSet normalized(const PrototypeSet& p) {
  return {l2_normalize_rows(p.data), p.class_names, true};
}

// --- labels ---------------------------------------------------------------

inline std::string encode_labels(const LabelSet& labels) {
  std::string out = "index,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out += std::to_string(i) + "," + std::to_string(labels.labels[i]) + "\n";
  }
  return out;
}

/// Parses an "index,<column>" CSV whose second column holds class indices.
/// Rows may come in any order but must cover 0..N-1 exactly once.
inline std::vector<Index> decode_index_csv(std::string_view text, std::string_view column) {
  const auto lines = detail::split_lines(text);
  if (lines.empty() || detail::trim(lines[0]) != "index," + std::string(column)) {
    throw Error(ErrorCode::kInvalidHeader,
                "expected CSV header \"index," + std::string(column) + "\"");
  }
  std::vector<std::pair<std::size_t, Index>> rows;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const auto line = detail::trim(lines[n]);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    std::size_t idx = 0;
    long long value = 0;
    if (comma == std::string_view::npos || !detail::parse_number(line.substr(0, comma), idx) ||
        !detail::parse_number(line.substr(comma + 1), value) || value < 0) {
      throw Error(ErrorCode::kInvalidLabel, "malformed line " + std::to_string(n + 1));
    }
    rows.emplace_back(idx, static_cast<Index>(value));
  }
  std::vector<Index> out(rows.size(), -1);
  for (const auto& [idx, value] : rows) {
    if (idx >= out.size() || out[idx] != -1) {
      throw Error(ErrorCode::kInvalidLabel, "index " + std::to_string(idx) + " out of order");
    }
    out[idx] = value;
  }
  return out;
}

inline LabelSet load_labels(const std::filesystem::path& path) {
  return LabelSet{decode_index_csv(detail::read_file(path), "label")};
}

inline void save_labels(const LabelSet& labels, const std::filesystem::path& path) {
  detail::write_file(path, encode_labels(labels));
}

inline void validate_labels(const LabelSet& labels, Index classes) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels.labels[i] < 0 || labels.labels[i] >= classes) {
      throw Error(ErrorCode::kInvalidLabel, "label " + std::to_string(labels.labels[i]) +
                                                " at index " + std::to_string(i) +
                                                " is outside [0, " + std::to_string(classes) + ")");
    }
  }
}

// --- class names ------------------------------------------------------------

inline std::vector<std::string> load_class_names(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  std::vector<std::string> names;
  for (auto line : detail::split_lines(text)) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    names.emplace_back(line);
  }
  std::vector<std::string> seen = names;
  std::sort(seen.begin(), seen.end());
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i].empty()) throw Error(ErrorCode::kInvalidArgument, "empty class name");
    if (i > 0 && seen[i] == seen[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate class name " + seen[i]);
    }
  }
  return names;
}

inline void save_class_names(const std::vector<std::string>& names,
                             const std::filesystem::path& path) {
  std::string out;
  for (const auto& n : names) out += n + "\n";
  detail::write_file(path, out);
}

inline std::vector<std::string> default_class_names(Index k) {
  std::vector<std::string> names;
  for (Index j = 0; j < k; ++j) names.push_back("class_" + std::to_string(j));
  return names;
}

// --- small text outputs ------------------------------------------------------

inline std::string encode_vector_csv(const Vector& v, std::string_view key,
                                     std::string_view value) {
  std::string out = std::string(key) + "," + std::string(value) + "\n";
  for (Index i = 0; i < v.size(); ++i) {
    out += std::to_string(i) + "," + format_double(v(i)) + "\n";
  }
  return out;
}

inline Vector decode_vector_csv(std::string_view text, std::string_view key,
                                std::string_view value) {
  const auto lines = detail::split_lines(text);
  const std::string header = std::string(key) + "," + std::string(value);
  if (lines.empty() || detail::trim(lines[0]) != header) {
    throw Error(ErrorCode::kInvalidHeader, "expected CSV header \"" + header + "\"");
  }
  std::vector<double> values;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const auto line = detail::trim(lines[n]);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    std::size_t idx = 0;
    double v = 0;
    if (comma == std::string_view::npos || !detail::parse_number(line.substr(0, comma), idx) ||
        idx != values.size() || !detail::parse_number(line.substr(comma + 1), v)) {
      throw Error(ErrorCode::kInvalidArgument, "malformed line " + std::to_string(n + 1));
    }
    values.push_back(v);
  }
  return Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
}

inline std::string encode_predictions(const std::vector<Index>& predictions) {
  std::string out = "index,prediction\n";
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    out += std::to_string(i) + "," + std::to_string(predictions[i]) + "\n";
  }
  return out;
}

inline std::vector<Index> load_predictions(const std::filesystem::path& path) {
  return decode_index_csv(detail::read_file(path), "prediction");
}

inline std::string encode_trajectory(const std::vector<double>& deltas) {
  std::string out = "iteration,l1_delta\n";
  for (std::size_t t = 0; t < deltas.size(); ++t) {
    out += std::to_string(t + 1) + "," + format_double(deltas[t]) + "\n";
  }
  return out;
}

/// "key = value" lines; '#' starts a comment. Later keys override earlier ones.
inline std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t n = 0;
  for (auto line : detail::split_lines(text)) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidArgument, "line " + std::to_string(n) + ": expected key = value");
    }
    out[std::string(detail::trim(line.substr(0, eq)))] =
        std::string(detail::trim(line.substr(eq + 1)));
  }
  return out;
}

inline std::map<std::string, std::string> load_key_values(const std::filesystem::path& path) {
  return parse_key_values(detail::read_file(path));
}

inline std::string encode_key_values(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

}  // namespace frolic::io
