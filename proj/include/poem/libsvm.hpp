#pragma once

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "poem/vector.hpp"

namespace poem {

/// Labelled sparse examples stored row-compressed. Feature indices are 0-based.
class SparseDataset {
 public:
  SparseDataset() : row_offsets_{0} {}

  /// `indices` must be ascending and within [0, dimension); `label` must be +1 or -1.
  void add_example(std::span<const std::uint32_t> indices, std::span<const double> values, int label) {
    if (indices.size() != values.size()) throw std::invalid_argument("index/value length mismatch");
    if (label != 1 && label != -1) throw std::invalid_argument("labels must be +1 or -1");
    double sq = 0.0;
    for (std::size_t k = 0; k < indices.size(); ++k) {
      if (k > 0 && indices[k] <= indices[k - 1]) throw std::invalid_argument("feature indices must ascend");
      indices_.push_back(indices[k]);
      values_.push_back(values[k]);
      sq += values[k] * values[k];
      max_index_plus_one_ = std::max<std::size_t>(max_index_plus_one_, indices[k] + 1);
    }
    row_offsets_.push_back(indices_.size());
    labels_.push_back(label);
    max_row_norm_ = std::max(max_row_norm_, std::sqrt(sq));
  }

  [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
  [[nodiscard]] bool empty() const noexcept { return labels_.empty(); }

  /// Number of features. Defaults to the largest index seen.
  [[nodiscard]] std::size_t dimension() const noexcept {
    return dimension_override_ ? *dimension_override_ : max_index_plus_one_;
  }

  void set_dimension(std::size_t d) {
    if (d < max_index_plus_one_) {
      throw std::invalid_argument("dimension " + std::to_string(d) + " is smaller than the largest feature index " +
                                  std::to_string(max_index_plus_one_));
    }
    dimension_override_ = d;
  }

  [[nodiscard]] int label(std::size_t i) const noexcept { return labels_[i]; }
  [[nodiscard]] std::span<const std::uint32_t> row_indices(std::size_t i) const noexcept {
    return {indices_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }
  [[nodiscard]] std::span<const double> row_values(std::size_t i) const noexcept {
    return {values_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }
  [[nodiscard]] std::size_t nonzeros() const noexcept { return values_.size(); }

  /// a_i^T x
  [[nodiscard]] double row_dot(std::size_t i, const Vector& x) const noexcept {
    double s = 0.0;
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) s += values_[k] * x[indices_[k]];
    return s;
  }

  [[nodiscard]] double max_row_norm() const noexcept { return max_row_norm_; }

 private:
  std::vector<std::size_t> row_offsets_;
  std::vector<std::uint32_t> indices_;
  std::vector<double> values_;
  std::vector<int> labels_;
  std::size_t max_index_plus_one_ = 0;
  std::optional<std::size_t> dimension_override_;
  double max_row_norm_ = 0.0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct LibsvmOptions {
  std::optional<std::size_t> dimension;
  /// Let load_libsvm fill `dimension` from the benchmark table.
  bool use_known_dimension = true;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool parse_double(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return false;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size() && std::isfinite(out);
}

inline bool parse_index(std::string_view tok, std::uint64_t& out) {
  if (tok.empty()) return false;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

enum class LabelScheme { Unknown, PlusMinusOne, OneTwo, ZeroOne };

}  // namespace detail

/// Reads `<label> <index>:<value> ...` lines. Indices are 1-based and strictly
/// ascending. Accepted label sets are {+1,-1}, {1,2} (1 -> +1, 2 -> -1) and
/// {0,1} (1 -> +1, 0 -> -1); mixing schemes is an error. Blank lines and lines
/// starting with '#' are skipped.
inline SparseDataset parse_libsvm(std::istream& in, const LibsvmOptions& options = {}) {
  using detail::LabelScheme;
  struct RawRow {
    std::vector<std::uint32_t> idx;
    std::vector<double> val;
    int raw_label;
  };
  std::vector<RawRow> rows;
  LabelScheme scheme = LabelScheme::Unknown;
  std::string line;
  std::size_t line_no = 0;

  auto set_scheme = [&](LabelScheme s) {
    if (scheme != LabelScheme::Unknown && scheme != s) throw ParseError(line_no, "inconsistent label set");
    scheme = s;
  };

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = detail::trim(line);
    if (body.empty() || body.front() == '#') continue;

    RawRow row;
    std::size_t pos = 0;
    bool first = true;
    while (pos < body.size()) {
      const auto end = body.find_first_of(" \t", pos);
      const std::string_view tok = body.substr(pos, end == std::string_view::npos ? body.size() - pos : end - pos);
      pos = end == std::string_view::npos ? body.size() : body.find_first_not_of(" \t", end);
      if (pos == std::string_view::npos) pos = body.size();
      if (tok.empty()) continue;

      if (first) {
        first = false;
        double label = 0.0;
        if (!detail::parse_double(tok, label)) throw ParseError(line_no, "non-numeric label '" + std::string(tok) + "'");
        if (label == 1.0) {
          row.raw_label = 1;
        } else if (label == -1.0) {
          set_scheme(LabelScheme::PlusMinusOne);
          row.raw_label = -1;
        } else if (label == 2.0) {
          set_scheme(LabelScheme::OneTwo);
          row.raw_label = 2;
        } else if (label == 0.0) {
          set_scheme(LabelScheme::ZeroOne);
          row.raw_label = 0;
        } else {
          throw ParseError(line_no, "unsupported label '" + std::string(tok) + "'");
        }
        continue;
      }

      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) throw ParseError(line_no, "expected index:value, got '" + std::string(tok) + "'");
      std::uint64_t index = 0;
      double value = 0.0;
      if (!detail::parse_index(tok.substr(0, colon), index)) {
        throw ParseError(line_no, "non-numeric feature index '" + std::string(tok.substr(0, colon)) + "'");
      }
      if (!detail::parse_double(tok.substr(colon + 1), value)) {
        throw ParseError(line_no, "non-numeric feature value '" + std::string(tok.substr(colon + 1)) + "'");
      }
      if (index == 0) throw ParseError(line_no, "feature index 0 (indices are 1-based)");
      if (index > 0xffffffffULL) throw ParseError(line_no, "feature index too large");
      const auto zero_based = static_cast<std::uint32_t>(index - 1);
      if (!row.idx.empty() && zero_based <= row.idx.back()) throw ParseError(line_no, "feature indices not ascending");
      row.idx.push_back(zero_based);
      row.val.push_back(value);
    }
    rows.push_back(std::move(row));
  }
  if (in.bad()) throw std::runtime_error("read error while parsing LIBSVM data");
  if (rows.empty()) throw ParseError(line_no, "no examples found");

  SparseDataset ds;
  for (const auto& r : rows) {
    int label = r.raw_label;
    switch (scheme) {
      case LabelScheme::OneTwo: label = (r.raw_label == 1) ? 1 : -1; break;
      case LabelScheme::ZeroOne: label = (r.raw_label == 1) ? 1 : -1; break;
      default: break;  // {+1,-1} or all ones
    }
    ds.add_example(r.idx, r.val, label);
  }
  if (options.dimension) ds.set_dimension(*options.dimension);
  return ds;
}

struct KnownDataset {
  std::string_view name;
  std::size_t n;
  std::size_t d;
};

/// Sizes of the benchmark datasets; pins d when trailing features are all zero.
inline constexpr KnownDataset kKnownDatasets[] = {
    {"mushrooms", 8124, 112},
    {"a9a", 32561, 123},
    {"w8a", 49749, 300},
};

inline std::optional<KnownDataset> known_dataset(std::string_view name) {
  for (const auto& k : kKnownDatasets) {
    if (k.name == name) return k;
  }
  return std::nullopt;
}

/// File stem with a trailing ".gz" removed ("a9a.gz" -> "a9a").
inline std::string dataset_name(const std::filesystem::path& path) {
  std::filesystem::path p = path.filename();
  if (p.extension() == ".gz") p = p.stem();
  return p.string();
}

namespace detail {

inline std::string read_gzip(const std::filesystem::path& path) {
  gzFile f = gzopen(path.string().c_str(), "rb");
  if (f == nullptr) throw std::runtime_error("cannot open " + path.string());
  std::string out;
  char buf[1 << 16];
  for (;;) {
    const int n = gzread(f, buf, sizeof buf);
    if (n < 0) {
      gzclose(f);
      throw std::runtime_error("gzip read error in " + path.string());
    }
    if (n == 0) break;
    out.append(buf, static_cast<std::size_t>(n));
  }
  gzclose(f);
  return out;
}

}  // namespace detail

/// Loads a LIBSVM file (gzip if the name ends in .gz). For the known benchmark
/// datasets the dimension is taken from the table unless overridden.
inline SparseDataset load_libsvm(const std::filesystem::path& path, LibsvmOptions options = {}) {
  if (!options.dimension && options.use_known_dimension) {
    if (auto known = known_dataset(dataset_name(path))) options.dimension = known->d;
  }
  if (path.extension() == ".gz") {
    std::istringstream in(detail::read_gzip(path));
    return parse_libsvm(in, options);
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_libsvm(in, options);
}

}  // namespace poem
