#pragma once

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "poem/vector.hpp"

namespace poem {

enum class Algorithm { Poem, PoemUnbounded, Tpbco, Tpge, Rsnso, FixedSchedule };

inline std::string_view algorithm_name(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::Poem: return "poem";
    case Algorithm::PoemUnbounded: return "poem-unbounded";
    case Algorithm::Tpbco: return "tpbco";
    case Algorithm::Tpge: return "tpge";
    case Algorithm::Rsnso: return "rsnso";
    case Algorithm::FixedSchedule: return "fixed";
  }
  return "unknown";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept {
  for (Algorithm a : {Algorithm::Poem, Algorithm::PoemUnbounded, Algorithm::Tpbco, Algorithm::Tpge, Algorithm::Rsnso,
                      Algorithm::FixedSchedule}) {
    if (algorithm_name(a) == name) return a;
  }
  return std::nullopt;
}

/// One row per iteration t.
struct TraceRecord {
  std::size_t t = 0;
  std::size_t szo_calls = 0;  // cumulative, 2 (t + 1) for two-point methods
  double eta = 0.0;
  double mu = 0.0;
  double rbar = 0.0;           // max distance travelled, floored at r_eps
  double G = 0.0;              // sum_{k <= t} ||g_k||^2
  double G_step = 0.0;         // quantity under the square root of eta: G_t, or G'_t when unbounded
  double r = 0.0;              // ||x_t - x_0||
  double g_norm = 0.0;
  std::optional<double> f_xbar;  // objective at the output point after this step
  std::optional<double> f_xt;    // objective at x_t
};

struct Trace {
  Algorithm algorithm = Algorithm::Poem;
  std::vector<TraceRecord> rows;
};

/// Iterates x_0..x_T and estimates g_0..g_{T-1}, kept only when requested.
struct RunHistory {
  std::vector<Vector> x;
  std::vector<Vector> g;
  [[nodiscard]] bool empty() const noexcept { return g.empty(); }
};

inline constexpr std::string_view kTraceSchema = "# poem-trace v1";
inline constexpr std::string_view kTraceHeader = "t,szo_calls,f_xbar,f_xt,eta,mu,rbar,G,r";

/// Seventeen significant digits for bit-exact replay comparisons.
inline std::string format_real(double v) { return fmt::format("{:.17g}", v); }

inline std::string format_optional(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

/// True for rows written at stride `stride`, always including the last row.
inline bool on_stride(std::size_t t, std::size_t stride, std::size_t last) noexcept {
  return t == last || (stride > 0 && t % stride == 0);
}

inline void write_trace_row(std::ostream& out, const TraceRecord& r) {
  out << r.t << ',' << r.szo_calls << ',' << format_optional(r.f_xbar) << ',' << format_optional(r.f_xt) << ','
      << format_real(r.eta) << ',' << format_real(r.mu) << ',' << format_real(r.rbar) << ','
      << format_real(r.G_step) << ',' << format_real(r.r) << '\n';
}

/// Writes the versioned CSV, keeping rows with t % stride == 0 plus the final row.
inline void write_trace_csv(std::ostream& out, const Trace& trace, std::size_t stride = 1) {
  if (stride == 0) throw std::invalid_argument("stride must be >= 1");
  out << kTraceSchema << " algorithm=" << algorithm_name(trace.algorithm) << '\n' << kTraceHeader << '\n';
  if (trace.rows.empty()) return;
  const std::size_t last = trace.rows.back().t;
  for (const auto& r : trace.rows) {
    if (on_stride(r.t, stride, last)) write_trace_row(out, r);
  }
}

class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const auto comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline double csv_real(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw TraceFormatError("trace line " + std::to_string(line) + ": bad number '" + std::string(tok) + "'");
  }
  return v;
}

inline std::size_t csv_count(std::string_view tok, std::size_t line) {
  std::size_t v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw TraceFormatError("trace line " + std::to_string(line) + ": bad integer '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace detail

/// Reads a trace written by write_trace_csv. Rejects other schema versions.
inline Trace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(kTraceSchema, 0) != 0 ||
      (line.size() > kTraceSchema.size() && line[kTraceSchema.size()] != ' ')) {
    throw TraceFormatError("unsupported trace schema: '" + line + "'");
  }
  Trace trace;
  const auto alg_pos = line.find("algorithm=");
  if (alg_pos != std::string::npos) {
    if (auto a = parse_algorithm(std::string_view(line).substr(alg_pos + 10))) trace.algorithm = *a;
  }
  if (!std::getline(in, line) || line != kTraceHeader) throw TraceFormatError("unexpected trace header: '" + line + "'");
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cols = detail::split_csv(line);
    if (cols.size() != 9) throw TraceFormatError("trace line " + std::to_string(line_no) + ": expected 9 columns");
    TraceRecord r;
    r.t = detail::csv_count(cols[0], line_no);
    r.szo_calls = detail::csv_count(cols[1], line_no);
    if (!cols[2].empty()) r.f_xbar = detail::csv_real(cols[2], line_no);
    if (!cols[3].empty()) r.f_xt = detail::csv_real(cols[3], line_no);
    r.eta = detail::csv_real(cols[4], line_no);
    r.mu = detail::csv_real(cols[5], line_no);
    r.rbar = detail::csv_real(cols[6], line_no);
    r.G_step = detail::csv_real(cols[7], line_no);
    r.r = detail::csv_real(cols[8], line_no);
    trace.rows.push_back(r);
  }
  return trace;
}

}  // namespace poem
