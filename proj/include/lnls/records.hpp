#pragma once

#include <charconv>
#include <cmath>
#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "lnls/error.hpp"

namespace lnls {

/// Shortest decimal string that parses back to the same double; "inf", "-inf", "nan" otherwise.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw NumericalError("format_double: to_chars failed");
  return std::string(buf, end);
}

/// One row of a sweep. Fields that do not apply to an experiment stay empty.
struct ExperimentRecord {
  std::string experiment;
  std::optional<double> h, N, q, r, epsilon, t, value, ratio;
  std::map<std::string, std::string> metadata;

  static constexpr const char* kCsvHeader = "experiment,h,N,q,r,epsilon,t,value,ratio";
};

namespace detail {

inline std::string optional_field(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

inline nlohmann::json optional_json(const std::optional<double>& x) {
  if (!x) return nullptr;
  if (std::isfinite(*x)) return *x;
  return format_double(*x);
}

}  // namespace detail

inline void write_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
  os << ExperimentRecord::kCsvHeader << '\n';
  for (const auto& rec : records) {
    os << rec.experiment;
    for (const auto* f : {&rec.h, &rec.N, &rec.q, &rec.r, &rec.epsilon, &rec.t, &rec.value, &rec.ratio})
      os << ',' << detail::optional_field(*f);
    os << '\n';
  }
}

inline nlohmann::json to_json(const ExperimentRecord& rec) {
  nlohmann::json j;
  j["experiment"] = rec.experiment;
  j["h"] = detail::optional_json(rec.h);
  j["N"] = detail::optional_json(rec.N);
  j["q"] = detail::optional_json(rec.q);
  j["r"] = detail::optional_json(rec.r);
  j["epsilon"] = detail::optional_json(rec.epsilon);
  j["t"] = detail::optional_json(rec.t);
  j["value"] = detail::optional_json(rec.value);
  j["ratio"] = detail::optional_json(rec.ratio);
  j["metadata"] = rec.metadata;
  return j;
}

/// One JSON object per line. Non-finite numbers are written as strings.
inline void write_json_lines(std::ostream& os, const std::vector<ExperimentRecord>& records) {
  for (const auto& rec : records) os << to_json(rec).dump() << '\n';
}

/// Spread across h of the per-h maximum ratio. Uniform when max / min < band.
struct UniformityVerdict {
  std::map<double, double> max_ratio_by_h;
  double spread = 0.0;
  double band = 3.0;
  bool pass() const { return max_ratio_by_h.size() >= 2 && spread < band; }
};

inline UniformityVerdict uniformity_verdict(const std::vector<ExperimentRecord>& records, double band = 3.0) {
  UniformityVerdict v;
  v.band = band;
  for (const auto& rec : records) {
    if (!rec.h || !rec.ratio) continue;
    auto [it, inserted] = v.max_ratio_by_h.try_emplace(*rec.h, *rec.ratio);
    if (!inserted) it->second = std::max(it->second, *rec.ratio);
  }
  if (v.max_ratio_by_h.empty()) return v;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& [h, m] : v.max_ratio_by_h) {
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  v.spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  return v;
}

}  // namespace lnls
