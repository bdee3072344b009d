#pragma once

// File formats:
//   events   CSV  individual_id,timestamp_s
//   fits     CSV  individual_id,n,rho,mu,log_mu,r2,ac1,h1
//   anomaly  CSV  individual_id,d2,fit_ok,label
//   or-curve CSV  log_t,log_or
//   model    JSON {"system", "mean": [Erho, Elogmu], "cov": [[..],[..]], "min_events"}
//
// Timestamps are written in shortest round-trip form, so integer seconds
// stay integers. Every other real is written with 6 significant digits.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "sfp/errors.hpp"
#include "sfp/fitting.hpp"
#include "sfp/population.hpp"
#include "sfp/series.hpp"
#include "sfp/temporal.hpp"

namespace sfp::io {

inline constexpr std::string_view kEventsHeader = "individual_id,timestamp_s";
inline constexpr std::string_view kFitsHeader = "individual_id,n,rho,mu,log_mu,r2,ac1,h1";
inline constexpr std::string_view kAnomaliesHeader = "individual_id,d2,fit_ok,label";
inline constexpr std::string_view kOrCurveHeader = "log_t,log_or";
inline constexpr std::string_view kAcfHeader = "individual_id,lag,ac,band";

// -- formatting ------------------------------------------------------------

inline std::string format_g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string format_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// -- parsing helpers -------------------------------------------------------

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_real(std::string_view s, std::size_t line, const char* field) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw ParseError(line, std::string("invalid number in field '") + field + "'");
  return v;
}

inline bool parse_bool(std::string_view s, std::size_t line, const char* field) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ParseError(line, std::string("invalid boolean in field '") + field + "'");
}

inline void check_id(const std::string& id) {
  if (id.find_first_of(",\n\r") != std::string::npos)
    throw DataError("individual id '" + id + "' contains a separator");
}

/// Reads lines, skipping blank ones; returns false on an empty stream.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++number_;
      if (!trim(line).empty()) return true;
    }
    return false;
  }
  std::size_t number() const noexcept { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

inline void expect_header(std::string_view got, std::string_view want, std::size_t line) {
  if (trim(got) != want)
    throw ParseError(line, "expected header '" + std::string(want) + "'");
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  return f;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  return f;
}

inline void finish(std::ostream& out) {
  out.flush();
  if (!out) throw IoError("write failed");
}

// -- events ----------------------------------------------------------------

/// Groups rows by id (in order of first appearance) and sorts each group.
/// Duplicate timestamps within an id collapse to one event with a warning.
inline std::vector<EventSeries> read_events(std::istream& in, std::ostream* warnings = &std::cerr) {
  LineReader reader(in);
  std::string line;
  if (!reader.next(line)) return {};
  expect_header(line, kEventsHeader, reader.number());

  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> groups;
  while (reader.next(line)) {
    const auto fields = split_csv(line);
    if (fields.size() != 2) throw ParseError(reader.number(), "expected 2 fields");
    if (fields[0].empty()) throw ParseError(reader.number(), "empty individual_id");
    const double t = parse_real(fields[1], reader.number(), "timestamp_s");
    if (t < 0.0) throw ParseError(reader.number(), "negative timestamp");
    std::string id(fields[0]);
    auto [it, inserted] = groups.try_emplace(id);
    if (inserted) order.push_back(id);
    it->second.push_back(t);
  }

  std::vector<EventSeries> out;
  out.reserve(order.size());
  for (const auto& id : order) {
    auto& ts = groups[id];
    std::sort(ts.begin(), ts.end());
    const auto before = ts.size();
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    if (ts.size() != before && warnings)
      *warnings << "warning: " << (before - ts.size()) << " duplicate timestamp(s) for '" << id
                << "' collapsed\n";
    out.emplace_back(id, std::move(ts));
  }
  return out;
}

inline std::vector<EventSeries> ingest_events(const std::string& path,
                                              std::ostream* warnings = &std::cerr) {
  auto f = open_in(path);
  return read_events(f, warnings);
}

inline void write_events(std::span<const EventSeries> series, std::ostream& out) {
  out << kEventsHeader << '\n';
  for (const auto& s : series) {
    check_id(s.individual_id());
    for (double t : s.timestamps()) out << s.individual_id() << ',' << format_shortest(t) << '\n';
  }
  finish(out);
}

inline void write_events(std::span<const EventSeries> series, const std::string& path) {
  auto f = open_out(path);
  write_events(series, f);
}

// -- fits ------------------------------------------------------------------

inline void write_fits(std::span<const FitResult> fits, std::ostream& out) {
  out << kFitsHeader << '\n';
  for (const auto& f : fits) {
    check_id(f.individual_id);
    out << f.individual_id << ',' << f.n << ',' << format_g6(f.rho) << ',' << format_g6(f.mu)
        << ',' << format_g6(std::log(f.mu)) << ',' << format_g6(f.r2) << ','
        << format_g6(f.ac1) << ',' << (f.h1 ? "true" : "false") << '\n';
  }
  finish(out);
}

inline void write_fits(std::span<const FitResult> fits, const std::string& path) {
  auto f = open_out(path);
  write_fits(fits, f);
}

inline std::vector<FitResult> read_fits(std::istream& in) {
  LineReader reader(in);
  std::string line;
  std::vector<FitResult> out;
  if (!reader.next(line)) return out;
  expect_header(line, kFitsHeader, reader.number());
  while (reader.next(line)) {
    const auto fields = split_csv(line);
    const auto ln = reader.number();
    if (fields.size() != 8) throw ParseError(ln, "expected 8 fields");
    FitResult f;
    f.individual_id = std::string(fields[0]);
    const double n = parse_real(fields[1], ln, "n");
    if (n < 0.0 || n != std::floor(n)) throw ParseError(ln, "n must be a nonnegative integer");
    f.n = static_cast<std::size_t>(n);
    f.rho = parse_real(fields[2], ln, "rho");
    f.mu = parse_real(fields[3], ln, "mu");
    if (!(f.mu > 0.0)) throw ParseError(ln, "mu must be positive");
    f.r2 = parse_real(fields[5], ln, "r2");
    f.ac1 = parse_real(fields[6], ln, "ac1");
    f.h1 = parse_bool(fields[7], ln, "h1");
    out.push_back(std::move(f));
  }
  return out;
}

inline std::vector<FitResult> read_fits(const std::string& path) {
  auto f = open_in(path);
  return read_fits(f);
}

// -- model -----------------------------------------------------------------

inline nlohmann::json model_to_json(const PopulationModel& m) {
  const auto& p = m.params;
  return {
      {"system", m.system_name},
      {"mean", {p.mean()[0], p.mean()[1]}},
      {"cov", {{p.cov()[0][0], p.cov()[0][1]}, {p.cov()[1][0], p.cov()[1][1]}}},
      {"min_events", m.min_events},
  };
}

inline PopulationModel model_from_json(const nlohmann::json& j) {
  try {
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto cov = j.at("cov").get<std::vector<std::vector<double>>>();
    if (mean.size() != 2 || cov.size() != 2 || cov[0].size() != 2 || cov[1].size() != 2)
      throw DataError("model: mean must have 2 entries and cov must be 2x2");
    PopulationModel m{BivariateGaussianParams({mean[0], mean[1]},
                                              Mat2{Vec2{cov[0][0], cov[0][1]},
                                                   Vec2{cov[1][0], cov[1][1]}}),
                      j.at("system").get<std::string>(), j.at("min_events").get<std::size_t>()};
    if (m.min_events < 2) throw DataError("model: min_events must be at least 2");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model: ") + e.what());
  } catch (const ParameterError& e) {
    throw DataError(std::string("model: ") + e.what());
  }
}

inline void write_model(const PopulationModel& m, std::ostream& out) {
  out << model_to_json(m).dump(2) << '\n';
  finish(out);
}

inline void write_model(const PopulationModel& m, const std::string& path) {
  auto f = open_out(path);
  write_model(m, f);
}

inline PopulationModel read_model(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model: ") + e.what());
  }
  return model_from_json(j);
}

inline PopulationModel read_model(const std::string& path) {
  auto f = open_in(path);
  return read_model(f);
}

// -- anomalies, curves -----------------------------------------------------

inline void write_anomalies(std::span<const AnomalyReport> reports, std::ostream& out) {
  out << kAnomaliesHeader << '\n';
  for (const auto& r : reports) {
    check_id(r.individual_id);
    out << r.individual_id << ',' << format_g6(r.d2) << ',' << (r.fit_ok ? "true" : "false")
        << ',' << to_string(r.label) << '\n';
  }
  finish(out);
}

inline void write_anomalies(std::span<const AnomalyReport> reports, const std::string& path) {
  auto f = open_out(path);
  write_anomalies(reports, f);
}

inline std::vector<AnomalyReport> read_anomalies(std::istream& in) {
  LineReader reader(in);
  std::string line;
  std::vector<AnomalyReport> out;
  if (!reader.next(line)) return out;
  expect_header(line, kAnomaliesHeader, reader.number());
  while (reader.next(line)) {
    const auto fields = split_csv(line);
    const auto ln = reader.number();
    if (fields.size() != 4) throw ParseError(ln, "expected 4 fields");
    AnomalyReport r;
    r.individual_id = std::string(fields[0]);
    r.d2 = parse_real(fields[1], ln, "d2");
    r.fit_ok = parse_bool(fields[2], ln, "fit_ok");
    const auto l = fields[3];
    if (l == "normal") r.label = AnomalyLabel::normal;
    else if (l == "A1") r.label = AnomalyLabel::A1;
    else if (l == "A2") r.label = AnomalyLabel::A2;
    else if (l == "A3") r.label = AnomalyLabel::A3;
    else throw ParseError(ln, "unknown label");
    out.push_back(std::move(r));
  }
  return out;
}

inline void write_or_curve(const OrCurve& c, std::ostream& out) {
  out << kOrCurveHeader << '\n';
  for (const auto& p : c.points) out << format_g6(p.log_t) << ',' << format_g6(p.log_or) << '\n';
  finish(out);
}

inline void write_acf(const std::string& id, const AcfResult& acf, std::ostream& out,
                      bool header = true) {
  if (header) out << kAcfHeader << '\n';
  check_id(id);
  for (std::size_t l = 0; l < acf.coefficients.size(); ++l)
    out << id << ',' << (l + 1) << ',' << format_g6(acf.coefficients[l]) << ','
        << format_g6(acf.band) << '\n';
  finish(out);
}

}  // namespace sfp::io
