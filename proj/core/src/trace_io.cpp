#include "monosplit/trace_io.hpp"

#include "monosplit/errors.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace monosplit {

std::string_view to_string(TraceFormat f) { return f == TraceFormat::csv ? "csv" : "json"; }

std::optional<TraceFormat> parse_trace_format(std::string_view name) {
  if (name == "csv") return TraceFormat::csv;
  if (name == "json") return TraceFormat::json;
  return std::nullopt;
}

std::string_view file_extension(TraceFormat f) { return f == TraceFormat::csv ? ".csv" : ".json"; }

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

void put_optional(std::ostream& out, const std::optional<double>& v) {
  if (v) out << format_double(*v);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) fields.push_back(cur);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError("trace: bad number '" + s + "'");
  }
  return v;
}

std::optional<double> parse_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

}  // namespace

void write_trace_csv(std::ostream& out, const IterationTrace& trace) {
  for (std::size_t i = 0; i < kTraceColumns.size(); ++i) {
    out << (i ? "," : "") << kTraceColumns[i];
  }
  out << '\n';
  for (const auto& r : trace.records) {
    out << r.k << ',' << format_double(r.residual) << ',' << format_double(r.step_norm) << ',';
    put_optional(out, r.dist_to_ref);
    out << ',';
    put_optional(out, r.lyapunov);
    out << ',';
    put_optional(out, r.cum_c_error);
    out << ',' << r.wall_time_ns << '\n';
  }
}

void write_trace_json(std::ostream& out, const IterationTrace& trace) {
  using json = nlohmann::json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json rows = json::array();
  for (const auto& r : trace.records) {
    rows.push_back({r.k, r.residual, r.step_norm, opt(r.dist_to_ref), opt(r.lyapunov),
                    opt(r.cum_c_error), r.wall_time_ns});
  }
  json j{{"columns", kTraceColumns}, {"records", std::move(rows)}};
  out << j.dump() << '\n';
}

void write_trace(const std::filesystem::path& path, const IterationTrace& trace,
                 TraceFormat format) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write trace '" + path.string() + "'");
  if (format == TraceFormat::csv) {
    write_trace_csv(out, trace);
  } else {
    write_trace_json(out, trace);
  }
  if (!out) throw ConfigError("error while writing trace '" + path.string() + "'");
}

IterationTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trace: empty input");
  const auto header = split(line);
  if (header.size() != kTraceColumns.size()) throw ConfigError("trace: unexpected header");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] != kTraceColumns[i]) throw ConfigError("trace: unexpected column '" + header[i] + "'");
  }
  IterationTrace trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != kTraceColumns.size()) throw ConfigError("trace: row with wrong field count");
    TraceRecord r;
    r.k = static_cast<long>(parse_double(f[0]));
    r.residual = parse_double(f[1]);
    r.step_norm = parse_double(f[2]);
    r.dist_to_ref = parse_optional(f[3]);
    r.lyapunov = parse_optional(f[4]);
    r.cum_c_error = parse_optional(f[5]);
    r.wall_time_ns = static_cast<std::int64_t>(parse_double(f[6]));
    trace.records.push_back(r);
  }
  return trace;
}

}  // namespace monosplit
