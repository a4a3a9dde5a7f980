#pragma once

#include "monosplit/algorithms.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace monosplit {

inline constexpr std::array<std::string_view, 7> kTraceColumns{
    "k", "residual", "step_norm", "dist_to_ref", "lyapunov", "cum_c_err", "wall_time_ns"};

enum class TraceFormat { csv, json };

std::string_view to_string(TraceFormat f);
std::optional<TraceFormat> parse_trace_format(std::string_view name);
std::string_view file_extension(TraceFormat f);

/// Shortest round-trip decimal form.
std::string format_double(double v);

/// Header plus one row per record. Absent optionals are empty fields.
void write_trace_csv(std::ostream& out, const IterationTrace& trace);
/// {"columns": [...], "records": [[...], ...]} with null for absent fields.
void write_trace_json(std::ostream& out, const IterationTrace& trace);
void write_trace(const std::filesystem::path& path, const IterationTrace& trace, TraceFormat format);

/// Parses what write_trace_csv produced. Throws ConfigError on schema
/// mismatch.
IterationTrace read_trace_csv(std::istream& in);

}  // namespace monosplit
