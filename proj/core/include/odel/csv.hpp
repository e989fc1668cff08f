#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "odel/core.hpp"

namespace odel {

/// Shortest decimal text that round-trips the double exactly. Always uses
/// '.' as the decimal separator, independent of locale.
std::string format_double(double x);

/// Parses a double written by format_double (or any plain decimal text).
/// Throws std::runtime_error on trailing garbage or empty input.
double parse_double(const std::string& text);

/// One row of the stream file format: `t,kind,values...` with kind vec|val.
struct StreamRow {
    long long t = 0;
    bool is_vector = false;
    std::vector<double> values;
};

std::vector<StreamRow> rows_from_values(std::span<const ValueItem> items);
std::vector<StreamRow> rows_from_vectors(std::span<const VectorItem> items);

void write_stream_csv(const std::string& path, std::span<const StreamRow> rows);

/// Reads a stream file; malformed rows are rejected with their line number.
/// An empty or header-only file yields an empty stream.
std::vector<StreamRow> read_stream_csv(const std::string& path);

/// One row of the trajectory file format:
/// `seed,t,metric,monitor:<name>...`.
struct TrajectoryRow {
    std::uint64_t seed = 0;
    ExperimentRecord record;
};

void write_trajectory_csv(const std::string& path,
                          std::span<const std::string> monitor_names,
                          std::span<const TrajectoryRow> rows);

} // namespace odel
