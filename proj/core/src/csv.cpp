#include "odel/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace odel {

std::string format_double(double x) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
    double out = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last)
        throw std::runtime_error("invalid number: '" + text + "'");
    return out;
}

std::vector<StreamRow> rows_from_values(std::span<const ValueItem> items) {
    std::vector<StreamRow> rows;
    rows.reserve(items.size());
    long long t = 1;
    for (const auto& g : items) rows.push_back({t++, false, g.values});
    return rows;
}

std::vector<StreamRow> rows_from_vectors(std::span<const VectorItem> items) {
    std::vector<StreamRow> rows;
    rows.reserve(items.size());
    long long t = 1;
    for (const auto& v : items) rows.push_back({t++, true, v.coords});
    return rows;
}

void write_stream_csv(const std::string& path, std::span<const StreamRow> rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "t,kind,values...\n";
    for (const auto& row : rows) {
        out << row.t << ',' << (row.is_vector ? "vec" : "val");
        for (double x : row.values) out << ',' << format_double(x);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

[[noreturn]] void fail_row(const std::string& path, std::size_t line_no, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

} // namespace

std::vector<StreamRow> read_stream_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::vector<StreamRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("t,kind", 0) == 0) continue; // header
        const auto fields = split_csv_line(line);
        if (fields.size() < 3) fail_row(path, line_no, "expected at least 3 fields");
        StreamRow row;
        try {
            std::size_t used = 0;
            row.t = std::stoll(fields[0], &used);
            if (used != fields[0].size()) throw std::invalid_argument("trailing garbage");
        } catch (const std::exception&) {
            fail_row(path, line_no, "invalid step index '" + fields[0] + "'");
        }
        if (fields[1] == "vec") row.is_vector = true;
        else if (fields[1] == "val") row.is_vector = false;
        else fail_row(path, line_no, "unknown kind '" + fields[1] + "'");
        row.values.reserve(fields.size() - 2);
        for (std::size_t k = 2; k < fields.size(); ++k) {
            try {
                row.values.push_back(parse_double(fields[k]));
            } catch (const std::exception&) {
                fail_row(path, line_no, "invalid value '" + fields[k] + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_trajectory_csv(const std::string& path,
                          std::span<const std::string> monitor_names,
                          std::span<const TrajectoryRow> rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "seed,t,metric";
    for (const auto& name : monitor_names) out << ",monitor:" << name;
    out << '\n';
    for (const auto& row : rows) {
        out << row.seed << ',' << row.record.t << ',' << format_double(row.record.metric);
        for (const auto& name : monitor_names) {
            const auto it = row.record.monitors.find(name);
            out << ',' << format_double(it == row.record.monitors.end() ? 0.0 : it->second);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace odel
