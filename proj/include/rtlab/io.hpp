#pragma once

#include "rtlab/grid.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace rtlab {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Little-endian binary: "RTLF", version, grid box and shape, then values column-major.
void write_field(const std::string& path, const Field& f);
Field read_field(const std::string& path);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Column by header name; throws IoError if absent.
    std::vector<double> column(const std::string& name) const;
};

/// Header row, then one row per record with 17 significant digits.
void write_csv(const std::string& path, const Table& t);
Table read_csv(const std::string& path);

std::string format_double(double v);

} // namespace rtlab
