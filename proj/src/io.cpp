#include "rtlab/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace rtlab {

namespace {

constexpr char kMagic[4] = {'R', 'T', 'L', 'F'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is, const std::string& path) {
    T v;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw IoError("truncated field file: " + path);
    return v;
}

} // namespace

void write_field(const std::string& path, const Field& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    const PhaseGrid& g = f.grid();
    os.write(kMagic, 4);
    put(os, kVersion);
    put(os, g.x_max);
    put(os, g.v_max);
    put(os, static_cast<std::int32_t>(g.nx));
    put(os, static_cast<std::int32_t>(g.nv));
    put(os, static_cast<std::int32_t>(g.bc));
    os.write(reinterpret_cast<const char*>(f.values().data()),
             static_cast<std::streamsize>(sizeof(double) * f.values().size()));
    if (!os) throw IoError("write failed: " + path);
}

Field read_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("missing field file: " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::string(magic, 4) != std::string(kMagic, 4))
        throw IoError("not a field file: " + path);
    if (get<std::uint32_t>(is, path) != kVersion) throw IoError("unsupported field version: " + path);
    PhaseGrid g;
    g.x_max = get<double>(is, path);
    g.v_max = get<double>(is, path);
    g.nx = get<std::int32_t>(is, path);
    g.nv = get<std::int32_t>(is, path);
    g.bc = static_cast<Boundary>(get<std::int32_t>(is, path));
    g.validate();
    Eigen::ArrayXXd values(g.nx, g.nv);
    if (!is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(sizeof(double) * values.size())))
        throw IoError("truncated field file: " + path);
    return Field(g, std::move(values));
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> Table::column(const std::string& name) const {
    for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] == name) {
            std::vector<double> out;
            out.reserve(rows.size());
            for (const auto& r : rows) out.push_back(r.at(c));
            return out;
        }
    throw IoError("no column named " + name);
}

void write_csv(const std::string& path, const Table& t) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    for (std::size_t c = 0; c < t.header.size(); ++c) os << (c ? "," : "") << t.header[c];
    os << '\n';
    for (const auto& r : t.rows) {
        if (r.size() != t.header.size()) throw IoError("row width differs from header in " + path);
        for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << format_double(r[c]);
        os << '\n';
    }
    if (!os) throw IoError("write failed: " + path);
}

Table read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("missing csv file: " + path);
    Table t;
    std::string line;
    if (!std::getline(is, line)) throw IoError("empty csv file: " + path);
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) t.header.push_back(cell);
    }
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size()) throw IoError("bad number '" + cell + "' in " + path);
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace rtlab
