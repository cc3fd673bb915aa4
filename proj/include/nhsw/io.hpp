// io.hpp - CSV tables, key/value configuration files, run manifests

#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <map>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "nhsw/lightcone.hpp"
#include "nhsw/model.hpp"
#include "nhsw/spectra.hpp"

namespace nhsw {

inline constexpr const char* tool_version = "1.0.0";

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shortest decimal that reads back to the same double; locale independent.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double x = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    if (b != e && *b == '+') ++b;
    auto res = std::from_chars(b, e, x);
    if (res.ec != std::errc() || res.ptr != e) throw domain_error("not a number: '" + s + "'");
    return x;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) {
        if (row.size() != header.size()) throw domain_error("row width does not match header");
        rows.push_back(std::move(row));
    }
    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw domain_error("missing column '" + name + "'");
    }
    bool has(const std::string& name) const {
        for (const auto& h : header)
            if (h == name) return true;
        return false;
    }
};

inline void write_csv(const Table& t, std::ostream& os) {
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os << ',';
            os << cells[i];
        }
        os << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
}

inline void write_csv(const Table& t, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw io_error("cannot open '" + path + "' for writing");
    write_csv(t, os);
    os.flush();
    if (!os) throw io_error("write failed for '" + path + "'");
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline Table read_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open '" + path + "' for reading");
    Table t;
    std::string line;
    if (!std::getline(is, line)) throw io_error("'" + path + "' is empty");
    t.header = split_csv_line(line);
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != t.header.size())
            throw io_error("'" + path + "' line " + std::to_string(lineno) + ": expected " +
                           std::to_string(t.header.size()) + " fields");
        t.rows.push_back(std::move(cells));
    }
    return t;
}

// "key = value" lines; '#' starts a comment.
inline std::map<std::string, std::string> read_key_values(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open config '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (auto c = line.find('#'); c != std::string::npos) line.resize(c);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw domain_error("config '" + path + "' line " + std::to_string(lineno) + ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

inline int parse_int(const std::string& s) {
    int x = 0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto res = std::from_chars(b, e, x);
    if (res.ec != std::errc() || res.ptr != e) throw domain_error("not an integer: '" + s + "'");
    return x;
}

inline ModelParams load_params(const std::string& path, ModelParams base = {}) {
    for (const auto& [k, v] : read_key_values(path)) {
        if (k == "J") base.J = parse_double(v);
        else if (k == "h") base.h = parse_double(v);
        else if (k == "gamma") base.gamma = parse_double(v);
        else if (k == "gamma_prime") base.gamma_prime = parse_double(v);
        else if (k == "dimension") base.dimension = parse_int(v);
        else if (k == "n_sites") base.n_sites = parse_int(v);
        else throw domain_error("unknown config key '" + k + "' in " + path);
    }
    return base;
}

inline std::string file_digest(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open '" + path + "' for hashing");
    std::uint64_t h = 14695981039346656037ull;
    char buf[1 << 16];
    while (is) {
        is.read(buf, sizeof buf);
        for (std::streamsize i = 0; i < is.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    std::ostringstream os;
    os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

inline nlohmann::ordered_json params_json(const ModelParams& p) {
    return {{"J", p.J}, {"h", p.h}, {"gamma", p.gamma}, {"gamma_prime", p.gamma_prime},
            {"dimension", p.dimension}, {"n_sites", p.n_sites}};
}

struct RunManifest {
    std::string subcommand;
    nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
    nlohmann::ordered_json integrator = nlohmann::ordered_json::object();
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();  // path -> digest
    nlohmann::ordered_json divergence;                                 // null when absent
    std::vector<std::string> outputs;
    double wall_seconds{0.0};

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["subcommand"] = subcommand;
        j["tool_version"] = tool_version;
        j["parameters"] = parameters;
        j["integrator"] = integrator;
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        j["divergence"] = divergence;
        j["wall_seconds"] = wall_seconds;
        return j;
    }
};

inline std::string manifest_path(const std::string& csv_path) { return csv_path + ".manifest.jsonl"; }

// One JSON record per run, appended; earlier records are never rewritten.
inline void append_manifest(const RunManifest& m, const std::string& csv_path) {
    const std::string path = manifest_path(csv_path);
    std::ofstream os(path, std::ios::app);
    if (!os) throw io_error("cannot open manifest '" + path + "'");
    os << m.to_json().dump() << '\n';
    if (!os) throw io_error("write failed for manifest '" + path + "'");
}

inline std::optional<nlohmann::json> last_manifest(const std::string& csv_path) {
    std::ifstream is(manifest_path(csv_path));
    if (!is) return std::nullopt;
    std::string line, last;
    while (std::getline(is, line))
        if (!line.empty()) last = line;
    if (last.empty()) return std::nullopt;
    return nlohmann::json::parse(last);
}

inline Table spectrum_table(const Spectrum& s) {
    Table t;
    for (int d = 0; d < s.grid.dimension(); ++d) t.header.push_back("k_" + std::to_string(d + 1));
    for (const char* c : {"Re_E", "Im_E", "Re_theta", "Im_theta", "defined"}) t.header.emplace_back(c);
    for (const auto& p : s.points) {
        std::vector<std::string> row;
        for (double k : p.k) row.push_back(format_double(k));
        row.push_back(format_double(p.energy.real()));
        row.push_back(format_double(p.energy.imag()));
        row.push_back(format_double(p.angle.real()));
        row.push_back(format_double(p.angle.imag()));
        row.push_back(p.defined ? "1" : "0");
        t.add(std::move(row));
    }
    return t;
}

inline Table trajectory_table(const Trajectory& tr) {
    Table t{{"t", "k_index", "Re_F", "Im_F", "Re_G", "Im_G"}, {}};
    t.rows.reserve(tr.times.size() * tr.grid.size());
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        for (std::size_t m = 0; m < tr.grid.size(); ++m) {
            const ModeState& s = tr.states[i][m];
            t.rows.push_back({format_double(tr.times[i]), std::to_string(m), format_double(s.f.real()),
                              format_double(s.f.imag()), format_double(s.g.real()), format_double(s.g.imag())});
        }
    return t;
}

// Rebuilds a trajectory from its CSV; rows must be grouped by time in grid order.
inline Trajectory trajectory_from_table(const Table& t, Flavor fl, const ModelParams& p) {
    Trajectory tr;
    tr.flavor = fl;
    tr.params = p;
    tr.grid = make_kgrid(p);
    const std::size_t ct = t.column("t"), ck = t.column("k_index"), rf = t.column("Re_F"), jf = t.column("Im_F"),
                      rg = t.column("Re_G"), jg = t.column("Im_G");
    const std::size_t nm = tr.grid.size();
    if (t.rows.size() % nm != 0) throw domain_error("trajectory rows are not a multiple of the grid size");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::size_t m = r % nm;
        if (parse_int(row[ck]) != static_cast<int>(m))
            throw domain_error("trajectory rows are not in grid order (row " + std::to_string(r + 2) + ")");
        if (m == 0) {
            tr.times.push_back(parse_double(row[ct]));
            tr.states.emplace_back(nm);
        }
        tr.states.back()[m] = {cplx(parse_double(row[rf]), parse_double(row[jf])),
                               cplx(parse_double(row[rg]), parse_double(row[jg]))};
    }
    return tr;
}

inline Table field_table(const CorrelationField& f, bool log_column = false) {
    Table t;
    if (f.dimension == 1) t.header = {"R"};
    else if (f.dimension == 2) t.header = {"x", "y"};
    else
        for (int d = 0; d < f.dimension; ++d) t.header.push_back("R_" + std::to_string(d + 1));
    for (const char* c : {"t", "Re", "Im"}) t.header.emplace_back(c);
    if (log_column) t.header.emplace_back("log10_abs_Re");
    for (std::size_t j = 0; j < f.distances.size(); ++j)
        for (std::size_t i = 0; i < f.times.size(); ++i) {
            std::vector<std::string> row;
            for (int c : f.distances[j]) row.push_back(std::to_string(c));
            const cplx v = f.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
            row.push_back(format_double(f.times[i]));
            row.push_back(format_double(v.real()));
            row.push_back(format_double(v.imag()));
            if (log_column) row.push_back(format_double(std::log10(std::abs(v.real()))));
            t.add(std::move(row));
        }
    return t;
}

// Reads a field written by field_table; rows grouped by distance, times ascending.
inline CorrelationField field_from_table(const Table& t) {
    CorrelationField f;
    std::vector<std::size_t> dcols;
    if (t.has("R")) dcols = {t.column("R")};
    else if (t.has("x")) dcols = {t.column("x"), t.column("y")};
    else throw domain_error("field table needs an R column or x,y columns");
    f.dimension = static_cast<int>(dcols.size());
    const std::size_t ct = t.column("t"), cr = t.column("Re"), ci = t.column("Im");
    std::vector<std::vector<cplx>> rows;
    for (const auto& row : t.rows) {
        Offset r;
        for (auto c : dcols) r.push_back(parse_int(row[c]));
        if (f.distances.empty() || f.distances.back() != r) {
            f.distances.push_back(r);
            rows.emplace_back();
        }
        const double time = parse_double(row[ct]);
        if (f.distances.size() == 1) f.times.push_back(time);
        rows.back().emplace_back(parse_double(row[cr]), parse_double(row[ci]));
    }
    f.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(f.times.size()));
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (rows[j].size() != f.times.size()) throw domain_error("field rows have unequal time grids");
        for (std::size_t i = 0; i < rows[j].size(); ++i)
            f.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = rows[j][i];
    }
    return f;
}

inline Table points_table(const EdgeFit& fit) {
    Table t{{"distance", "time"}, {}};
    for (const auto& p : fit.points) t.add({format_double(p.distance), format_double(p.time)});
    return t;
}

inline std::string to_csv_string(const Table& t) {
    std::ostringstream os;
    write_csv(t, os);
    return os.str();
}

}  // namespace nhsw
