#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "layered/error.hpp"
#include "layered/field.hpp"
#include "layered/harness.hpp"

namespace layered {

// ---------------------------------------------------------------- snapshots

inline constexpr std::array<char, 4> kSnapshotMagic{'P', 'L', 'Y', 'D'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

struct Snapshot {
    double L = 1, H = 1, time = 0;
    Field field;
};

namespace detail {

template <typename T>
void put_le(std::ostream& os, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<unsigned char, sizeof(T)> b;
    std::memcpy(b.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
    os.write(reinterpret_cast<const char*>(b.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& is, const std::string& path) {
    std::array<unsigned char, sizeof(T)> b;
    if (!is.read(reinterpret_cast<char*>(b.data()), sizeof(T)))
        throw FormatError("snapshot " + path + ": truncated file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
    T v;
    std::memcpy(&v, b.data(), sizeof(T));
    return v;
}

}  // namespace detail

/// Header: magic, u32 version, u32 nx, u32 rows, f64 L, f64 H, f64 time,
/// u8 staggering (0 center, 1 face); then nx * rows f64, z fastest.
inline void save_snapshot(const std::string& path, const Field& f, double L, double H, double time) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path + " for writing");
    os.write(kSnapshotMagic.data(), 4);
    detail::put_le<std::uint32_t>(os, kSnapshotVersion);
    detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.nx()));
    detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(f.rows()));
    detail::put_le<double>(os, L);
    detail::put_le<double>(os, H);
    detail::put_le<double>(os, time);
    detail::put_le<std::uint8_t>(os, static_cast<std::uint8_t>(f.staggering()));
    for (double v : f.raw()) detail::put_le<double>(os, v);
    if (!os) throw Error("write failed for " + path);
}

inline Snapshot load_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path);
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), 4) || magic != kSnapshotMagic)
        throw FormatError("snapshot " + path + ": bad magic (expected PLYD)");
    const auto version = detail::get_le<std::uint32_t>(is, path);
    if (version != kSnapshotVersion)
        throw FormatError("snapshot " + path + ": unsupported version " + std::to_string(version));
    const auto nx = detail::get_le<std::uint32_t>(is, path);
    const auto rows = detail::get_le<std::uint32_t>(is, path);
    Snapshot s;
    s.L = detail::get_le<double>(is, path);
    s.H = detail::get_le<double>(is, path);
    s.time = detail::get_le<double>(is, path);
    const auto tag = detail::get_le<std::uint8_t>(is, path);
    if (tag > 1) throw FormatError("snapshot " + path + ": unknown staggering tag " + std::to_string(tag));
    s.field = Field(nx, rows, static_cast<Staggering>(tag));
    for (auto& v : s.field.raw()) v = detail::get_le<double>(is, path);
    if (is.peek() != std::char_traits<char>::eof()) throw FormatError("snapshot " + path + ": trailing bytes");
    return s;
}

// ---------------------------------------------------------------------- CSV

using CsvRow = std::vector<std::string>;

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw FormatError("csv: '" + s + "' is not a number");
    }
    if (pos != s.size()) throw FormatError("csv: '" + s + "' is not a number");
    return v;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : path_(path), os_(path, std::ios::binary) {
        if (!os_) throw Error("cannot open " + path + " for writing");
    }

    void row(const CsvRow& r) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) os_ << ',';
            os_ << csv_escape(r[i]);
        }
        os_ << "\r\n";
        if (!os_) throw Error("write failed for " + path_);
    }

    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream os_;
};

/// RFC-4180 reader; accepts CRLF or LF record separators.
inline std::vector<CsvRow> read_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    const std::string text = ss.str();
    std::vector<CsvRow> rows;
    CsvRow cur;
    std::string field;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            cur.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !field.empty()) {
                cur.push_back(std::move(field));
                rows.push_back(std::move(cur));
            }
            cur.clear();
            field.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (quoted) throw FormatError("csv " + path + ": unterminated quoted field");
    if (any || !field.empty()) {
        cur.push_back(std::move(field));
        rows.push_back(std::move(cur));
    }
    return rows;
}

// ------------------------------------------------------------ result files

inline void write_sweep_csv(const std::string& path, const ConvergenceTable& t) {
    CsvWriter w(path);
    CsvRow head{"eps"};
    head.insert(head.end(), t.columns.begin(), t.columns.end());
    w.row(head);
    for (const auto& r : t.rows) {
        CsvRow row{format_double(r.eps)};
        for (double v : r.values) row.push_back(format_double(v));
        w.row(row);
    }
    w.row({"#rate", "column", "exponent", "intercept", "r2", "points"});
    for (const auto& [name, f] : t.fits())
        w.row({"#rate", name, format_double(f.exponent), format_double(f.intercept), format_double(f.r2),
               std::to_string(f.points)});
    if (t.partial) w.row({"#partial", t.failure});
}

/// Re-reads a sweep.csv (rate footer ignored; fits are recomputed on demand).
inline ConvergenceTable read_sweep_csv(const std::string& path) {
    const auto rows = read_csv(path);
    if (rows.empty() || rows[0].empty() || rows[0][0] != "eps")
        throw FormatError("sweep csv " + path + ": missing 'eps' header");
    ConvergenceTable t;
    t.columns.assign(rows[0].begin() + 1, rows[0].end());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.empty()) continue;
        if (r[0] == "#partial") {
            t.partial = true;
            t.failure = r.size() > 1 ? r[1] : "";
            continue;
        }
        if (!r[0].empty() && r[0][0] == '#') continue;
        if (r.size() != t.columns.size() + 1)
            throw FormatError("sweep csv " + path + ": row " + std::to_string(i) + " has wrong column count");
        ConvergenceRow row;
        row.eps = parse_double(r[0]);
        for (std::size_t k = 1; k < r.size(); ++k) row.values.push_back(parse_double(r[k]));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline void write_jumps_csv(const std::string& path, const JumpStudy& j) {
    CsvWriter w(path);
    CsvRow head{"nz_per_layer", "dt", "interface", "time"};
    for (const auto& [name, v] : JumpResiduals{}.entries()) head.push_back(name);
    w.row(head);
    for (const auto& r : j.rows) {
        CsvRow row{std::to_string(r.nz_per_layer), format_double(r.dt), std::to_string(r.interface),
                   format_double(r.time)};
        for (const auto& [name, v] : r.residuals.entries()) row.push_back(format_double(v));
        w.row(row);
    }
}

inline void write_mms_csv(const std::string& path, const std::vector<MmsResult>& results) {
    CsvWriter w(path);
    w.row({"case", "parameter", "size", "error", "observed_order", "min_order", "seconds"});
    for (const auto& r : results)
        for (std::size_t i = 0; i < r.errors.size(); ++i)
            w.row({r.name, r.parameter, format_double(r.sizes[i]), format_double(r.errors[i]),
                   i == 0 ? "" : format_double(r.orders[i - 1]), format_double(r.min_order),
                   format_double(r.seconds)});
}

inline void write_invariants_csv(const std::string& path, const std::vector<RunInvariants>& inv) {
    CsvWriter w(path);
    w.row({"model", "phi0_linf", "max_phi_linf", "max_rel_divergence", "max_energy_growth", "max_mirror_defect",
           "completed"});
    for (const auto& i : inv)
        w.row({i.model, format_double(i.phi0_linf), format_double(i.max_phi_linf),
               format_double(i.max_rel_divergence), format_double(i.max_energy_growth),
               format_double(i.max_mirror_defect), i.completed ? "1" : "0"});
}

inline void write_layer_profile_csv(const std::string& path, const std::vector<LayerProfile>& profiles) {
    CsvWriter w(path);
    w.row({"eps", "ix", "z", "u_sharp", "u_eps", "u_tilde"});
    for (const auto& p : profiles)
        for (std::size_t i = 0; i < p.z.size(); ++i)
            w.row({format_double(p.eps), std::to_string(p.ix), format_double(p.z[i]), format_double(p.u_sharp[i]),
                   format_double(p.u_eps[i]), format_double(p.u_tilde[i])});
}

inline void write_embed_csv(const std::string& path, const std::vector<std::pair<double, std::vector<EmbedRow>>>& fam) {
    CsvWriter w(path);
    w.row({"alpha", "J", "iso", "aniso"});
    for (const auto& [alpha, rows] : fam)
        for (const auto& r : rows)
            w.row({format_double(alpha), std::to_string(r.J), format_double(r.iso), format_double(r.aniso)});
}

using Manifest = std::vector<std::pair<std::string, std::string>>;

inline void write_manifest(const std::string& path, const Manifest& m) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path + " for writing");
    for (const auto& [k, v] : m) os << k << " = " << v << '\n';
    if (!os) throw Error("write failed for " + path);
}

inline Manifest read_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open " + path);
    Manifest m;
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find(" = ");
        if (eq == std::string::npos) continue;
        m.emplace_back(line.substr(0, eq), line.substr(eq + 3));
    }
    return m;
}

}  // namespace layered
