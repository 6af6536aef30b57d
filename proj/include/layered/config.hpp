#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "layered/error.hpp"
#include "layered/harness.hpp"
#include "layered/simulate.hpp"

namespace layered {

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

inline bool parse_plain_double(const std::string& s, double& v) {
    if (s.empty()) return false;
    const char* b = s.data();
    const char* e = b + s.size();
    if (*b == '+') ++b;
    auto [p, ec] = std::from_chars(b, e, v);
    return ec == std::errc() && p == e && std::isfinite(v);
}

}  // namespace detail

/// Decimal or fraction "a/b"; a fraction is a single correctly rounded division.
inline double parse_number(const std::string& key, const std::string& text) {
    const std::string s = detail::trim(text);
    double v = 0;
    const auto slash = s.find('/');
    if (slash == std::string::npos) {
        if (detail::parse_plain_double(s, v)) return v;
    } else {
        double a = 0, b = 0;
        if (detail::parse_plain_double(detail::trim(s.substr(0, slash)), a) &&
            detail::parse_plain_double(detail::trim(s.substr(slash + 1)), b) && b != 0) {
            v = a / b;
            if (std::isfinite(v)) return v;
        }
    }
    throw ConfigError(key + ": cannot parse '" + s + "' as a number");
}

inline std::vector<double> parse_number_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    if (detail::trim(text).empty()) return out;
    const auto items = detail::split(text, ',');
    for (std::size_t i = 0; i < items.size(); ++i)
        out.push_back(parse_number(key + "[" + std::to_string(i) + "]", items[i]));
    return out;
}

inline std::size_t parse_count(const std::string& key, const std::string& text) {
    const std::string s = detail::trim(text);
    unsigned long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size())
        throw ConfigError(key + ": cannot parse '" + s + "' as a non-negative integer");
    return static_cast<std::size_t>(v);
}

inline int parse_int(const std::string& key, const std::string& text) {
    const std::string s = detail::trim(text);
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size())
        throw ConfigError(key + ": cannot parse '" + s + "' as an integer");
    return v;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
    const std::string s = detail::trim(text);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError(key + ": expected true or false, got '" + s + "'");
}

inline std::vector<ModeTerm> parse_modes(const std::string& key, const std::string& text) {
    std::vector<ModeTerm> out;
    if (detail::trim(text).empty()) return out;
    const auto items = detail::split(text, ',');
    for (std::size_t i = 0; i < items.size(); ++i) {
        const std::string k = key + "[" + std::to_string(i) + "]";
        const auto parts = detail::split(items[i], ':');
        if (parts.size() != 3) throw ConfigError(k + ": expected n:m:amplitude, got '" + items[i] + "'");
        out.push_back({parse_int(k + ".n", parts[0]), parse_int(k + ".m", parts[1]), parse_number(k + ".a", parts[2])});
    }
    return out;
}

/// Sweep-level config; `base` is the single-run part.
/// Sections: [domain] [layers] [grid] [time] [model] [initial] [sweep] [jumps].
inline SweepConfig parse_config_text(const std::string& text, const std::string& origin = "<config>") {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream is(text);
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }

    static const std::map<std::string, std::set<std::string>> schema{
        {"domain", {"L", "H", "interfaces"}},
        {"layers", {"K", "D"}},
        {"grid", {"nx", "nz_per_layer"}},
        {"time", {"dt", "T", "snapshots", "scheme", "cfl", "dealias"}},
        {"model", {"kind", "eps"}},
        {"initial", {"kind", "amplitude", "x_mode", "modes"}},
        {"sweep", {"eps", "alphas", "threads", "out"}},
        {"jumps", {"levels", "scale_dt"}},
    };
    std::map<std::string, std::string> kv;
    for (const auto& [sec, body] : tree) {
        const auto it = schema.find(sec);
        if (it == schema.end()) {
            if (body.empty() && !body.data().empty())
                throw ConfigError(origin + ": key '" + sec + "' outside any section");
            throw ConfigError(origin + ": unknown section [" + sec + "]");
        }
        for (const auto& [key, val] : body) {
            if (!it->second.count(key)) throw ConfigError(origin + ": unknown key " + sec + "." + key);
            kv[sec + "." + key] = val.data();
        }
    }
    const auto has = [&](const std::string& k) { return kv.count(k) > 0; };
    const auto need = [&](const std::string& k) -> const std::string& {
        const auto it = kv.find(k);
        if (it == kv.end()) throw ConfigError(origin + ": missing required key " + k);
        return it->second;
    };

    SweepConfig c;
    RunConfig& r = c.base;
    if (has("domain.L")) r.domain.L = parse_number("domain.L", kv["domain.L"]);
    if (has("domain.H")) r.domain.H = parse_number("domain.H", kv["domain.H"]);
    r.domain.interfaces = parse_number_list("domain.interfaces", need("domain.interfaces"));
    r.stack.K = parse_number_list("layers.K", need("layers.K"));
    r.stack.D = parse_number_list("layers.D", need("layers.D"));

    if (has("grid.nx")) r.nx = parse_count("grid.nx", kv["grid.nx"]);
    if (has("grid.nz_per_layer")) r.nz_per_layer = parse_count("grid.nz_per_layer", kv["grid.nz_per_layer"]);

    if (has("time.dt")) r.stepper.dt = parse_number("time.dt", kv["time.dt"]);
    if (has("time.T")) r.T_final = parse_number("time.T", kv["time.T"]);
    if (has("time.snapshots")) r.snapshots = parse_count("time.snapshots", kv["time.snapshots"]);
    if (has("time.cfl")) r.stepper.cfl = parse_number("time.cfl", kv["time.cfl"]);
    if (has("time.dealias")) r.stepper.dealias = parse_bool("time.dealias", kv["time.dealias"]);
    if (has("time.scheme")) {
        const std::string s = detail::trim(kv["time.scheme"]);
        if (s == "cnab2") r.stepper.scheme = Scheme::ImexCnab2;
        else if (s == "euler") r.stepper.scheme = Scheme::ImexEuler;
        else throw ConfigError("time.scheme: expected cnab2 or euler, got '" + s + "'");
    }

    const std::string kind = has("model.kind") ? detail::trim(kv["model.kind"]) : "sharp";
    if (kind == "sharp") {
        r.model = ModelSpec::sharp();
        if (has("model.eps")) r.model.eps = parse_number("model.eps", kv["model.eps"]);
    } else if (kind == "diffuse") {
        r.model = ModelSpec::diffuse(parse_number("model.eps", need("model.eps")));
        require(r.model.eps > 0, "model.eps must be positive for the diffuse model");
    } else {
        throw ConfigError("model.kind: expected sharp or diffuse, got '" + kind + "'");
    }

    const std::string ik = has("initial.kind") ? detail::trim(kv["initial.kind"]) : "separable";
    if (ik == "separable") r.initial.kind = InitialSpec::Kind::Separable;
    else if (ik == "modes") r.initial.kind = InitialSpec::Kind::CustomModes;
    else throw ConfigError("initial.kind: expected separable or modes, got '" + ik + "'");
    if (has("initial.amplitude")) r.initial.amplitude = parse_number("initial.amplitude", kv["initial.amplitude"]);
    if (has("initial.x_mode")) r.initial.x_mode = parse_int("initial.x_mode", kv["initial.x_mode"]);
    if (has("initial.modes")) r.initial.modes = parse_modes("initial.modes", kv["initial.modes"]);
    if (r.initial.kind == InitialSpec::Kind::CustomModes)
        require(!r.initial.modes.empty(), "initial.modes must list at least one n:m:amplitude term");

    if (has("sweep.eps")) c.eps = parse_number_list("sweep.eps", kv["sweep.eps"]);
    if (has("sweep.alphas")) c.alphas = parse_number_list("sweep.alphas", kv["sweep.alphas"]);
    if (has("sweep.threads")) c.threads = parse_count("sweep.threads", kv["sweep.threads"]);
    if (has("sweep.out")) c.out_dir = detail::trim(kv["sweep.out"]);
    if (has("jumps.levels")) {
        c.jump_levels.clear();
        const auto items = detail::split(kv["jumps.levels"], ',');
        for (std::size_t i = 0; i < items.size(); ++i)
            c.jump_levels.push_back(parse_count("jumps.levels[" + std::to_string(i) + "]", items[i]));
    }
    if (has("jumps.scale_dt")) c.jump_scale_dt = parse_bool("jumps.scale_dt", kv["jumps.scale_dt"]);
    return c;
}

/// Physical and discretization checks; ConfigError names the offending key.
inline void validate_config(const SweepConfig& c) {
    c.base.validate();
    if (c.base.model.kind == ProfileKind::Diffuse) {
        try {
            (void)c.base.make_grid();
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("model.eps: ") + e.what());
        }
    } else {
        (void)c.base.make_grid();
    }
    for (std::size_t i = 0; i < c.eps.size(); ++i) {
        try {
            RunConfig one = c.base;
            one.model = ModelSpec::diffuse(c.eps[i]);
            require(c.eps[i] > 0 && std::isfinite(c.eps[i]), "entries must be positive");
            (void)one.make_grid();
        } catch (const ConfigError& e) {
            throw ConfigError("sweep.eps[" + std::to_string(i) + "]: " + e.what());
        }
    }
    c.validate();
}

inline SweepConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    SweepConfig c = parse_config_text(ss.str(), path);
    validate_config(c);
    return c;
}

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string num_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
    return s;
}

}  // namespace detail

/// Fully resolved config as (section.key, value) pairs, in schema order.
inline std::vector<std::pair<std::string, std::string>> config_entries(const SweepConfig& c) {
    const RunConfig& r = c.base;
    std::vector<std::pair<std::string, std::string>> e;
    e.emplace_back("domain.L", detail::num(r.domain.L));
    e.emplace_back("domain.H", detail::num(r.domain.H));
    e.emplace_back("domain.interfaces", detail::num_list(r.domain.interfaces));
    e.emplace_back("layers.K", detail::num_list(r.stack.K));
    e.emplace_back("layers.D", detail::num_list(r.stack.D));
    e.emplace_back("grid.nx", std::to_string(r.nx));
    e.emplace_back("grid.nz_per_layer", std::to_string(r.nz_per_layer));
    e.emplace_back("time.dt", detail::num(r.stepper.dt));
    e.emplace_back("time.T", detail::num(r.T_final));
    e.emplace_back("time.snapshots", std::to_string(r.snapshots));
    e.emplace_back("time.scheme", r.stepper.scheme == Scheme::ImexCnab2 ? "cnab2" : "euler");
    e.emplace_back("time.cfl", detail::num(r.stepper.cfl));
    e.emplace_back("time.dealias", r.stepper.dealias ? "true" : "false");
    e.emplace_back("model.kind", r.model.kind == ProfileKind::Sharp ? "sharp" : "diffuse");
    e.emplace_back("model.eps", detail::num(r.model.eps));
    e.emplace_back("initial.kind", r.initial.kind == InitialSpec::Kind::Separable ? "separable" : "modes");
    e.emplace_back("initial.amplitude", detail::num(r.initial.amplitude));
    e.emplace_back("initial.x_mode", std::to_string(r.initial.x_mode));
    std::string modes;
    for (std::size_t i = 0; i < r.initial.modes.size(); ++i) {
        const auto& t = r.initial.modes[i];
        modes += (i ? ", " : "") + std::to_string(t.n) + ":" + std::to_string(t.m) + ":" + detail::num(t.amplitude);
    }
    e.emplace_back("initial.modes", modes);
    e.emplace_back("sweep.eps", detail::num_list(c.eps));
    e.emplace_back("sweep.alphas", detail::num_list(c.alphas));
    e.emplace_back("sweep.threads", std::to_string(c.threads));
    e.emplace_back("sweep.out", c.out_dir);
    std::string levels;
    for (std::size_t i = 0; i < c.jump_levels.size(); ++i) levels += (i ? ", " : "") + std::to_string(c.jump_levels[i]);
    e.emplace_back("jumps.levels", levels);
    e.emplace_back("jumps.scale_dt", c.jump_scale_dt ? "true" : "false");
    return e;
}

/// INI text that parses back to an identical config.
inline std::string echo_config(const SweepConfig& c) {
    std::string out, section;
    for (const auto& [k, v] : config_entries(c)) {
        const auto dot = k.find('.');
        const std::string sec = k.substr(0, dot);
        if (sec != section) {
            out += (section.empty() ? "[" : "\n[") + sec + "]\n";
            section = sec;
        }
        out += k.substr(dot + 1) + " = " + v + "\n";
    }
    return out;
}

inline bool config_equal(const SweepConfig& a, const SweepConfig& b) {
    const RunConfig& x = a.base;
    const RunConfig& y = b.base;
    return x.domain.L == y.domain.L && x.domain.H == y.domain.H && x.domain.interfaces == y.domain.interfaces &&
           x.stack.K == y.stack.K && x.stack.D == y.stack.D && x.nx == y.nx && x.nz_per_layer == y.nz_per_layer &&
           x.stepper.dt == y.stepper.dt && x.T_final == y.T_final && x.snapshots == y.snapshots &&
           x.stepper.scheme == y.stepper.scheme && x.stepper.cfl == y.stepper.cfl &&
           x.stepper.dealias == y.stepper.dealias && x.model.kind == y.model.kind && x.model.eps == y.model.eps &&
           x.initial == y.initial && a.eps == b.eps && a.alphas == b.alphas && a.threads == b.threads &&
           a.out_dir == b.out_dir && a.jump_levels == b.jump_levels && a.jump_scale_dt == b.jump_scale_dt;
}

}  // namespace layered
