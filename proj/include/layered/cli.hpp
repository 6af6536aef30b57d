#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "layered/config.hpp"
#include "layered/harness.hpp"
#include "layered/io.hpp"
#include "layered/simulate.hpp"

namespace layered::cli {

enum ExitCode : int { kOk = 0, kRunFailure = 1, kConfigError = 2 };

struct Options {
    std::string subcommand;
    std::string config;
    std::string out;
    std::string eps;
    std::optional<std::size_t> nx, nz, threads;
    std::vector<double> alphas;
    bool quiet = false;
};

class Context {
public:
    Context(const Options& o, std::ostream& out) : opt_(o), out_(out) {}

    template <typename... A>
    void say(const char* fmt, A... args) {
        if (opt_.quiet) return;
        if constexpr (sizeof...(A) == 0) {
            out_ << fmt;
        } else {
            char buf[512];
            std::snprintf(buf, sizeof buf, fmt, args...);
            out_ << buf;
        }
    }
    void line(const std::string& s) {
        if (!opt_.quiet) out_ << s << '\n';
    }
    void wrote(const std::filesystem::path& p) { line("wrote " + p.string()); }

    const Options& opt() const { return opt_; }

private:
    const Options& opt_;
    std::ostream& out_;
};

inline std::string fmt_g(double v, int prec = 4) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

inline SweepConfig resolve_config(const Options& o) {
    SweepConfig c;
    if (!o.config.empty()) {
        std::ifstream is(o.config);
        if (!is) throw ConfigError("cannot open config file " + o.config);
        std::stringstream ss;
        ss << is.rdbuf();
        c = parse_config_text(ss.str(), o.config);
    } else {
        c.base.domain = DomainSpec{1.0, 1.0, {-0.5}};
        c.base.stack = LayerStack{{1.0, 0.2}, {1.0, 0.5}};
    }
    if (o.nx) c.base.nx = *o.nx;
    if (o.nz) c.base.nz_per_layer = *o.nz;
    if (o.threads) c.threads = *o.threads;
    if (!o.alphas.empty()) c.alphas = o.alphas;
    if (!o.out.empty()) c.out_dir = o.out;
    if (!o.eps.empty()) {
        const auto list = parse_number_list("--eps", o.eps);
        require(!list.empty(), "--eps: empty list");
        if (o.subcommand == "sweep") {
            c.eps = list;
        } else {
            require(list.size() == 1, "--eps: " + o.subcommand + " takes a single width");
            c.base.model = ModelSpec::diffuse(list[0]);
            require(list[0] > 0, "--eps must be positive");
        }
    }
    if (o.subcommand == "run" || o.subcommand == "jumps") {
        // Sweep widths are irrelevant here; only the single-run part is checked.
        c.base.validate();
        try {
            (void)c.base.make_grid();
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(c.base.model.kind == ProfileKind::Diffuse ? "model.eps: " : "") + e.what());
        }
    } else {
        validate_config(c);
    }
    return c;
}

inline std::filesystem::path prepare_out(const SweepConfig& c) {
    std::filesystem::path dir(c.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

inline Manifest base_manifest(const Options& o, const SweepConfig& c) {
    Manifest m{{"command", o.subcommand}, {"config_file", o.config.empty() ? "<builtin default>" : o.config}};
    for (auto& kv : config_entries(c)) m.push_back(kv);
    return m;
}

inline void invariant_summary(Context& ctx, const std::vector<RunInvariants>& inv) {
    ctx.say("%-28s %10s %10s %10s %10s %10s\n", "run", "phi0_inf", "max_phi", "div_rel", "energy_up", "mirror");
    for (const auto& i : inv)
        ctx.say("%-28s %10.3e %10.3e %10.3e %10.3e %10.3e%s\n", i.model.c_str(), i.phi0_linf, i.max_phi_linf,
                i.max_rel_divergence, i.max_energy_growth, i.max_mirror_defect, i.completed ? "" : "  (incomplete)");
}

inline void table_summary(Context& ctx, const ConvergenceTable& t, const std::vector<std::string>& cols) {
    std::string head = "  eps     ";
    for (const auto& c : cols) head += " " + std::string(std::max<std::size_t>(12, c.size()) - c.size(), ' ') + c;
    ctx.line(head);
    for (const auto& r : t.rows) {
        std::string s = fmt_g(r.eps, 6);
        s.resize(std::max<std::size_t>(s.size(), 10), ' ');
        s = "  " + s;
        for (const auto& c : cols) {
            char buf[40];
            std::snprintf(buf, sizeof buf, " %*.4e", int(std::max<std::size_t>(12, c.size())), r.values[t.index(c)]);
            s += buf;
        }
        ctx.line(s);
    }
}

inline void rate_summary(Context& ctx, const ConvergenceTable& t) {
    ctx.say("%-18s %9s %7s %6s\n", "column", "exponent", "R2", "points");
    for (const auto& [name, f] : t.fits()) {
        if (f.valid())
            ctx.say("%-18s %9.4f %7.4f %6zu\n", name.c_str(), f.exponent, f.r2, f.points);
        else
            ctx.say("%-18s %9s\n", name.c_str(), "n/a");
    }
}

// ------------------------------------------------------------------ commands

inline int cmd_run(Context& ctx, const SweepConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto dir = prepare_out(c);
    const RunConfig& r = c.base;
    const Grid g = r.make_grid();
    const CoefficientProfile p = r.make_profile(g);
    RunInvariants inv;
    inv.model = r.model.name();
    detail::InvariantTracker tr{&g, &inv};
    std::size_t k = 0;
    State last;
    std::vector<std::filesystem::path> written;
    int code = kOk;
    std::string failure;
    try {
        run(g, p, r.stepper, initial_data(r.initial, g), r.T_final, r.snapshots,
            [&](const State& s) {
                tr.snapshot(s);
                char name[32];
                std::snprintf(name, sizeof name, "phi_%04zu.plyd", k++);
                save_snapshot((dir / name).string(), s.phi, g.L(), g.H(), s.t);
                written.push_back(dir / name);
                last = s;
            },
            [&](const State& s) { tr.step(s); });
        inv.completed = true;
        const std::pair<const char*, const Field*> finals[] = {
            {"P_final.plyd", &last.P}, {"u_final.plyd", &last.u}, {"w_final.plyd", &last.w}};
        for (const auto& [name, f] : finals) {
            save_snapshot((dir / name).string(), *f, g.L(), g.H(), last.t);
            written.push_back(dir / name);
        }
    } catch (const RunError& e) {
        failure = e.what();
        code = kRunFailure;
    }
    write_invariants_csv((dir / "invariants.csv").string(), {inv});
    written.push_back(dir / "invariants.csv");
    Manifest m = base_manifest(ctx.opt(), c);
    m.emplace_back("grid.nz_total", std::to_string(g.nz()));
    m.emplace_back("steps", std::to_string(r.steps()));
    m.emplace_back("snapshots_written", std::to_string(k));
    m.emplace_back("status", code == kOk ? "ok" : "failed: " + failure);
    m.emplace_back("seconds.total", fmt_g(detail::seconds_since(t0), 6));
    write_manifest((dir / "manifest.txt").string(), m);
    written.push_back(dir / "manifest.txt");

    ctx.say("%s: nx=%zu nz=%zu dt=%g T=%g, %zu snapshots\n", inv.model.c_str(), g.nx(), g.nz(), r.stepper.dt,
            r.T_final, k);
    invariant_summary(ctx, {inv});
    for (const auto& w : written) ctx.wrote(w);
    if (code != kOk) std::cerr << "run failed: " << failure << '\n';
    return code;
}

inline int cmd_sweep(Context& ctx, const SweepConfig& c, bool layer_only) {
    const auto dir = prepare_out(c);
    const SweepResult res = run_sweep(c);
    std::vector<std::filesystem::path> written;
    if (!layer_only) {
        write_sweep_csv((dir / "sweep.csv").string(), res.table);
        written.push_back(dir / "sweep.csv");
    }
    write_layer_profile_csv((dir / "layer_profile.csv").string(), res.profiles);
    written.push_back(dir / "layer_profile.csv");
    write_invariants_csv((dir / "invariants.csv").string(), res.invariants);
    written.push_back(dir / "invariants.csv");
    Manifest m = base_manifest(ctx.opt(), c);
    m.emplace_back("grid.nx_effective", std::to_string(res.nx));
    m.emplace_back("grid.nz_total", std::to_string(res.nz));
    m.emplace_back("snapshot_count", std::to_string(res.snapshot_times.size()));
    m.emplace_back("seconds.sharp", fmt_g(res.member_seconds.front(), 6));
    for (std::size_t i = 1; i < res.member_seconds.size(); ++i)
        m.emplace_back("seconds.eps_" + fmt_g(c.eps[i - 1], 6), fmt_g(res.member_seconds[i], 6));
    m.emplace_back("seconds.total", fmt_g(res.seconds, 6));
    m.emplace_back("status", res.table.partial ? "partial: " + res.table.failure : "ok");
    write_manifest((dir / "manifest.txt").string(), m);
    written.push_back(dir / "manifest.txt");

    ctx.say("shared grid nx=%zu nz=%zu, %zu snapshots, %.1f s\n", res.nx, res.nz, res.snapshot_times.size(),
            res.seconds);
    if (layer_only) {
        ctx.line("boundary layer report (sup over snapshots):");
        table_summary(ctx, res.table,
                      {"du_near_sup", "du_far_sup", "du_far_sup_sqrt", "du_tilde_linf", "layer_width"});
    } else {
        table_summary(ctx, res.table, {"dphi_l2", "dxphi_l2", "gradP_l2", "du_l2", "du_sup", "du_far_sup",
                                       "du_tilde_linf"});
        rate_summary(ctx, res.table);
    }
    invariant_summary(ctx, res.invariants);
    for (const auto& w : written) ctx.wrote(w);
    if (res.table.partial) {
        std::cerr << "sweep incomplete: " << res.table.failure << '\n';
        return kRunFailure;
    }
    return kOk;
}

inline int cmd_jumps(Context& ctx, const SweepConfig& c) {
    const auto dir = prepare_out(c);
    const JumpStudy js = run_jumps(c.base, c.jump_levels, c.jump_scale_dt);
    write_jumps_csv((dir / "jumps.csv").string(), js);
    write_invariants_csv((dir / "invariants.csv").string(), js.invariants);
    Manifest m = base_manifest(ctx.opt(), c);
    m.emplace_back("seconds.total", fmt_g(js.seconds, 6));
    write_manifest((dir / "manifest.txt").string(), m);

    std::string head = "  nz/layer  dt         if";
    for (const auto& [name, v] : JumpResiduals{}.entries()) head += " " + std::string(12 - name.size(), ' ') + name;
    ctx.line(head);
    for (const auto& r : js.rows) {
        ctx.say("  %8zu  %-9.3g %3zu", r.nz_per_layer, r.dt, r.interface);
        for (const auto& [name, v] : r.residuals.entries()) ctx.say(" %12.4e", v);
        ctx.say("\n");
    }
    invariant_summary(ctx, js.invariants);
    for (const char* f : {"jumps.csv", "invariants.csv", "manifest.txt"}) ctx.wrote(dir / f);
    return kOk;
}

inline int cmd_embed(Context& ctx, const SweepConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto dir = prepare_out(c);
    const std::vector<double> alphas = ctx.opt().alphas.empty() ? std::vector<double>{0.75} : ctx.opt().alphas;
    std::vector<std::pair<double, std::vector<EmbedRow>>> fam;
    for (double a : alphas) {
        require(a > 0 && a < 1, "--alpha entries must lie in (0, 1)");
        fam.emplace_back(a, embedding_family(a));
    }
    write_embed_csv((dir / "embed.csv").string(), fam);
    Manifest m{{"command", "embed"}, {"alphas", detail::num_list(alphas)}, {"J", "3..7"}};
    m.emplace_back("seconds.total", fmt_g(detail::seconds_since(t0), 6));
    write_manifest((dir / "manifest.txt").string(), m);
    for (const auto& [a, rows] : fam) {
        ctx.say("alpha = %g\n  %2s %12s %12s\n", a, "J", "iso", "aniso");
        for (const auto& r : rows) ctx.say("  %2d %12.4e %12.4e\n", r.J, r.iso, r.aniso);
    }
    ctx.wrote(dir / "embed.csv");
    ctx.wrote(dir / "manifest.txt");
    return kOk;
}

inline int cmd_mms(Context& ctx, const SweepConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto dir = prepare_out(c);
    std::vector<MmsResult> all = mms_verify(MmsCase::Elliptic);
    for (auto& r : mms_verify(MmsCase::Diffusion)) all.push_back(std::move(r));
    write_mms_csv((dir / "mms.csv").string(), all);
    Manifest m{{"command", "mms"}};
    for (const auto& r : all) m.emplace_back("seconds." + r.name, fmt_g(r.seconds, 6));
    m.emplace_back("seconds.total", fmt_g(detail::seconds_since(t0), 6));
    write_manifest((dir / "manifest.txt").string(), m);
    ctx.say("%-26s %-10s %10s\n", "case", "parameter", "min order");
    for (const auto& r : all) ctx.say("%-26s %-10s %10.4f\n", r.name.c_str(), r.parameter.c_str(), r.min_order);
    ctx.wrote(dir / "mms.csv");
    ctx.wrote(dir / "manifest.txt");
    return kOk;
}

inline int cmd_report(Context& ctx, const SweepConfig& c) {
    namespace fs = std::filesystem;
    const fs::path dir(c.out_dir);
    bool any = false;
    if (fs::exists(dir / "sweep.csv")) {
        any = true;
        const ConvergenceTable t = read_sweep_csv((dir / "sweep.csv").string());
        ctx.line("sweep.csv:");
        std::vector<std::string> cols;
        for (const char* k : {"dphi_l2", "dxphi_l2", "gradP_l2", "du_l2", "du_sup", "du_far_sup", "du_tilde_linf"})
            for (const auto& name : t.columns)
                if (name == k) cols.push_back(name);
        table_summary(ctx, t, cols);
        rate_summary(ctx, t);
        if (t.partial) ctx.line("  (partial: " + t.failure + ")");
    }
    const auto dump = [&](const char* name) {
        if (!fs::exists(dir / name)) return;
        any = true;
        ctx.line(std::string(name) + ":");
        for (const auto& row : read_csv((dir / name).string())) {
            std::string s = " ";
            for (const auto& cell : row) {
                std::string v = cell;
                try {
                    if (!v.empty() && (std::isdigit(static_cast<unsigned char>(v[0])) || v[0] == '-'))
                        v = fmt_g(parse_double(v), 5);
                } catch (const FormatError&) {
                }
                s += " " + std::string(v.size() < 12 ? 12 - v.size() : 0, ' ') + v;
            }
            ctx.line(s);
        }
    };
    for (const char* f : {"jumps.csv", "mms.csv", "embed.csv", "invariants.csv"}) dump(f);
    if (!any) throw ConfigError("report: no result CSVs found in " + dir.string());
    return kOk;
}

/// Parses argv and runs one subcommand; returns the process exit code.
inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Layered porous-media convection: sharp and diffuse interface models"};
    app.require_subcommand(1, 1);
    app.fallthrough(false);
    Options o;
    const auto add_common = [&](CLI::App* s, bool needs_config) {
        auto* cfg = s->add_option("--config,-c", o.config, "INI configuration file");
        if (needs_config) cfg->required();
        s->add_option("--out,-o", o.out, "Output directory (overrides sweep.out)");
        s->add_flag("--quiet,-q", o.quiet, "Print errors only");
    };
    const auto add_grid = [&](CLI::App* s) {
        s->add_option("--eps", o.eps, "Band half-width(s), fractions allowed (e.g. 1/64 or 1/16,1/32)");
        s->add_option("--nx", o.nx, "Horizontal grid points");
        s->add_option("--nz", o.nz, "Cells per layer");
    };
    auto* run = app.add_subcommand("run", "Run one model (sharp, or diffuse with --eps)");
    add_common(run, true);
    add_grid(run);
    auto* sweep = app.add_subcommand("sweep", "Diffuse-width convergence study against the sharp model");
    add_common(sweep, true);
    add_grid(sweep);
    sweep->add_option("--threads", o.threads, "Concurrent sweep members");
    auto* jumps = app.add_subcommand("jumps", "Interface jump residuals of the sharp model under refinement");
    add_common(jumps, true);
    add_grid(jumps);
    auto* layer = app.add_subcommand("layer", "Boundary-layer velocity approximation and near/far report");
    add_common(layer, true);
    add_grid(layer);
    auto* embed = app.add_subcommand("embed", "Isotropic vs anisotropic embedding diagnostic");
    add_common(embed, false);
    embed->add_option("--alpha", o.alphas, "Fractional orders")->delimiter(',');
    auto* mms = app.add_subcommand("mms", "Manufactured-solution order verification");
    add_common(mms, false);
    auto* report = app.add_subcommand("report", "Summarize existing result CSVs");
    add_common(report, false);

    if (argc > 1 && argv[1][0] != '-') {
        const std::string name = argv[1];
        bool known = false;
        for (const auto* s : app.get_subcommands({})) known = known || s->get_name() == name;
        if (!known) {
            err << "unknown subcommand '" << name << "' (expected run, sweep, jumps, layer, embed, mms or report)\n";
            return kConfigError;
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kConfigError;
    }
    o.subcommand = app.get_subcommands().front()->get_name();
    Context ctx(o, out);
    try {
        SweepConfig c = resolve_config(o);
        if (o.subcommand == "layer") {
            if (o.eps.empty())
                c.eps = {c.base.model.kind == ProfileKind::Diffuse ? c.base.model.eps : c.eps.back()};
            else
                c.eps = {c.base.model.eps};
            c.base.model = ModelSpec::sharp();
            validate_config(c);
        }
        if (o.subcommand == "run") return cmd_run(ctx, c);
        if (o.subcommand == "sweep") return cmd_sweep(ctx, c, false);
        if (o.subcommand == "layer") return cmd_sweep(ctx, c, true);
        if (o.subcommand == "jumps") return cmd_jumps(ctx, c);
        if (o.subcommand == "embed") return cmd_embed(ctx, c);
        if (o.subcommand == "mms") return cmd_mms(ctx, c);
        return cmd_report(ctx, c);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRunFailure;
    }
}

}  // namespace layered::cli
