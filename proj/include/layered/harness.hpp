#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "layered/coeffs.hpp"
#include "layered/diagnostics.hpp"
#include "layered/elliptic.hpp"
#include "layered/error.hpp"
#include "layered/norms.hpp"
#include "layered/oracle.hpp"
#include "layered/simulate.hpp"
#include "layered/transport.hpp"

namespace layered {

// ---------------------------------------------------------------- rate fits

struct RateFit {
    double exponent = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double r2 = std::numeric_limits<double>::quiet_NaN();
    std::size_t points = 0;
    bool valid() const { return points >= 3; }
};

inline constexpr double kRateFloor = 1e-13;

/// Least squares of log(value) on log(eps); rows below the floor are dropped.
inline RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& values) {
    if (eps.size() != values.size()) throw Error("fit_rate: eps and value columns differ in length");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < eps.size(); ++i)
        if (std::isfinite(values[i]) && values[i] >= kRateFloor && eps[i] > 0) {
            x.push_back(std::log(eps[i]));
            y.push_back(std::log(values[i]));
        }
    if (x.size() < 3)
        throw Error("fit_rate: need at least 3 rows above the " + std::to_string(kRateFloor) + " floor, have " +
                    std::to_string(x.size()));
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw Error("fit_rate: all eps values coincide");
    RateFit r;
    r.points = x.size();
    r.exponent = sxy / sxx;
    r.intercept = my - r.exponent * mx;
    double ssr = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (r.intercept + r.exponent * x[i]);
        ssr += e * e;
    }
    r.r2 = syy > 0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
    return r;
}

// --------------------------------------------------------------------- MMS

enum class MmsCase { Elliptic, Diffusion };

struct MmsResult {
    std::string name;
    std::string parameter;  // what is refined: "nz" or "dt"
    std::vector<double> sizes;
    std::vector<double> errors;
    std::vector<double> orders;  // one per doubling
    double min_order = std::numeric_limits<double>::quiet_NaN();
    double seconds = 0;
};

namespace detail {

constexpr double kPi = std::numbers::pi;

inline void finish(MmsResult& r) {
    for (std::size_t i = 1; i < r.errors.size(); ++i) r.orders.push_back(std::log2(r.errors[i - 1] / r.errors[i]));
    if (!r.orders.empty()) r.min_order = *std::min_element(r.orders.begin(), r.orders.end());
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline Field sampled(const Grid& g, const std::function<double(double, double)>& fn) {
    Field f = Field::centers(g);
    for (std::size_t ix = 0; ix < g.nx(); ++ix)
        for (std::size_t i = 0; i < g.nz(); ++i) f(ix, i) = fn(g.x(ix), g.centers()[i]);
    return f;
}

inline State resting(const Grid& g, Field phi) {
    State s;
    s.phi = std::move(phi);
    s.P = Field::centers(g);
    s.u = Field::centers(g);
    s.w = Field::faces(g);
    return s;
}

inline double rel_max(const Field& a, const Field& b) { return (a - b).max_abs() / b.max_abs(); }

/// Two-layer K = (2, 1), phi = cos(2 pi x) sin(pi z): max error of P vs gluing formula.
inline double elliptic_error(std::size_t nz_per_layer) {
    const DomainSpec d{1.0, 1.0, {-0.5}};
    const Grid g = build_grid(d, 16, nz_per_layer);
    const TwoLayerMode ref(2 * kPi, 1.0, -0.5, 2.0, 1.0);
    const Field phi = sampled(g, [](double x, double z) { return std::cos(2 * kPi * x) * std::sin(kPi * z); });
    const auto sol = solve_pressure(g, sharp_profile(LayerStack{{2.0, 1.0}, {1.0, 1.0}}, g), phi);
    const Field exact = sampled(g, [&](double x, double z) { return std::cos(2 * kPi * x) * ref.P(z); });
    return rel_max(sol.P, exact);
}

/// Separable decay sin(pi z) sin(2 pi x) exp(-D (pi^2 + 4 pi^2) t), D = 1.
inline double diffusion_error(std::size_t nz_per_layer, double dt, double T, bool discrete_lambda) {
    const DomainSpec d{1.0, 1.0, {-0.5}};
    const Grid g = build_grid(d, 16, nz_per_layer);
    StepperConfig cfg;
    cfg.dt = dt;
    TransportStepper ts(g, sharp_profile(LayerStack{{1.0, 1.0}, {1.0, 1.0}}, g), cfg);
    auto shape = [](double x, double z) { return std::sin(kPi * z) * std::sin(2 * kPi * x); };
    State s = resting(g, sampled(g, shape));
    const auto steps = static_cast<std::size_t>(std::llround(T / dt));
    for (std::size_t n = 0; n < steps; ++n) ts.step(s);
    double lam = 5 * kPi * kPi;
    if (discrete_lambda) {
        const double h = 1.0 / static_cast<double>(g.nz());
        lam = 4.0 / (h * h) * std::pow(std::sin(kPi * h / 2), 2) + 4 * kPi * kPi;
    }
    const double amp = std::exp(-lam * s.t);
    return rel_max(s.phi, sampled(g, [&](double x, double z) { return amp * shape(x, z); }));
}

/// Layered D = (2, 0.5) with manufactured phi = (1 + t) cos(2 pi x) (1 - cos(2 pi z)).
inline double layered_diffusion_error(std::size_t nz_per_layer) {
    const DomainSpec d{1.0, 1.0, {-0.5}};
    const Grid g = build_grid(d, 16, nz_per_layer);
    const auto prof = sharp_profile(LayerStack{{1.0, 1.0}, {2.0, 0.5}}, g);
    auto exact = [&](double t) {
        return sampled(g, [t](double x, double z) {
            return (1 + t) * std::cos(2 * kPi * x) * (1 - std::cos(2 * kPi * z));
        });
    };
    StepperConfig cfg;
    cfg.dt = 1e-2;
    cfg.source = [&](double t) {
        return sampled(g, [t](double x, double z) {
            const double D = z > -0.5 ? 2.0 : 0.5, k = 2 * kPi;
            const double gz = 1 - std::cos(2 * kPi * z), gzz = 4 * kPi * kPi * std::cos(2 * kPi * z);
            return std::cos(k * x) * (gz + (1 + t) * D * (k * k * gz - gzz));
        });
    };
    TransportStepper ts(g, prof, cfg);
    State s = resting(g, exact(0.0));
    for (int n = 0; n < 10; ++n) ts.step(s);
    return rel_max(s.phi, exact(s.t));
}

}  // namespace detail

/// Manufactured-solution verification over three grid (or step) doublings.
inline std::vector<MmsResult> mms_verify(MmsCase c) {
    std::vector<MmsResult> out;
    if (c == MmsCase::Elliptic) {
        auto t0 = std::chrono::steady_clock::now();
        MmsResult r{"elliptic_two_layer", "nz", {}, {}, {}};
        for (std::size_t n : {16u, 32u, 64u, 128u}) {
            r.sizes.push_back(static_cast<double>(2 * n));
            r.errors.push_back(detail::elliptic_error(n));
        }
        detail::finish(r);
        r.seconds = detail::seconds_since(t0);
        out.push_back(r);

        // Constant K: the discrete solution of one mode is known in closed form.
        t0 = std::chrono::steady_clock::now();
        MmsResult e{"elliptic_constant_eigen", "nz", {}, {}, {}};
        const std::size_t nz = 64;
        const Grid g = build_grid(DomainSpec{1.0, 1.0, {-0.5}}, 16, nz / 2);
        const Field phi =
            detail::sampled(g, [](double x, double z) { return std::cos(2 * detail::kPi * x) * std::sin(detail::kPi * z); });
        const auto sol = solve_pressure(g, sharp_profile(LayerStack{{0.8, 0.8}, {1.0, 1.0}}, g), phi);
        const double h = 1.0 / nz, k = 2 * detail::kPi, pi = detail::kPi;
        const double lam = 4.0 / (h * h) * std::pow(std::sin(pi * h / 2), 2);
        const double amp = (std::sin(pi * h) / h) / (k * k + lam);
        const Field exact = detail::sampled(g, [&](double x, double z) { return amp * std::cos(pi * z) * std::cos(k * x); });
        e.sizes.push_back(static_cast<double>(nz));
        e.errors.push_back((sol.P - exact).max_abs());
        e.seconds = detail::seconds_since(t0);
        out.push_back(e);
    } else {
        auto t0 = std::chrono::steady_clock::now();
        // Spatial: tiny dt so the time error sits far below the z error.
        MmsResult s{"diffusion_space", "nz", {}, {}, {}};
        for (std::size_t n : {8u, 16u, 32u, 64u}) {
            s.sizes.push_back(static_cast<double>(2 * n));
            s.errors.push_back(detail::diffusion_error(n, 1e-5, 0.05, false));
        }
        detail::finish(s);
        s.seconds = detail::seconds_since(t0);
        out.push_back(s);

        // Temporal: compare with the decay of the exact discrete eigenvector.
        t0 = std::chrono::steady_clock::now();
        MmsResult t{"diffusion_time", "dt", {}, {}, {}};
        for (double dt : {0.02, 0.01, 0.005, 0.0025}) {
            t.sizes.push_back(dt);
            t.errors.push_back(detail::diffusion_error(32, dt, 0.2, true));
        }
        detail::finish(t);
        t.seconds = detail::seconds_since(t0);
        out.push_back(t);

        t0 = std::chrono::steady_clock::now();
        MmsResult l{"diffusion_layered", "nz", {}, {}, {}};
        for (std::size_t n : {16u, 32u, 64u, 128u}) {
            l.sizes.push_back(static_cast<double>(2 * n));
            l.errors.push_back(detail::layered_diffusion_error(n));
        }
        detail::finish(l);
        l.seconds = detail::seconds_since(t0);
        out.push_back(l);
    }
    return out;
}

// ------------------------------------------------------------------ sweeps

/// Per-run invariant record (maximum principle, divergence, energy, symmetry).
struct RunInvariants {
    std::string model;
    double phi0_linf = 0;
    double max_phi_linf = 0;
    double max_rel_divergence = 0;  // over snapshots
    double max_energy_growth = 0;   // max over steps of ||phi_n|| / ||phi_{n-1}|| - 1, clipped at 0
    double max_mirror_defect = 0;   // relative to ||phi0||_inf, over snapshots
    bool completed = false;
};

namespace detail {

inline double mirror_defect(const Field& f) {
    double d = 0.0;
    const std::size_t nx = f.nx();
    for (std::size_t ix = 0; ix < nx; ++ix)
        for (std::size_t i = 0; i < f.rows(); ++i) d = std::max(d, std::abs(f(ix, i) - f((nx - ix) % nx, i)));
    return d;
}

/// Wraps a sink so that `inv` tracks the invariants of the run.
struct InvariantTracker {
    const Grid* g;
    RunInvariants* inv;
    double prev_energy = -1;

    void step(const State& s) {
        const double e = l2_norm(*g, s.phi);
        if (prev_energy > 0) inv->max_energy_growth = std::max(inv->max_energy_growth, e / prev_energy - 1.0);
        prev_energy = e;
        inv->max_phi_linf = std::max(inv->max_phi_linf, s.phi.max_abs());
        if (s.t == 0.0) inv->phi0_linf = s.phi.max_abs();
    }

    void snapshot(const State& s) {
        inv->max_rel_divergence = std::max(inv->max_rel_divergence, relative_divergence(*g, s.u, s.w));
        const double scale = inv->phi0_linf > 0 ? inv->phi0_linf : 1.0;
        inv->max_mirror_defect = std::max(inv->max_mirror_defect, mirror_defect(s.phi) / scale);
    }
};

}  // namespace detail

struct SweepConfig {
    RunConfig base;
    std::vector<double> eps{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
    std::vector<double> alphas{0.6, 0.75};
    std::string out_dir = "out";
    std::size_t threads = 1;
    // Sharp-run resolutions of the jump study (cells per layer); with
    // jump_scale_dt the step shrinks with the cell size.
    std::vector<std::size_t> jump_levels{256, 512, 1024};
    bool jump_scale_dt = true;

    void validate() const {
        base.validate();
        require(!eps.empty(), "sweep.eps must list at least one width");
        for (std::size_t i = 0; i < eps.size(); ++i) {
            require(eps[i] > 0 && std::isfinite(eps[i]), "sweep.eps entries must be positive");
            if (i > 0) require(eps[i] < eps[i - 1], "sweep.eps must be strictly decreasing");
        }
        for (double a : alphas) require(a >= 0 && a <= 1, "sweep.alphas entries must lie in [0, 1]");
        require(threads >= 1, "sweep.threads must be at least 1");
        require(!jump_levels.empty(), "jumps.levels must list at least one resolution");
        for (std::size_t i = 1; i < jump_levels.size(); ++i)
            require(jump_levels[i] > jump_levels[i - 1], "jumps.levels must be strictly increasing");
        (void)shared_grid();  // alignment and spacing checks
    }

    /// One grid aligned to every band of the sweep, used by every run.
    Grid shared_grid() const {
        RunConfig c = base;
        c.model = ModelSpec::sharp();
        c.align_eps = eps;
        return c.make_grid();
    }
};

inline std::vector<std::string> convergence_columns(const std::vector<double>& alphas) {
    std::vector<std::string> c{"dphi_l2",      "dxphi_l2",    "dxxphi_l2",        "gradphi_l2l2", "gradP_l2",
                               "du_l2",        "dphi_linf",   "dP_linf",          "du_far_sup",   "du_far_sup_sqrt",
                               "du_near_sup",  "du_sup",      "du_tilde_linf"};
    for (double a : alphas) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "du_tilde_h%.4g", a);
        c.emplace_back(buf);
    }
    c.emplace_back("layer_width");
    return c;
}

struct ConvergenceRow {
    double eps = 0;
    std::vector<double> values;
};

struct ConvergenceTable {
    std::vector<std::string> columns;
    std::vector<ConvergenceRow> rows;
    bool partial = false;
    std::string failure;

    std::size_t index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw Error("convergence table has no column '" + name + "'");
    }

    std::vector<double> eps() const {
        std::vector<double> e;
        for (const auto& r : rows) e.push_back(r.eps);
        return e;
    }

    std::vector<double> column(const std::string& name) const {
        const std::size_t k = index(name);
        std::vector<double> v;
        for (const auto& r : rows) v.push_back(r.values[k]);
        return v;
    }

    RateFit fit(const std::string& name) const { return fit_rate(eps(), column(name)); }

    /// Fit every column that has enough usable rows; others stay invalid.
    std::vector<std::pair<std::string, RateFit>> fits() const {
        std::vector<std::pair<std::string, RateFit>> out;
        for (const auto& c : columns) {
            RateFit f;
            try {
                f = fit(c);
            } catch (const Error&) {
            }
            out.emplace_back(c, f);
        }
        return out;
    }
};

/// u across the interface at one x column, final snapshot, for plotting.
struct LayerProfile {
    double eps = 0;
    std::size_t ix = 0;
    std::vector<double> z, u_sharp, u_eps, u_tilde;
};

struct SweepResult {
    ConvergenceTable table;
    std::vector<RunInvariants> invariants;  // sharp first, then members in eps order
    std::vector<LayerProfile> profiles;
    std::vector<double> snapshot_times;
    std::vector<double> member_seconds;  // sharp first
    double seconds = 0;
    std::size_t nx = 0, nz = 0;
};

namespace detail {

struct MemberAccumulator {
    std::vector<double> v;
    double last_t = 0, last_g2 = 0;
    bool started = false;
    double layer_width = 0;
    LayerProfile profile;
};

inline void combine_sup(double& a, double b) { a = std::max(a, b); }

}  // namespace detail

/// Column of maximum |u| at the first interface in the sharp state.
inline std::size_t profile_column(const Grid& g, const State& sharp) {
    const std::size_t f = g.interface_face(0);
    std::size_t best = 0;
    double m = -1;
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
        const double v = std::abs(sharp.u(ix, f - 1));
        if (v > m) {
            m = v;
            best = ix;
        }
    }
    return best;
}

/// Compares one diffuse snapshot with its sharp counterpart and folds the
/// result into the running sup / time-integral columns.
inline void accumulate_member(const Grid& g, const State& sharp, const State& diff, const CoefficientProfile& sp,
                              const CoefficientProfile& dp, double eps, const std::vector<double>& alphas,
                              bool last, detail::MemberAccumulator& acc) {
    using detail::combine_sup;
    const Field dphi = diff.phi - sharp.phi;
    const Field dP = diff.P - sharp.P;
    const Field du = diff.u - sharp.u;
    const Field dw = diff.w - sharp.w;
    auto& v = acc.v;
    combine_sup(v[0], l2_norm(g, dphi));
    combine_sup(v[1], l2_norm(g, ddx(dphi, g.L())));
    combine_sup(v[2], l2_norm(g, ddx(dphi, g.L(), 2)));
    const double g2 = grad_sq(g, dphi, WallCondition::Dirichlet);
    if (acc.started) v[3] += 0.5 * (g2 + acc.last_g2) * (diff.t - acc.last_t);
    acc.started = true;
    acc.last_t = diff.t;
    acc.last_g2 = g2;
    combine_sup(v[4], std::sqrt(grad_sq(g, dP, WallCondition::Free)));
    const double lu = l2_norm(g, du), lw = l2_norm(g, dw);
    combine_sup(v[5], std::sqrt(lu * lu + lw * lw));
    combine_sup(v[6], dphi.max_abs());
    combine_sup(v[7], dP.max_abs());
    const auto split = near_far_split(g, {&du, &dw}, {eps, std::sqrt(eps)});
    combine_sup(v[8], split[0].far_sup);
    combine_sup(v[9], split[1].far_sup);
    combine_sup(v[10], split[0].near_sup);
    combine_sup(v[11], std::max(split[0].near_sup, split[0].far_sup));

    const Velocity vt = velocity_from_streamfunction(g, approx_streamfunction(g, sharp, sp, dp));
    const Field eu = diff.u - vt.u;
    const Field ew = diff.w - vt.w;
    combine_sup(v[12], std::max(eu.max_abs(), ew.max_abs()));
    const CosineFourier cu = cosine_fourier(g, eu);
    const CosineFourier cw = cosine_fourier(g, face_to_center(g, ew));
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        const double hu = h_alpha_from_coeffs(cu, alphas[a]), hw = h_alpha_from_coeffs(cw, alphas[a]);
        combine_sup(v[13 + a], std::sqrt(hu * hu + hw * hw));
    }
    if (last) {
        acc.layer_width = transition_width(g, du);
        auto& p = acc.profile;
        p.eps = eps;
        p.ix = profile_column(g, sharp);
        for (std::size_t i = 0; i < g.nz(); ++i) {
            p.z.push_back(g.centers()[i]);
            p.u_sharp.push_back(sharp.u(p.ix, i));
            p.u_eps.push_back(diff.u(p.ix, i));
            p.u_tilde.push_back(vt.u(p.ix, i));
        }
    }
}

/// Sharp reference once, then every diffuse member on the same grid and dt.
inline SweepResult run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    const auto t_all = std::chrono::steady_clock::now();
    SweepResult res;
    const Grid g = cfg.shared_grid();
    res.nx = g.nx();
    res.nz = g.nz();
    const Field phi0 = initial_data(cfg.base.initial, g);
    const CoefficientProfile sp = sharp_profile(cfg.base.stack, g);
    const RunConfig& b = cfg.base;

    std::vector<State> ref;
    {
        const auto t0 = std::chrono::steady_clock::now();
        RunInvariants inv;
        inv.model = "sharp";
        detail::InvariantTracker tr{&g, &inv};
        run(g, sp, b.stepper, phi0, b.T_final, b.snapshots,
            [&](const State& s) {
                tr.snapshot(s);
                ref.push_back(s);
            },
            [&](const State& s) { tr.step(s); });
        inv.completed = true;
        res.invariants.push_back(inv);
        res.member_seconds.push_back(detail::seconds_since(t0));
    }
    for (const auto& s : ref) res.snapshot_times.push_back(s.t);

    const std::size_t members = cfg.eps.size();
    const auto cols = convergence_columns(cfg.alphas);
    std::vector<detail::MemberAccumulator> accs(members);
    std::vector<RunInvariants> invs(members);
    std::vector<double> secs(members, 0.0);
    std::vector<std::exception_ptr> errs(members);
    std::vector<std::string> messages(members);

    auto work = [&](std::size_t m) {
        const auto t0 = std::chrono::steady_clock::now();
        const double eps = cfg.eps[m];
        auto& acc = accs[m];
        acc.v.assign(cols.size(), 0.0);
        invs[m].model = ModelSpec::diffuse(eps).name();
        try {
            const CoefficientProfile dp = diffuse_profile(b.stack, g, eps);
            detail::InvariantTracker tr{&g, &invs[m]};
            std::size_t k = 0;
            run(g, dp, b.stepper, phi0, b.T_final, b.snapshots,
                [&](const State& s) {
                    tr.snapshot(s);
                    if (ref[k].t != s.t) throw RunError("snapshot times of sharp and diffuse runs differ");
                    accumulate_member(g, ref[k], s, sp, dp, eps, cfg.alphas, k + 1 == ref.size(), acc);
                    ++k;
                },
                [&](const State& s) { tr.step(s); });
            acc.v[3] = std::sqrt(acc.v[3]);
            acc.v.back() = acc.layer_width;
            invs[m].completed = true;
        } catch (const std::exception& e) {
            messages[m] = e.what();
            errs[m] = std::current_exception();
        }
        secs[m] = detail::seconds_since(t0);
    };

    const std::size_t nthreads = std::min(cfg.threads, members);
    if (nthreads <= 1) {
        for (std::size_t m = 0; m < members; ++m) {
            work(m);
            if (errs[m]) break;
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (std::size_t m; (m = next.fetch_add(1)) < members;) work(m);
            });
        for (auto& th : pool) th.join();
    }

    // Single-writer assembly in eps order; stop at the first failed member.
    res.table.columns = cols;
    for (std::size_t m = 0; m < members; ++m) {
        res.invariants.push_back(invs[m]);
        res.member_seconds.push_back(secs[m]);
        if (errs[m] || !invs[m].completed) {
            res.table.partial = true;
            res.table.failure = "member eps = " + std::to_string(cfg.eps[m]) + ": " +
                                (messages[m].empty() ? std::string("not run") : messages[m]);
            break;
        }
        res.table.rows.push_back({cfg.eps[m], accs[m].v});
        res.profiles.push_back(std::move(accs[m].profile));
    }
    res.seconds = detail::seconds_since(t_all);
    return res;
}

// -------------------------------------------------------------- jump study

struct JumpRow {
    std::size_t nz_per_layer = 0;
    double dt = 0;
    std::size_t interface = 0;
    double time = 0;
    JumpResiduals residuals;
};

struct JumpStudy {
    std::vector<JumpRow> rows;
    std::vector<RunInvariants> invariants;
    double seconds = 0;
};

/// Sharp runs at each resolution; residuals at every interface at T_final.
/// With scale_dt, dt = base dt * base nz_per_layer / level (space-time refinement).
inline JumpStudy run_jumps(const RunConfig& base, const std::vector<std::size_t>& levels, bool scale_dt = true) {
    const auto t0 = std::chrono::steady_clock::now();
    JumpStudy out;
    for (std::size_t n : levels) {
        RunConfig c = base;
        c.model = ModelSpec::sharp();
        c.align_eps.clear();
        c.nz_per_layer = n;
        if (scale_dt)
            c.stepper.dt = base.stepper.dt * static_cast<double>(base.nz_per_layer) / static_cast<double>(n);
        try {
            c.validate();
        } catch (const ConfigError& e) {
            throw ConfigError("jumps.levels (" + std::to_string(n) + " cells per layer, dt = " +
                              std::to_string(c.stepper.dt) + "): " + e.what());
        }
        const Grid g = c.make_grid();
        const CoefficientProfile p = c.make_profile(g);
        RunInvariants inv;
        inv.model = "sharp(nz_per_layer=" + std::to_string(n) + ")";
        detail::InvariantTracker tr{&g, &inv};
        State last;
        run(g, p, c.stepper, initial_data(c.initial, g), c.T_final, c.snapshots,
            [&](const State& s) {
                tr.snapshot(s);
                last = s;
            },
            [&](const State& s) { tr.step(s); });
        inv.completed = true;
        out.invariants.push_back(inv);
        for (std::size_t j = 0; j < g.domain().interfaces.size(); ++j)
            out.rows.push_back({n, c.stepper.dt, j, last.t, jump_residuals(interface_traces(last, c.stack, g, j), c.stack)});
    }
    out.seconds = detail::seconds_since(t0);
    return out;
}

// --------------------------------------------------------- embedding study

struct EmbedRow {
    int J = 0;
    double iso = 0, aniso = 0;
};

/// coef(n, m) = (1 + n^2 + m^2)^(-(alpha+1)/2) for 0 <= n, m <= 2^J on the unit channel.
inline std::vector<EmbedRow> embedding_family(double alpha, int J_min = 3, int J_max = 7) {
    require(J_min >= 1 && J_max >= J_min && J_max <= 10, "embed: J range must satisfy 1 <= J_min <= J_max <= 10");
    const std::size_t top = std::size_t{1} << J_max;
    const Grid g = build_grid(DomainSpec{1.0, 1.0, {-0.5}}, 4 * top, 2 * top);
    std::vector<EmbedRow> out;
    for (int J = J_min; J <= J_max; ++J) {
        const std::size_t N = std::size_t{1} << J;
        const Field f = synthesize_cosine_fourier(g, [&](std::size_t n, std::size_t m) {
            if (n > N || m > N) return cplx(0.0, 0.0);
            return cplx(std::pow(1.0 + double(n * n + m * m), -(alpha + 1) / 2), 0.0);
        });
        const EmbeddingRatio r = embedding_ratio(g, f, alpha);
        out.push_back({J, r.iso, r.aniso});
    }
    return out;
}

}  // namespace layered
