#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "layered/coeffs.hpp"
#include "layered/elliptic.hpp"
#include "layered/error.hpp"
#include "layered/grid.hpp"
#include "layered/state.hpp"
#include "layered/transport.hpp"

namespace layered {

struct ModelSpec {
    ProfileKind kind = ProfileKind::Sharp;
    double eps = 0.0;

    static ModelSpec sharp() { return {}; }
    static ModelSpec diffuse(double e) { return {ProfileKind::Diffuse, e}; }
    std::string name() const {
        return kind == ProfileKind::Sharp ? "sharp" : "diffuse(" + std::to_string(eps) + ")";
    }
};

/// One horizontal/vertical mode a * cos(2 pi n x / L) * sin(m pi z / H).
struct ModeTerm {
    int n = 1;
    int m = 1;
    double amplitude = 1.0;
    bool operator==(const ModeTerm&) const = default;
};

struct InitialSpec {
    enum class Kind { Separable, CustomModes };
    Kind kind = Kind::Separable;
    double amplitude = 0.2;
    int x_mode = 1;
    std::vector<ModeTerm> modes;  // CustomModes only
    bool operator==(const InitialSpec&) const = default;
};

/// Vertical shape g(z) = sin(pi z / H) q(z) of the separable initial datum,
/// with q a polynomial making g'(z_j) = 0 at every interface. q(z_j) = 1.
class SeparableShape {
public:
    explicit SeparableShape(const DomainSpec& d) : H_(d.H), z_(d.interfaces) {
        const double pi = std::numbers::pi;
        for (std::size_t j = 0; j < z_.size(); ++j) {
            const double s = -(pi / H_) * std::cos(pi * z_[j] / H_) / std::sin(pi * z_[j] / H_);
            target_.push_back(s / omega_prime(z_[j]));
        }
    }

    template <typename T>
    T q(T z) const {
        return T(1.0) + omega(z) * t(z);
    }

    template <typename T>
    T operator()(T z) const {
        using std::sin;
        return sin(std::numbers::pi * z / H_) * q(z);
    }

    /// Complex-step derivative; exact to rounding for this analytic shape.
    double derivative(double z) const {
        const double h = 1e-30;
        return std::imag((*this)(std::complex<double>(z, h))) / h;
    }

private:
    template <typename T>
    T omega(T z) const {
        T p(1.0);
        for (double zi : z_) p *= (z - zi);
        return p;
    }

    double omega_prime(double zj) const {
        double p = 1.0;
        for (double zi : z_)
            if (zi != zj) p *= (zj - zi);
        return p;
    }

    // Lagrange interpolant through (z_j, target_j).
    template <typename T>
    T t(T z) const {
        T acc(0.0);
        for (std::size_t j = 0; j < z_.size(); ++j) {
            T basis(1.0);
            for (std::size_t i = 0; i < z_.size(); ++i)
                if (i != j) basis *= (z - z_[i]) / (z_[j] - z_[i]);
            acc += target_[j] * basis;
        }
        return acc;
    }

    double H_;
    std::vector<double> z_;
    std::vector<double> target_;
};

inline Field initial_data(const InitialSpec& spec, const Grid& g) {
    const double pi = std::numbers::pi;
    Field phi = Field::centers(g);
    const auto zc = g.centers();
    if (spec.kind == InitialSpec::Kind::Separable) {
        const SeparableShape shape(g.domain());
        for (std::size_t i = 0; i < g.nz(); ++i) {
            const double gz = shape(zc[i]);
            for (std::size_t ix = 0; ix < g.nx(); ++ix)
                phi(ix, i) = spec.amplitude * std::cos(2.0 * pi * spec.x_mode * g.x(ix) / g.L()) * gz;
        }
    } else {
        for (const auto& t : spec.modes) {
            require(t.m >= 1, "initial.modes: vertical index m must be >= 1 so phi vanishes at the walls");
            for (std::size_t ix = 0; ix < g.nx(); ++ix)
                for (std::size_t i = 0; i < g.nz(); ++i)
                    phi(ix, i) += t.amplitude * std::cos(2.0 * pi * t.n * g.x(ix) / g.L()) *
                                  std::sin(t.m * pi * zc[i] / g.H());
        }
    }
    return phi;
}

/// Run failure carrying the last consistent state for inspection.
class RunAborted : public RunError {
public:
    RunAborted(const std::string& what, State last) : RunError(what), last_(std::move(last)) {}
    const State& last_state() const { return last_; }

private:
    State last_;
};

struct RunConfig {
    DomainSpec domain;
    LayerStack stack;
    ModelSpec model;
    std::size_t nx = 128;
    std::size_t nz_per_layer = 512;
    double T_final = 0.25;
    StepperConfig stepper;
    InitialSpec initial;
    std::size_t snapshots = 20;
    // Additional band widths the grid must align to (shared sweep grids).
    std::vector<double> align_eps;

    std::size_t steps() const {
        return static_cast<std::size_t>(std::llround(T_final / stepper.dt));
    }

    void validate() const {
        domain.validate();
        stack.validate(domain);
        stepper.validate();
        require(T_final > 0, "time.T must be positive");
        require(snapshots >= 1, "time.snapshots must be at least 1");
        require(std::abs(static_cast<double>(steps()) * stepper.dt - T_final) <= 1e-9 * T_final,
                "time.T must be an integer multiple of time.dt");
        require(steps() >= snapshots, "time.snapshots exceeds the number of steps");
    }

    Grid make_grid() const {
        std::vector<double> e = align_eps;
        if (model.kind == ProfileKind::Diffuse) e.push_back(model.eps);
        return build_grid(domain, nx, nz_per_layer, e);
    }

    CoefficientProfile make_profile(const Grid& g) const {
        return model.kind == ProfileKind::Sharp ? sharp_profile(stack, g)
                                                : diffuse_profile(stack, g, model.eps);
    }
};

using SnapshotSink = std::function<void(const State&)>;

/// Step indices at which snapshots are emitted: round(k * steps / count).
inline std::vector<std::size_t> snapshot_steps(std::size_t steps, std::size_t count) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k <= count; ++k)
        out.push_back(static_cast<std::size_t>(std::llround(static_cast<double>(k * steps) /
                                                             static_cast<double>(count))));
    return out;
}

inline void refresh_darcy(const PressureSolver& ps, State& s) {
    PressureSolution sol = ps.solve(s.phi);
    s.P = std::move(sol.P);
    s.u = std::move(sol.u);
    s.w = std::move(sol.w);
    s.psi.reset();
}

/// Quasi-static coupled run on a given grid/profile; snapshots go to `sink`,
/// every step (Darcy fields current) to `on_step` if set.
inline void run(const Grid& grid, const CoefficientProfile& profile, const StepperConfig& stepper,
                const Field& phi0, double T_final, std::size_t snapshots, const SnapshotSink& sink,
                const SnapshotSink& on_step = {}) {
    const auto steps = static_cast<std::size_t>(std::llround(T_final / stepper.dt));
    const auto marks = snapshot_steps(steps, snapshots);
    PressureSolver ps(grid, profile);
    TransportStepper ts(grid, profile, stepper);

    State s;
    s.t = 0.0;
    s.phi = phi0;
    std::size_t next = 0;
    for (std::size_t n = 0;; ++n) {
        s.t = static_cast<double>(n) * stepper.dt;
        refresh_darcy(ps, s);
        if (!s.u.all_finite() || !s.w.all_finite())
            throw RunAborted("non-finite velocity at t = " + std::to_string(s.t), s);
        if (on_step) on_step(s);
        while (next < marks.size() && marks[next] == n) {
            sink(s);
            ++next;
        }
        if (n == steps) break;
        try {
            ts.step(s);
        } catch (const RunError& e) {
            throw RunAborted(e.what(), s);
        }
    }
}

inline std::vector<State> run(const RunConfig& cfg) {
    cfg.validate();
    const Grid g = cfg.make_grid();
    const CoefficientProfile p = cfg.make_profile(g);
    std::vector<State> out;
    run(g, p, cfg.stepper, initial_data(cfg.initial, g), cfg.T_final, cfg.snapshots,
        [&](const State& s) { out.push_back(s); });
    return out;
}

}  // namespace layered
