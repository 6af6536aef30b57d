#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "layered/coeffs.hpp"
#include "layered/elliptic.hpp"
#include "layered/error.hpp"
#include "layered/fourier.hpp"
#include "layered/state.hpp"
#include "layered/tridiag.hpp"

namespace layered {

enum class Scheme { ImexEuler, ImexCnab2 };

struct StepperConfig {
    double dt = 1e-3;
    double cfl = 0.4;
    bool dealias = true;
    Scheme scheme = Scheme::ImexCnab2;
    // Manufactured-solution forcing at cell centers; unset for physical runs.
    std::function<Field(double t)> source;

    void validate() const {
        require(dt > 0 && std::isfinite(dt), "time.dt must be positive");
        require(cfl > 0 && cfl < 1, "time.cfl must lie in (0, 1)");
    }
};

/// Modes kept by the 2/3 rule: 3 n < nx.
inline bool kept_by_two_thirds(std::size_t n, std::size_t nx) { return 3 * n < nx; }

/// Conservative advection term div(u phi), spectral in x, face fluxes in z.
inline SpectralField advect_hat(const Grid& g, const Field& u, const Field& w, const Field& phi,
                                bool dealias) {
    if (u.staggering() != Staggering::Center || w.staggering() != Staggering::Face ||
        phi.staggering() != Staggering::Center || !u.fits(g) || !w.fits(g) || !phi.fits(g))
        throw Error("advect: staggering mismatch (u, phi at centers; w at faces)");
    const std::size_t nz = g.nz();
    Field flux_x = Field::centers(g);
    for (std::size_t k = 0; k < flux_x.size(); ++k) flux_x.raw()[k] = u.raw()[k] * phi.raw()[k];
    Field flux_z = center_to_face(g, phi);
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
        flux_z(ix, 0) = 0.0;
        flux_z(ix, nz) = 0.0;
        for (std::size_t f = 1; f < nz; ++f) flux_z(ix, f) *= w(ix, f);
    }
    SpectralField a = ddx(forward_x(flux_x), g.L());
    const SpectralField fz = forward_x(flux_z);
    const auto dz = g.dz();
    for (std::size_t n = 0; n < a.modes(); ++n) {
        auto col = a.column(n);
        auto fc = fz.column(n);
        if (dealias && !kept_by_two_thirds(n, g.nx())) {
            for (auto& c : col) c = 0.0;
            continue;
        }
        for (std::size_t i = 0; i < nz; ++i) col[i] += (fc[i] - fc[i + 1]) / dz[i];
    }
    return a;
}

inline Field advect(const Grid& g, const Field& u, const Field& w, const Field& phi,
                    bool dealias = true) {
    return inverse_x(advect_hat(g, u, w, phi, dealias));
}

/// Advances phi_t + div(u phi) = div(D grad phi) (+ source) with Dirichlet walls.
/// Advection is explicit, diffusion implicit; CNAB2 (default) starts with one
/// IMEX-Euler step.
class TransportStepper {
public:
    TransportStepper(const Grid& grid, const CoefficientProfile& profile, StepperConfig cfg)
        : grid_(grid), cfg_(std::move(cfg)) {
        cfg_.validate();
        if (!profile.fits(grid)) throw Error("transport: profile does not match grid");
        const std::size_t nz = grid.nz();
        const auto hc = grid.center_gap();
        cond_.resize(nz + 1);
        for (std::size_t f = 0; f <= nz; ++f) cond_[f] = profile.D_face[f] / hc[f];
        D_center_ = profile.D_center;
        euler_ = factor(1.0);
        if (cfg_.scheme == Scheme::ImexCnab2) cn_ = factor(0.5);
    }

    const StepperConfig& config() const { return cfg_; }

    double max_stable_dt(const Field& u, const Field& w) const {
        const double um = u.max_abs();
        const double wm = w.max_abs();
        double lim = INFINITY;
        if (um > 0) lim = std::min(lim, grid_.dx() / um);
        if (wm > 0) lim = std::min(lim, grid_.min_dz() / wm);
        return cfg_.cfl * lim;
    }

    /// One step from state.t using state.u, state.w as the velocity at that time.
    /// Only phi and t are updated; the Darcy fields become stale.
    void step(State& s) {
        if (!s.phi.all_finite()) throw RunError("transport: non-finite phi at t = " + std::to_string(s.t));
        const double dt = cfg_.dt;
        if (dt > max_stable_dt(s.u, s.w) * (1.0 + 1e-12))
            throw RunError("CFL violation at t = " + std::to_string(s.t) + ": dt = " + std::to_string(dt) +
                           " exceeds " + std::to_string(max_stable_dt(s.u, s.w)));

        const SpectralField phi_hat = forward_x(s.phi);
        SpectralField adv = advect_hat(grid_, s.u, s.w, s.phi, cfg_.dealias);
        const bool first = !prev_adv_.has_value();
        const bool euler = cfg_.scheme == Scheme::ImexEuler || first;
        const double theta = euler ? 1.0 : 0.5;

        std::optional<SpectralField> src_now, src_next;
        if (cfg_.source) {
            src_next = forward_x(cfg_.source(s.t + dt));
            if (!euler) src_now = forward_x(cfg_.source(s.t));
        }

        const std::size_t nz = grid_.nz();
        const auto dz = grid_.dz();
        SpectralField out(grid_.nx(), nz, Staggering::Center);
        std::vector<cplx> Lphi(nz);
        for (std::size_t n = 0; n < phi_hat.modes(); ++n) {
            const double k = wavenumber(n, grid_.L());
            auto p = phi_hat.column(n);
            auto a = adv.column(n);
            auto r = out.column(n);
            if (!euler) apply_diffusion(k, p, Lphi);
            for (std::size_t i = 0; i < nz; ++i) {
                cplx rhs = p[i] / dt;
                if (euler) {
                    rhs -= a[i];
                    if (src_next) rhs += (*src_next)(n, i);
                } else {
                    rhs += 0.5 * Lphi[i] - (1.5 * a[i] - 0.5 * (*prev_adv_)(n, i));
                    if (src_next) rhs += 0.5 * ((*src_now)(n, i) + (*src_next)(n, i));
                }
                r[i] = rhs * dz[i];
            }
            (theta == 1.0 ? euler_ : cn_)[n].solve_in_place(r);
        }
        prev_adv_ = std::move(adv);
        s.phi = inverse_x(out);
        s.t += dt;
    }

    void reset() { prev_adv_.reset(); }

    /// (L phi)_i for one mode: flux differences of D dphi/dz minus k^2 D phi.
    void apply_diffusion(double k, std::span<const cplx> p, std::span<cplx> out) const {
        const std::size_t nz = grid_.nz();
        const auto dz = grid_.dz();
        for (std::size_t i = 0; i < nz; ++i) {
            const cplx above = i > 0 ? p[i - 1] : cplx(0.0);
            const cplx below = i + 1 < nz ? p[i + 1] : cplx(0.0);
            const cplx top = cond_[i] * (above - p[i]);
            const cplx bot = cond_[i + 1] * (p[i] - below);
            out[i] = (top - bot) / dz[i] - k * k * D_center_[i] * p[i];
        }
    }

private:
    std::vector<Tridiagonal> factor(double theta) const {
        const std::size_t nz = grid_.nz();
        const auto dz = grid_.dz();
        std::vector<Tridiagonal> m(grid_.nx() / 2 + 1);
        for (std::size_t n = 0; n < m.size(); ++n) {
            const double k = wavenumber(n, grid_.L());
            std::vector<double> lo(nz), di(nz), up(nz);
            for (std::size_t i = 0; i < nz; ++i) {
                di[i] = dz[i] / cfg_.dt + theta * (k * k * D_center_[i] * dz[i] + cond_[i] + cond_[i + 1]);
                lo[i] = -theta * cond_[i];
                up[i] = -theta * cond_[i + 1];
            }
            m[n] = Tridiagonal(std::move(lo), std::move(di), std::move(up));
        }
        return m;
    }

    Grid grid_;
    StepperConfig cfg_;
    std::vector<double> cond_;
    std::vector<double> D_center_;
    std::vector<Tridiagonal> euler_;
    std::vector<Tridiagonal> cn_;
    std::optional<SpectralField> prev_adv_;
};

}  // namespace layered
