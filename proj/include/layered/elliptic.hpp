#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "layered/coeffs.hpp"
#include "layered/error.hpp"
#include "layered/field.hpp"
#include "layered/fourier.hpp"
#include "layered/grid.hpp"
#include "layered/tridiag.hpp"

namespace layered {

/// Darcy pressure and velocity for a given buoyancy field. P and u live at
/// cell centers, the vertical flux w = -K (dP/dz + phi) at z-faces.
struct PressureSolution {
    Field P;
    Field u;
    Field w;
    SpectralField P_hat;
    SpectralField u_hat;
    SpectralField w_hat;
};

/// Linear interpolation of center values to interior faces; wall rows are 0.
inline SpectralField center_to_face(const Grid& g, const SpectralField& c) {
    const std::size_t nz = g.nz();
    const auto dz = g.dz();
    SpectralField f(c.nx(), nz + 1, Staggering::Face);
    for (std::size_t n = 0; n < c.modes(); ++n) {
        auto src = c.column(n);
        auto dst = f.column(n);
        for (std::size_t k = 1; k < nz; ++k)
            dst[k] = (src[k - 1] * dz[k] + src[k] * dz[k - 1]) / (dz[k - 1] + dz[k]);
    }
    return f;
}

inline Field center_to_face(const Grid& g, const Field& c) {
    const std::size_t nz = g.nz();
    const auto dz = g.dz();
    Field f = Field::faces(g);
    for (std::size_t ix = 0; ix < g.nx(); ++ix)
        for (std::size_t k = 1; k < nz; ++k)
            f(ix, k) = (c(ix, k - 1) * dz[k] + c(ix, k) * dz[k - 1]) / (dz[k - 1] + dz[k]);
    return f;
}

/// Face values averaged back to centers (used for reporting only).
inline Field face_to_center(const Grid& g, const Field& f) {
    Field c = Field::centers(g);
    for (std::size_t ix = 0; ix < g.nx(); ++ix)
        for (std::size_t i = 0; i < g.nz(); ++i) c(ix, i) = 0.5 * (f(ix, i) + f(ix, i + 1));
    return c;
}

/// Per-mode conservative solver for k^2 K P - d/dz(K dP/dz) = d/dz(K phi) with
/// zero flux at both walls. Matrices are factored once per profile.
class PressureSolver {
public:
    PressureSolver(const Grid& grid, const CoefficientProfile& profile)
        : grid_(grid), profile_(profile) {
        if (!profile.fits(grid)) throw Error("pressure solver: profile does not match grid");
        const std::size_t nz = grid.nz();
        const auto dz = grid.dz();
        const auto hc = grid.center_gap();
        std::vector<double> a(nz + 1, 0.0);
        for (std::size_t f = 1; f < nz; ++f) a[f] = profile.K_face[f] / hc[f];

        modes_.resize(grid.nx() / 2 + 1);
        for (std::size_t n = 1; n < modes_.size(); ++n) {
            const double k = wavenumber(n, grid.L());
            std::vector<double> lo(nz), di(nz), up(nz);
            for (std::size_t i = 0; i < nz; ++i) {
                di[i] = profile.K_center[i] * k * k * dz[i] + a[i] + a[i + 1];
                lo[i] = -a[i];
                up[i] = -a[i + 1];
            }
            modes_[n] = Tridiagonal(std::move(lo), std::move(di), std::move(up));
        }
    }

    const Grid& grid() const { return grid_; }
    const CoefficientProfile& profile() const { return profile_; }

    PressureSolution solve(const Field& phi) const {
        if (!phi.fits(grid_) || phi.staggering() != Staggering::Center)
            throw Error("solve_pressure: phi must be a center field on the solver grid");
        if (!phi.all_finite()) throw RunError("solve_pressure: non-finite phi");
        PressureSolution s;
        solve_modes(forward_x(phi), s);
        s.P = inverse_x(s.P_hat);
        s.u = inverse_x(s.u_hat);
        s.w = inverse_x(s.w_hat);
        return s;
    }

    void solve_modes(const SpectralField& phi_hat, PressureSolution& s) const {
        const std::size_t nz = grid_.nz();
        const auto dz = grid_.dz();
        const auto hc = grid_.center_gap();
        const auto& Kf = profile_.K_face;
        const auto& Kc = profile_.K_center;
        const SpectralField phi_f = center_to_face(grid_, phi_hat);

        s.P_hat = SpectralField(grid_.nx(), nz, Staggering::Center);
        s.u_hat = SpectralField(grid_.nx(), nz, Staggering::Center);
        s.w_hat = SpectralField(grid_.nx(), nz + 1, Staggering::Face);

        for (std::size_t n = 0; n < phi_hat.modes(); ++n) {
            auto P = s.P_hat.column(n);
            auto pf = phi_f.column(n);
            if (n == 0) {
                // Zero net flux in every cell: hydrostatic column, mean-zero gauge.
                P[0] = 0.0;
                for (std::size_t f = 1; f < nz; ++f) P[f] = P[f - 1] + hc[f] * pf[f];
                cplx mean = 0.0;
                for (std::size_t i = 0; i < nz; ++i) mean += P[i] * dz[i];
                mean /= grid_.H();
                for (auto& v : P) v -= mean;
            } else {
                for (std::size_t i = 0; i < nz; ++i) {
                    cplx r = 0.0;
                    if (i > 0) r += Kf[i] * pf[i];
                    if (i + 1 < nz) r -= Kf[i + 1] * pf[i + 1];
                    P[i] = r;
                }
                modes_[n].solve_in_place(P);
            }
            const cplx ik(0.0, wavenumber(n, grid_.L()));
            auto u = s.u_hat.column(n);
            auto w = s.w_hat.column(n);
            w[0] = 0.0;
            w[nz] = 0.0;
            // The n = 0 column has zero flux by construction; the formula would only add gauge rounding.
            if (n > 0)
                for (std::size_t f = 1; f < nz; ++f) w[f] = -Kf[f] * ((P[f - 1] - P[f]) / hc[f] + pf[f]);
            // u = -K ik P, taken from the cell balance the solve satisfies:
            // equal up to the solve residual, and discretely divergence-free.
            if (n == 0 || 2 * n == grid_.nx()) {
                for (std::size_t i = 0; i < nz; ++i) u[i] = -Kc[i] * ik * P[i];
            } else {
                for (std::size_t i = 0; i < nz; ++i) u[i] = -(w[i] - w[i + 1]) / (dz[i] * ik);
            }
        }
    }

private:
    Grid grid_;
    CoefficientProfile profile_;
    std::vector<Tridiagonal> modes_;
};

inline PressureSolution solve_pressure(const Grid& grid, const CoefficientProfile& profile,
                                       const Field& phi) {
    return PressureSolver(grid, profile).solve(phi);
}

struct Velocity {
    Field u;  // centers
    Field w;  // faces
};

inline Velocity recover_velocity(const PressureSolution& s) { return {s.u, s.w}; }

/// du/dx (spectral) + (w_top - w_bottom)/dz per cell.
inline Field divergence(const Grid& g, const Field& u, const Field& w) {
    if (u.staggering() != Staggering::Center || w.staggering() != Staggering::Face || !u.fits(g) ||
        !w.fits(g))
        throw Error("divergence: expects u at centers and w at faces");
    Field d = ddx(u, g.L());
    const auto dz = g.dz();
    for (std::size_t ix = 0; ix < g.nx(); ++ix)
        for (std::size_t i = 0; i < g.nz(); ++i) d(ix, i) += (w(ix, i) - w(ix, i + 1)) / dz[i];
    return d;
}

/// max|div| normalised by max velocity over the channel depth.
inline double relative_divergence(const Grid& g, const Field& u, const Field& w) {
    const double scale = std::max(u.max_abs(), w.max_abs()) / g.H();
    const double d = divergence(g, u, w).max_abs();
    return scale > 0 ? d / scale : d;
}

/// Dirichlet Poisson solver -psi'' + k^2 psi = r on z-faces, psi = 0 at walls.
class StreamSolver {
public:
    explicit StreamSolver(const Grid& grid) : grid_(grid) {
        const std::size_t nz = grid.nz();
        if (nz < 2) throw Error("stream solver: need at least two cells");
        const auto dz = grid.dz();
        const auto hc = grid.center_gap();
        modes_.resize(grid.nx() / 2 + 1);
        for (std::size_t n = 0; n < modes_.size(); ++n) {
            const double k = wavenumber(n, grid.L());
            const std::size_t m = nz - 1;
            std::vector<double> lo(m), di(m), up(m);
            for (std::size_t r = 0; r < m; ++r) {
                const std::size_t f = r + 1;
                di[r] = k * k + (1.0 / dz[f - 1] + 1.0 / dz[f]) / hc[f];
                lo[r] = -1.0 / (dz[f - 1] * hc[f]);
                up[r] = -1.0 / (dz[f] * hc[f]);
            }
            modes_[n] = Tridiagonal(std::move(lo), std::move(di), std::move(up));
        }
    }

    SpectralField solve(const SpectralField& rhs) const {
        const std::size_t nz = grid_.nz();
        SpectralField psi(rhs.nx(), nz + 1, Staggering::Face);
        for (std::size_t n = 0; n < rhs.modes(); ++n) {
            auto out = psi.column(n);
            auto in = rhs.column(n);
            for (std::size_t f = 1; f < nz; ++f) out[f] = in[f];
            modes_[n].solve_in_place(out.subspan(1, nz - 1));
            out[0] = 0.0;
            out[nz] = 0.0;
        }
        return psi;
    }

    Field solve(const Field& rhs) const {
        if (!rhs.fits(grid_) || rhs.staggering() != Staggering::Face)
            throw Error("solve_streamfunction: rhs must be a face field on the grid");
        return inverse_x(solve(forward_x(rhs)));
    }

    /// Discrete -Laplacian of a face field; wall rows of the result are 0.
    SpectralField apply(const SpectralField& psi) const {
        const std::size_t nz = grid_.nz();
        SpectralField out(psi.nx(), nz + 1, Staggering::Face);
        for (std::size_t n = 0; n < psi.modes(); ++n) {
            auto in = psi.column(n);
            std::vector<cplx> interior(in.begin() + 1, in.begin() + static_cast<long>(nz));
            auto o = out.column(n);
            modes_[n].apply(std::span<const cplx>(interior), o.subspan(1, nz - 1));
        }
        return out;
    }

    Field apply(const Field& psi) const { return inverse_x(apply(forward_x(psi))); }

private:
    Grid grid_;
    std::vector<Tridiagonal> modes_;
};

inline Field solve_streamfunction(const Grid& g, const Field& rhs) {
    return StreamSolver(g).solve(rhs);
}

/// Velocity (u, w) = (-dpsi/dz, dpsi/dx) of a face streamfunction.
inline Velocity velocity_from_streamfunction(const Grid& g, const Field& psi) {
    Velocity v{Field::centers(g), ddx(psi, g.L())};
    const auto dz = g.dz();
    for (std::size_t ix = 0; ix < g.nx(); ++ix)
        for (std::size_t i = 0; i < g.nz(); ++i) v.u(ix, i) = -(psi(ix, i) - psi(ix, i + 1)) / dz[i];
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
        v.w(ix, 0) = 0.0;
        v.w(ix, g.nz()) = 0.0;
    }
    return v;
}

/// Right side r of -Lap(psi) = r whose streamfunction reproduces (u, w):
/// r = -(dw/dx - du/dz) at interior faces.
inline Field curl_rhs(const Grid& g, const Field& u, const Field& w) {
    Field r = ddx(w, g.L());
    r *= -1.0;
    const auto hc = g.center_gap();
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
        r(ix, 0) = 0.0;
        r(ix, g.nz()) = 0.0;
        for (std::size_t f = 1; f < g.nz(); ++f) r(ix, f) += (u(ix, f - 1) - u(ix, f)) / hc[f];
    }
    return r;
}

}  // namespace layered
