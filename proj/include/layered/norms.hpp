#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "layered/coeffs.hpp"
#include "layered/elliptic.hpp"
#include "layered/error.hpp"
#include "layered/field.hpp"
#include "layered/fourier.hpp"
#include "layered/grid.hpp"

namespace layered {

// Quadrature weights: cells use dz, faces use the center gap (half cells at walls).
inline double l2_norm(const Grid& g, const Field& f) {
    const auto w = f.staggering() == Staggering::Center ? g.dz() : g.center_gap();
    double acc = 0.0;
    for (std::size_t ix = 0; ix < f.nx(); ++ix)
        for (std::size_t i = 0; i < f.rows(); ++i) acc += f(ix, i) * f(ix, i) * w[i];
    return std::sqrt(acc * g.dx());
}

inline double linf_norm(const Field& f) { return f.max_abs(); }

enum class WallCondition {
    Dirichlet,  // zero value on the wall faces (phi)
    Free        // no wall contribution (pressure)
};

/// Face differences (f_above - f_below) / gap of a center field.
inline Field dz_faces(const Grid& g, const Field& f, WallCondition wall) {
    Field d = Field::faces(g);
    const auto hc = g.center_gap();
    const std::size_t nz = g.nz();
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
        for (std::size_t k = 1; k < nz; ++k) d(ix, k) = (f(ix, k - 1) - f(ix, k)) / hc[k];
        if (wall == WallCondition::Dirichlet) {
            d(ix, 0) = -f(ix, 0) / hc[0];
            d(ix, nz) = f(ix, nz - 1) / hc[nz];
        }
    }
    return d;
}

/// Cell differences (q_top - q_bottom) / dz of a face field.
inline Field dz_centers(const Grid& g, const Field& q) {
    Field d = Field::centers(g);
    const auto dz = g.dz();
    for (std::size_t ix = 0; ix < g.nx(); ++ix)
        for (std::size_t i = 0; i < g.nz(); ++i) d(ix, i) = (q(ix, i) - q(ix, i + 1)) / dz[i];
    return d;
}

/// ||grad f||^2 with the mixed spectral-x / difference-z gradient.
inline double grad_sq(const Grid& g, const Field& f, WallCondition wall = WallCondition::Dirichlet) {
    const double gx = l2_norm(g, ddx(f, g.L()));
    const double gz = f.staggering() == Staggering::Center ? l2_norm(g, dz_faces(g, f, wall))
                                                           : l2_norm(g, dz_centers(g, f));
    return gx * gx + gz * gz;
}

inline double h1_norm(const Grid& g, const Field& f, WallCondition wall = WallCondition::Dirichlet) {
    const double l2 = l2_norm(g, f);
    return std::sqrt(l2 * l2 + grad_sq(g, f, wall));
}

/// ||sqrt(D) grad phi||.
inline double v_norm(const Grid& g, const Field& phi, const CoefficientProfile& prof) {
    const Field px = ddx(phi, g.L());
    const Field pz = dz_faces(g, phi, WallCondition::Dirichlet);
    const auto dz = g.dz();
    const auto hc = g.center_gap();
    double acc = 0.0;
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
        for (std::size_t i = 0; i < g.nz(); ++i) acc += prof.D_center[i] * px(ix, i) * px(ix, i) * dz[i];
        for (std::size_t f = 0; f <= g.nz(); ++f) acc += prof.D_face[f] * pz(ix, f) * pz(ix, f) * hc[f];
    }
    return std::sqrt(acc * g.dx());
}

/// ||phi||_V^2 + ||d_x phi||_{H1}^2 + ||D d_z phi||_{H1}^2.
inline double w_norm(const Grid& g, const Field& phi, const CoefficientProfile& prof) {
    const double v = v_norm(g, phi, prof);
    const double hx = h1_norm(g, ddx(phi, g.L()), WallCondition::Dirichlet);
    Field flux = dz_faces(g, phi, WallCondition::Dirichlet);
    for (std::size_t ix = 0; ix < g.nx(); ++ix)
        for (std::size_t f = 0; f <= g.nz(); ++f) flux(ix, f) *= prof.D_face[f];
    const double hq = h1_norm(g, flux);
    return std::sqrt(v * v + hx * hx + hq * hq);
}

namespace detail {

/// Center field resampled (linear in z) onto a uniform column of `n` cells.
inline std::vector<double> uniform_columns(const Grid& g, const Field& f, std::size_t& n) {
    const std::size_t nz = g.nz();
    if (g.uniform_z()) {
        n = nz;
        return f.raw();
    }
    n = static_cast<std::size_t>(std::ceil(g.H() / g.min_dz() - 1e-9));
    std::vector<double> out(g.nx() * n);
    const auto zc = g.centers();
    for (std::size_t r = 0; r < n; ++r) {
        const double z = -(static_cast<double>(r) + 0.5) * g.H() / static_cast<double>(n);
        std::size_t i = 0;
        while (i + 1 < nz && zc[i + 1] > z) ++i;
        for (std::size_t ix = 0; ix < g.nx(); ++ix) {
            double v;
            if (z >= zc[0]) v = f(ix, 0);
            else if (z <= zc[nz - 1]) v = f(ix, nz - 1);
            else {
                const double t = (zc[i] - z) / (zc[i] - zc[i + 1]);
                v = (1 - t) * f(ix, i) + t * f(ix, i + 1);
            }
            out[ix * n + r] = v;
        }
    }
    return out;
}

}  // namespace detail

/// Fourier (x) by cosine (z, even extension) coefficients of a center field,
/// orthonormal in z. coeff[(n * nzu + m)] for r2c modes n.
struct CosineFourier {
    std::size_t nx = 0, modes = 0, nzu = 0;
    double L = 1, H = 1;
    std::vector<cplx> coeff;
};

inline CosineFourier cosine_fourier(const Grid& g, const Field& f) {
    if (f.staggering() != Staggering::Center || !f.fits(g))
        throw Error("h_alpha_norm: expects a center field on the grid");
    CosineFourier cf;
    std::size_t n = 0;
    std::vector<double> cols = detail::uniform_columns(g, f, n);
    Field uf(g.nx(), n, Staggering::Center);
    uf.raw() = std::move(cols);
    const SpectralField s = forward_x(uf);
    cf.nx = g.nx();
    cf.modes = s.modes();
    cf.nzu = n;
    cf.L = g.L();
    cf.H = g.H();
    std::vector<double> re(cf.modes * n), im(cf.modes * n);
    for (std::size_t k = 0; k < cf.modes; ++k)
        for (std::size_t r = 0; r < n; ++r) {
            re[k * n + r] = s(k, r).real();
            im[k * n + r] = s(k, r).imag();
        }
    dct2_orthonormal(re, n, cf.modes);
    dct2_orthonormal(im, n, cf.modes);
    cf.coeff.resize(cf.modes * n);
    for (std::size_t k = 0; k < cf.modes * n; ++k) cf.coeff[k] = cplx(re[k], im[k]);
    return cf;
}

/// sum of multiplier^2 |coef|^2 with multiplier (1 + k^2 + (m pi / H)^2)^(alpha/2).
inline double h_alpha_from_coeffs(const CosineFourier& cf, double alpha) {
    require(alpha >= 0.0 && alpha <= 1.0, "h_alpha_norm: alpha must lie in [0, 1]");
    const std::size_t nyq = cf.nx / 2;
    const double dzu = cf.H / static_cast<double>(cf.nzu);
    double acc = 0.0;
    for (std::size_t n = 0; n < cf.modes; ++n) {
        const double k = wavenumber(n, cf.L);
        const double wn = (n == 0 || n == nyq) ? 1.0 : 2.0;
        for (std::size_t m = 0; m < cf.nzu; ++m) {
            const double km = static_cast<double>(m) * std::numbers::pi / cf.H;
            const double mult = alpha == 0.0 ? 1.0 : std::pow(1.0 + k * k + km * km, alpha);
            acc += wn * mult * std::norm(cf.coeff[n * cf.nzu + m]);
        }
    }
    return std::sqrt(acc * cf.L * dzu);
}

inline double h_alpha_norm(const Grid& g, const Field& f, double alpha) {
    require(alpha >= 0.0 && alpha <= 1.0, "h_alpha_norm: alpha must lie in [0, 1]");
    return h_alpha_from_coeffs(cosine_fourier(g, f), alpha);
}

/// Field with prescribed coefficients: f = sum_n sum_m c(n, m) e^{i k_n x} cos(m pi z'/H),
/// z' = -z, on a uniform-z grid. `coef(n, m)` covers r2c modes n = 0..nx/2.
template <typename Coef>
Field synthesize_cosine_fourier(const Grid& g, Coef&& coef) {
    require(g.uniform_z(), "synthesize_cosine_fourier: needs a uniform z grid");
    const std::size_t n = g.nz();
    const std::size_t modes = g.nx() / 2 + 1;
    std::vector<double> re(modes * n), im(modes * n);
    for (std::size_t k = 0; k < modes; ++k)
        for (std::size_t m = 0; m < n; ++m) {
            const cplx c = coef(k, m);
            // Orthonormal DCT-III expects the orthonormal coefficient; the basis
            // function cos(m pi z'/H) has coefficient sqrt(N / (1 + [m > 0])).
            const double s = m == 0 ? std::sqrt(static_cast<double>(n))
                                    : std::sqrt(static_cast<double>(n) / 2.0);
            re[k * n + m] = c.real() * s;
            im[k * n + m] = c.imag() * s;
        }
    dct3_orthonormal(re, n, modes);
    dct3_orthonormal(im, n, modes);
    SpectralField s(g.nx(), n, Staggering::Center);
    for (std::size_t k = 0; k < modes; ++k)
        for (std::size_t r = 0; r < n; ++r) s(k, r) = cplx(re[k * n + r], im[k * n + r]);
    return inverse_x(s);
}

struct EmbeddingRatio {
    double iso = 0.0;
    double aniso = 0.0;
};

/// ||f||_inf against ||f||_{H^a} and against ||f||_{H^a} + ||d_x f||_{H^a}.
inline EmbeddingRatio embedding_ratio(const Grid& g, const Field& f, double alpha) {
    require(alpha > 0.5 && alpha < 1.0, "embedding_ratio: alpha must lie in (1/2, 1)");
    const double h = h_alpha_norm(g, f, alpha);
    const double hx = h_alpha_norm(g, ddx(f, g.L()), alpha);
    if (!(h > 0)) throw Error("embedding_ratio: zero H^alpha norm");
    const double linf = f.max_abs();
    return {linf / h, linf / (h + hx)};
}

struct NormReport {
    double l2 = 0, h1 = 0, linf = 0, v = 0, w = 0;
    std::vector<std::pair<double, double>> h_alpha;  // (alpha, value)
    std::vector<std::pair<double, double>> aniso;    // (alpha, ||f||_a + ||f_x||_a)
};

inline NormReport norm_report(const Grid& g, const Field& phi, const CoefficientProfile& prof,
                              const std::vector<double>& alphas) {
    NormReport r;
    r.l2 = l2_norm(g, phi);
    r.h1 = h1_norm(g, phi);
    r.linf = linf_norm(phi);
    r.v = v_norm(g, phi, prof);
    r.w = w_norm(g, phi, prof);
    const CosineFourier cf = cosine_fourier(g, phi);
    const CosineFourier cfx = cosine_fourier(g, ddx(phi, g.L()));
    for (double a : alphas) {
        const double h = h_alpha_from_coeffs(cf, a);
        r.h_alpha.emplace_back(a, h);
        r.aniso.emplace_back(a, h + h_alpha_from_coeffs(cfx, a));
    }
    return r;
}

}  // namespace layered
