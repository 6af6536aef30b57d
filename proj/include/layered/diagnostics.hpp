#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "layered/coeffs.hpp"
#include "layered/elliptic.hpp"
#include "layered/error.hpp"
#include "layered/fourier.hpp"
#include "layered/grid.hpp"
#include "layered/norms.hpp"
#include "layered/state.hpp"

namespace layered {

/// One-sided limits at interface j for every x. "p" is the layer above, "m" below.
struct TraceSet {
    std::size_t interface = 0;
    double z = 0.0;
    double K_p = 0, K_m = 0, D_p = 0, D_m = 0;
    std::vector<double> phi_p, phi_m, P_p, P_m, u_p, u_m, w_p, w_m;
    std::vector<double> qK_p, qK_m;  // K (dP/dz + phi)
    std::vector<double> qD_p, qD_m;  // D dphi/dz
    std::vector<double> dPdx;
    // Field scales used to normalise residuals.
    double scale_phi = 0, scale_P = 0, scale_u = 0, scale_w = 0, scale_qD = 0;
};

namespace detail {

inline double extrapolate(double z0, double za, double va, double zb, double vb) {
    return va + (va - vb) * (z0 - za) / (za - zb);
}

/// Derivative at z0 of the quadratic through three points.
inline double quad_slope(double z0, const double (&z)[3], const double (&v)[3]) {
    double d = 0.0;
    for (int i = 0; i < 3; ++i) {
        double num = 0.0, den = 1.0;
        for (int j = 0; j < 3; ++j) {
            if (j == i) continue;
            den *= z[i] - z[j];
            double prod = 1.0;
            for (int k = 0; k < 3; ++k)
                if (k != i && k != j) prod *= z0 - z[k];
            num += prod;
        }
        d += v[i] * num / den;
    }
    return d;
}

}  // namespace detail

/// Traces of a sharp-model state, extrapolated from each side without crossing z_j.
inline TraceSet interface_traces(const State& s, const LayerStack& stack, const Grid& g, std::size_t j) {
    if (j >= g.domain().interfaces.size())
        throw Error("interface_traces: interface index " + std::to_string(j) + " out of range");
    const std::size_t f = g.interface_face(j);
    const std::size_t nz = g.nz();
    // Three cells on each side are needed for the one-sided derivative.
    if (f < 3 || f + 3 > nz) throw Error("interface_traces: layer too thin for one-sided stencils");
    const auto zc = g.centers();
    const auto zf = g.faces();
    const double z0 = zf[f];

    TraceSet t;
    t.interface = j;
    t.z = z0;
    t.K_p = stack.K[j];
    t.K_m = stack.K[j + 1];
    t.D_p = stack.D[j];
    t.D_m = stack.D[j + 1];
    const std::size_t nx = g.nx();
    for (auto* v : {&t.phi_p, &t.phi_m, &t.P_p, &t.P_m, &t.u_p, &t.u_m, &t.w_p, &t.w_m, &t.qK_p, &t.qK_m,
                    &t.qD_p, &t.qD_m})
        v->assign(nx, 0.0);

    const std::size_t a[3] = {f - 1, f - 2, f - 3};
    const std::size_t b[3] = {f, f + 1, f + 2};
    const double za[3] = {zc[a[0]], zc[a[1]], zc[a[2]]};
    const double zb[3] = {zc[b[0]], zc[b[1]], zc[b[2]]};

    auto side = [&](const Field& fld, const std::size_t (&idx)[3], const double (&z)[3], std::size_t ix) {
        return detail::extrapolate(z0, z[0], fld(ix, idx[0]), z[1], fld(ix, idx[1]));
    };
    auto slope = [&](const Field& fld, const std::size_t (&idx)[3], const double (&z)[3], std::size_t ix) {
        const double v[3] = {fld(ix, idx[0]), fld(ix, idx[1]), fld(ix, idx[2])};
        return detail::quad_slope(z0, z, v);
    };

    Field Pmid(nx, 1, Staggering::Center);
    for (std::size_t ix = 0; ix < nx; ++ix) {
        t.phi_p[ix] = side(s.phi, a, za, ix);
        t.phi_m[ix] = side(s.phi, b, zb, ix);
        t.P_p[ix] = side(s.P, a, za, ix);
        t.P_m[ix] = side(s.P, b, zb, ix);
        t.u_p[ix] = side(s.u, a, za, ix);
        t.u_m[ix] = side(s.u, b, zb, ix);
        t.w_p[ix] = detail::extrapolate(z0, zf[f - 1], s.w(ix, f - 1), zf[f - 2], s.w(ix, f - 2));
        t.w_m[ix] = detail::extrapolate(z0, zf[f + 1], s.w(ix, f + 1), zf[f + 2], s.w(ix, f + 2));
        t.qK_p[ix] = t.K_p * (slope(s.P, a, za, ix) + t.phi_p[ix]);
        t.qK_m[ix] = t.K_m * (slope(s.P, b, zb, ix) + t.phi_m[ix]);
        t.qD_p[ix] = t.D_p * slope(s.phi, a, za, ix);
        t.qD_m[ix] = t.D_m * slope(s.phi, b, zb, ix);
        Pmid(ix, 0) = 0.5 * (t.P_p[ix] + t.P_m[ix]);
    }
    const Field px = ddx(Pmid, g.L());
    t.dPdx.assign(px.raw().begin(), px.raw().end());

    t.scale_phi = s.phi.max_abs();
    t.scale_P = s.P.max_abs();
    t.scale_u = s.u.max_abs();
    t.scale_w = s.w.max_abs();
    double qd = 0.0;
    const auto hc = g.center_gap();
    const auto Dface = sharp_profile(stack, g).D_face;
    for (std::size_t ix = 0; ix < nx; ++ix)
        for (std::size_t k = 1; k < nz; ++k)
            qd = std::max(qd, std::abs(Dface[k] * (s.phi(ix, k - 1) - s.phi(ix, k)) / hc[k]));
    t.scale_qD = qd;
    return t;
}

/// Sup-over-x interface residuals, each relative to its field scale.
struct JumpResiduals {
    double velocity = 0;  // |[u] + dP/dx [K]| / max|u|
    double flux_K = 0;    // |[K (dP/dz + phi)]| / max|w|
    double flux_D = 0;    // |[D dphi/dz]| / max|D dphi/dz|
    double phi = 0;       // |[phi]| / max|phi|
    double P = 0;         // |[P]| / max|P|
    double w = 0;         // |[w]| / max|w|
    // sup|[u] + dP/dx [K]| / sup|dP/dx [K]|: error of the measured u-jump.
    double u_jump_error = 0;

    std::vector<std::pair<std::string, double>> entries() const {
        return {{"velocity", velocity}, {"flux_K", flux_K}, {"flux_D", flux_D}, {"phi", phi},
                {"P", P},               {"w", w},           {"u_jump_error", u_jump_error}};
    }
};

inline JumpResiduals jump_residuals(const TraceSet& t, const LayerStack& /*stack*/) {
    auto rel = [](double v, double scale) { return scale > 0 ? v / scale : v; };
    const double dK = t.K_p - t.K_m;
    double r_u = 0, r_qk = 0, r_qd = 0, r_phi = 0, r_P = 0, r_w = 0, ref_u = 0;
    for (std::size_t ix = 0; ix < t.dPdx.size(); ++ix) {
        r_u = std::max(r_u, std::abs((t.u_p[ix] - t.u_m[ix]) + t.dPdx[ix] * dK));
        ref_u = std::max(ref_u, std::abs(t.dPdx[ix] * dK));
        r_qk = std::max(r_qk, std::abs(t.qK_p[ix] - t.qK_m[ix]));
        r_qd = std::max(r_qd, std::abs(t.qD_p[ix] - t.qD_m[ix]));
        r_phi = std::max(r_phi, std::abs(t.phi_p[ix] - t.phi_m[ix]));
        r_P = std::max(r_P, std::abs(t.P_p[ix] - t.P_m[ix]));
        r_w = std::max(r_w, std::abs(t.w_p[ix] - t.w_m[ix]));
    }
    JumpResiduals r;
    r.velocity = rel(r_u, t.scale_u);
    r.flux_K = rel(r_qk, t.scale_w);
    r.flux_D = rel(r_qd, t.scale_qD);
    r.phi = rel(r_phi, t.scale_phi);
    r.P = rel(r_P, t.scale_P);
    r.w = rel(r_w, t.scale_w);
    r.u_jump_error = rel(r_u, ref_u);
    return r;
}

/// Right side of -Lap(psi~) = dK^eps/dz dP/dx - K dphi/dx in the u = (-psi_z, psi_x)
/// convention, built from the sharp P, phi and the diffuse dK/dz, on faces.
inline Field approx_streamfunction_rhs(const Grid& g, const State& sharp, const CoefficientProfile& sharp_prof,
                                       const CoefficientProfile& diffuse_prof) {
    if (!sharp.phi.fits(g) || !sharp_prof.fits(g) || !diffuse_prof.fits(g))
        throw Error("approx_streamfunction: state and profiles must share the grid");
    const std::size_t nz = g.nz();
    const auto hc = g.center_gap();
    const Field Pf = center_to_face(g, sharp.P);
    const Field phif = center_to_face(g, sharp.phi);
    Field q = Field::faces(g);
    for (std::size_t ix = 0; ix < g.nx(); ++ix)
        for (std::size_t f = 1; f < nz; ++f) {
            const double dK = (diffuse_prof.K_center[f - 1] - diffuse_prof.K_center[f]) / hc[f];
            q(ix, f) = -(dK * Pf(ix, f) - sharp_prof.K_face[f] * phif(ix, f));
        }
    Field r = ddx(q, g.L());
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
        r(ix, 0) = 0.0;
        r(ix, nz) = 0.0;
    }
    return r;
}

inline Field approx_streamfunction(const Grid& g, const State& sharp, const CoefficientProfile& sharp_prof,
                                   const CoefficientProfile& diffuse_prof) {
    return solve_streamfunction(g, approx_streamfunction_rhs(g, sharp, sharp_prof, diffuse_prof));
}

struct BandSplit {
    double margin = 0;
    double near_sup = 0, far_sup = 0, near_l2 = 0, far_l2 = 0;
};

namespace detail {

inline bool in_band(const Grid& g, double z, double margin) {
    for (double zj : g.domain().interfaces)
        if (std::abs(z - zj) <= margin * (1 + 1e-12)) return true;
    return false;
}

inline void accumulate_split(const Grid& g, const Field& f, double margin, BandSplit& s, double& n2, double& f2) {
    const bool centered = f.staggering() == Staggering::Center;
    const auto pos = centered ? g.centers() : g.faces();
    const auto wts = centered ? g.dz() : g.center_gap();
    for (std::size_t i = 0; i < f.rows(); ++i) {
        const bool near = in_band(g, pos[i], margin);
        for (std::size_t ix = 0; ix < f.nx(); ++ix) {
            const double v = std::abs(f(ix, i));
            if (near) {
                s.near_sup = std::max(s.near_sup, v);
                n2 += v * v * wts[i];
            } else {
                s.far_sup = std::max(s.far_sup, v);
                f2 += v * v * wts[i];
            }
        }
    }
}

}  // namespace detail

/// Sup and L2 norms inside |z - z_j| <= margin and outside, one entry per margin.
/// Several fields (e.g. both velocity components) are combined: max for sup,
/// root-sum-square for L2.
inline std::vector<BandSplit> near_far_split(const Grid& g, const std::vector<const Field*>& fields,
                                             const std::vector<double>& margins) {
    std::vector<BandSplit> out;
    for (double m : margins) {
        BandSplit s;
        s.margin = m;
        double n2 = 0, f2 = 0;
        for (const Field* f : fields) {
            if (!f->fits(g)) throw Error("near_far_split: field does not match grid");
            detail::accumulate_split(g, *f, m, s, n2, f2);
        }
        s.near_l2 = std::sqrt(n2 * g.dx());
        s.far_l2 = std::sqrt(f2 * g.dx());
        out.push_back(s);
    }
    return out;
}

inline std::vector<BandSplit> near_far_split(const Grid& g, const Field& f, const std::vector<double>& margins) {
    return near_far_split(g, std::vector<const Field*>{&f}, margins);
}

/// Thickness of the z-range around the interfaces where sup_x |f| exceeds
/// `frac` of its maximum (reported, never asserted).
inline double transition_width(const Grid& g, const Field& f, double frac = 0.1) {
    const double top = f.max_abs();
    if (top == 0) return 0.0;
    const bool centered = f.staggering() == Staggering::Center;
    const auto wts = centered ? g.dz() : g.center_gap();
    double width = 0.0;
    for (std::size_t i = 0; i < f.rows(); ++i) {
        double m = 0.0;
        for (std::size_t ix = 0; ix < f.nx(); ++ix) m = std::max(m, std::abs(f(ix, i)));
        if (m >= frac * top) width += wts[i];
    }
    return width;
}

}  // namespace layered
