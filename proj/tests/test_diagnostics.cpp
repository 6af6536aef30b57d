#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "layered/diagnostics.hpp"
#include "layered/oracle.hpp"
#include "layered/simulate.hpp"

using namespace layered;

namespace {

constexpr double pi = std::numbers::pi;
const DomainSpec kTwo{1.0, 1.0, {-0.5}};

State darcy_state(const Grid& g, const CoefficientProfile& prof, Field phi) {
    State s;
    s.phi = std::move(phi);
    const auto sol = solve_pressure(g, prof, s.phi);
    s.P = sol.P;
    s.u = sol.u;
    s.w = sol.w;
    return s;
}

Field mode_phi(const Grid& g) {
    Field f = Field::centers(g);
    for (std::size_t ix = 0; ix < g.nx(); ++ix)
        for (std::size_t i = 0; i < g.nz(); ++i)
            f(ix, i) = std::cos(2 * pi * g.x(ix)) * std::sin(pi * g.centers()[i]);
    return f;
}

}  // namespace

TEST(Traces, ZeroStateGivesZeroTraces) {
    const Grid g = build_grid(kTwo, 16, 16);
    const LayerStack st{{1.0, 0.2}, {1.0, 0.5}};
    const State s = darcy_state(g, sharp_profile(st, g), Field::centers(g));
    const TraceSet t = interface_traces(s, st, g, 0);
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
        EXPECT_EQ(t.phi_p[ix], 0.0);
        EXPECT_EQ(t.u_m[ix], 0.0);
        EXPECT_EQ(t.qK_p[ix], 0.0);
    }
    for (const auto& [name, v] : jump_residuals(t, st).entries()) EXPECT_EQ(v, 0.0) << name;
    EXPECT_THROW(interface_traces(s, st, g, 1), Error);
}

TEST(Traces, XIndependentStateHasNoHorizontalVelocity) {
    const Grid g = build_grid(kTwo, 16, 16);
    const LayerStack st{{1.0, 0.2}, {1.0, 0.5}};
    Field phi = Field::centers(g);
    for (std::size_t ix = 0; ix < g.nx(); ++ix)
        for (std::size_t i = 0; i < g.nz(); ++i) phi(ix, i) = std::sin(pi * g.centers()[i]);
    const TraceSet t = interface_traces(darcy_state(g, sharp_profile(st, g), phi), st, g, 0);
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
        EXPECT_LT(std::abs(t.u_p[ix]), 1e-14);
        EXPECT_LT(std::abs(t.u_m[ix]), 1e-14);
    }
}

TEST(Traces, MatchClosedFormGluing) {
    const Grid g = build_grid(kTwo, 16, 512);
    const LayerStack st{{2.0, 1.0}, {1.0, 1.0}};
    const State s = darcy_state(g, sharp_profile(st, g), mode_phi(g));
    const TraceSet t = interface_traces(s, st, g, 0);
    const TwoLayerMode ref(2 * pi, 1.0, -0.5, 2.0, 1.0);
    const double zi = -0.5, k = 2 * pi;
    const double P0 = ref.P(zi), w0 = ref.w(zi);
    const double dP_p = ref.dPdz(zi + 1e-14), dP_m = ref.dPdz(zi - 1e-14);
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
        const double c = std::cos(k * g.x(ix)), sn = std::sin(k * g.x(ix));
        EXPECT_NEAR(t.P_p[ix], P0 * c, 1e-4 * std::abs(P0));
        EXPECT_NEAR(t.P_m[ix], P0 * c, 1e-4 * std::abs(P0));
        EXPECT_NEAR(t.w_p[ix], w0 * c, 1e-4 * std::abs(w0));
        EXPECT_NEAR(t.w_m[ix], w0 * c, 1e-4 * std::abs(w0));
        EXPECT_NEAR(t.u_p[ix], 2.0 * k * sn * P0, 1e-4 * 2.0 * k * std::abs(P0));
        EXPECT_NEAR(t.u_m[ix], 1.0 * k * sn * P0, 1e-4 * 2.0 * k * std::abs(P0));
        EXPECT_NEAR(t.qK_p[ix], 2.0 * (dP_p + ref.phi(zi)) * c, 1e-4 * std::abs(w0));
        EXPECT_NEAR(t.qK_m[ix], 1.0 * (dP_m + ref.phi(zi)) * c, 1e-4 * std::abs(w0));
        EXPECT_NEAR(t.dPdx[ix], -k * sn * P0, 1e-4 * k * std::abs(P0));
    }
    const JumpResiduals r = jump_residuals(t, st);
    EXPECT_LE(r.u_jump_error, 0.05);
}

TEST(Traces, ContinuousCoefficientHasNoVelocityJump) {
    const Grid g = build_grid(kTwo, 16, 64);
    const LayerStack st{{1.0, 1.0}, {1.0, 1.0}};
    const TraceSet t = interface_traces(darcy_state(g, sharp_profile(st, g), mode_phi(g)), st, g, 0);
    const JumpResiduals r = jump_residuals(t, st);
    EXPECT_LT(r.velocity, 1e-3);
    double ju = 0.0;
    for (std::size_t ix = 0; ix < g.nx(); ++ix) ju = std::max(ju, std::abs(t.u_p[ix] - t.u_m[ix]));
    EXPECT_LT(ju, 1e-3 * t.scale_u);
}

TEST(Traces, EvolvedResidualsShrinkUnderRefinement) {
    std::vector<JumpResiduals> res;
    for (std::size_t n : {32u, 64u}) {
        RunConfig c;
        c.domain = kTwo;
        c.stack = LayerStack{{1.0, 0.2}, {1.0, 0.5}};
        c.nx = 32;
        c.nz_per_layer = n;
        c.T_final = 0.05;
        c.snapshots = 1;
        const auto snaps = run(c);
        const Grid g = c.make_grid();
        res.push_back(jump_residuals(interface_traces(snaps.back(), c.stack, g, 0), c.stack));
    }
    const auto a = res[0].entries(), b = res[1].entries();
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_LE(b[i].second, 5e-2) << b[i].first;
        EXPECT_LT(b[i].second, a[i].second) << b[i].first;
    }
}

TEST(ApproxStream, EqualsSharpStreamfunctionWithoutJump) {
    const double eps = 1.0 / 16;
    const Grid g = build_grid(kTwo, 32, 32, eps);
    const LayerStack st{{0.7, 0.7}, {1.0, 0.5}};
    const auto sp = sharp_profile(st, g);
    const State s = darcy_state(g, sp, mode_phi(g));
    const Field tilde = approx_streamfunction(g, s, sp, diffuse_profile(st, g, eps));
    const Field psi = solve_streamfunction(g, curl_rhs(g, s.u, s.w));
    EXPECT_LE((tilde - psi).max_abs(), 1e-12 * psi.max_abs());
}

TEST(ApproxStream, ZeroStateAndOperatorRoundTrip) {
    const double eps = 1.0 / 16;
    const Grid g = build_grid(kTwo, 32, 32, eps);
    const LayerStack st{{1.0, 0.2}, {1.0, 0.5}};
    const auto sp = sharp_profile(st, g);
    const auto dp = diffuse_profile(st, g, eps);
    EXPECT_EQ(approx_streamfunction(g, darcy_state(g, sp, Field::centers(g)), sp, dp).max_abs(), 0.0);
    const State s = darcy_state(g, sp, mode_phi(g));
    const Field rhs = approx_streamfunction_rhs(g, s, sp, dp);
    const Field psi = approx_streamfunction(g, s, sp, dp);
    const Field back = StreamSolver(g).apply(psi);
    EXPECT_LE((back - rhs).max_abs(), 1e-10 * rhs.max_abs());
    const Grid other = build_grid(kTwo, 16, 32, eps);
    EXPECT_THROW(approx_streamfunction(other, s, sp, dp), Error);
}

TEST(NearFar, BandSupportedAndConstantFields) {
    const double eps = 1.0 / 16;
    const Grid g = build_grid(kTwo, 8, 32, eps);
    Field f = Field::centers(g);
    for (std::size_t ix = 0; ix < g.nx(); ++ix)
        for (std::size_t i = 0; i < g.nz(); ++i)
            if (std::abs(g.centers()[i] + 0.5) < eps) f(ix, i) = 1.0 + 0.1 * static_cast<double>(ix);
    const auto s = near_far_split(g, f, {eps, std::sqrt(eps)});
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[0].far_sup, 0.0);
    EXPECT_EQ(s[0].far_l2, 0.0);
    EXPECT_NEAR(s[0].near_sup, 1.7, 1e-15);
    const auto c = near_far_split(g, Field::centers(g, 2.0), {eps});
    EXPECT_EQ(c[0].near_sup, c[0].far_sup);
    // L2 pieces recombine to the full norm.
    const Field one = Field::centers(g, 1.0);
    const auto o = near_far_split(g, one, {eps});
    EXPECT_NEAR(o[0].near_l2 * o[0].near_l2 + o[0].far_l2 * o[0].far_l2, 1.0, 1e-13);
    EXPECT_NEAR(o[0].near_l2 * o[0].near_l2, 2 * eps, 1e-13);
}

TEST(NearFar, TransitionWidth) {
    const Grid g = build_grid(kTwo, 8, 64);
    Field f = Field::centers(g);
    for (std::size_t ix = 0; ix < g.nx(); ++ix)
        for (std::size_t i = 0; i < g.nz(); ++i) f(ix, i) = std::abs(g.centers()[i] + 0.5) < 0.125 ? 1.0 : 0.0;
    EXPECT_NEAR(transition_width(g, f), 0.25, 1e-12);
    EXPECT_EQ(transition_width(g, Field::centers(g)), 0.0);
}
