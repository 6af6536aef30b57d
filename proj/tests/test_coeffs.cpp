#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "layered/coeffs.hpp"
#include "layered/grid.hpp"

using namespace layered;

namespace {

const DomainSpec kTwo{1.0, 1.0, {-0.5}};
const LayerStack kStack{{2.0, 1.0}, {3.0, 0.5}};

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= double(x.size());
    my /= double(x.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

}  // namespace

TEST(Coeffs, SharpHarmonicMeanAtInterface) {
    const Grid g = build_grid(kTwo, 8, 16);
    const auto p = sharp_profile(kStack, g);
    EXPECT_DOUBLE_EQ(p.K_face[g.interface_face(0)], 4.0 / 3.0);
    for (std::size_t i = 0; i < g.nz(); ++i) {
        EXPECT_EQ(p.K_center[i], g.centers()[i] > -0.5 ? 2.0 : 1.0);
        EXPECT_EQ(p.dKdz_center[i], 0.0);
    }
}

TEST(Coeffs, ConstantStackIsConstant) {
    const Grid g = build_grid(kTwo, 8, 16);
    const auto p = sharp_profile(LayerStack{{0.7, 0.7}, {1.0, 1.0}}, g);
    for (double k : p.K_face) EXPECT_DOUBLE_EQ(k, 0.7);
    for (double k : p.K_center) EXPECT_DOUBLE_EQ(k, 0.7);
}

TEST(Coeffs, ThreeLayerInterfaceValues) {
    const DomainSpec d{1.0, 1.0, {-0.25, -0.75}};
    const Grid g = build_grid(d, 8, 16);
    const auto p = sharp_profile(LayerStack{{1.0, 4.0, 2.0}, {1.0, 1.0, 1.0}}, g);
    EXPECT_DOUBLE_EQ(p.K_face[g.interface_face(0)], 8.0 / 5.0);
    EXPECT_DOUBLE_EQ(p.K_face[g.interface_face(1)], 8.0 / 3.0);
}

TEST(Coeffs, DiffuseRampMidpointAndSlope) {
    const double eps = 1.0 / 32;
    const Grid g = build_grid(kTwo, 8, 32, eps);
    const auto p = diffuse_profile(kStack, g, eps);
    EXPECT_DOUBLE_EQ(p.K_face[g.interface_face(0)], 1.5);
    for (std::size_t i = 0; i < g.nz(); ++i) {
        const double z = g.centers()[i];
        if (std::abs(z + 0.5) < eps) EXPECT_DOUBLE_EQ(p.dKdz_center[i], 16.0);
        else EXPECT_EQ(p.dKdz_center[i], 0.0);
    }
    // Continuity: band edges carry the neighbouring plateau values.
    EXPECT_DOUBLE_EQ(p.K_face[g.nearest_face(-0.5 + eps)], 2.0);
    EXPECT_DOUBLE_EQ(p.K_face[g.nearest_face(-0.5 - eps)], 1.0);
    EXPECT_DOUBLE_EQ(p.D_face[g.nearest_face(-0.5 + eps)], 3.0);
}

TEST(Coeffs, DiffuseMatchesSharpOutsideBandsAndStaysInBounds) {
    const double eps = 1.0 / 16;
    const Grid g = build_grid(kTwo, 8, 32, eps);
    const auto s = sharp_profile(kStack, g);
    const auto d = diffuse_profile(kStack, g, eps);
    for (std::size_t i = 0; i < g.nz(); ++i) {
        if (std::abs(g.centers()[i] + 0.5) > eps) {
            EXPECT_EQ(d.K_center[i], s.K_center[i]);
            EXPECT_EQ(d.D_center[i], s.D_center[i]);
        }
        EXPECT_GE(d.K_center[i], 1.0);
        EXPECT_LE(d.K_center[i], 2.0);
        EXPECT_GE(d.D_center[i], 0.5);
        EXPECT_LE(d.D_center[i], 3.0);
    }
    for (std::size_t f = 0; f <= g.nz(); ++f) {
        EXPECT_GE(s.K_face[f], 1.0);
        EXPECT_LE(s.K_face[f], 2.0);
        EXPECT_GE(d.K_face[f], 1.0);
        EXPECT_LE(d.K_face[f], 2.0);
    }
}

TEST(Coeffs, CenteredRampHasZeroMeanDifference) {
    // Midpoint quadrature over the band of the discrete K^eps - K.
    const double eps = 1.0 / 32;
    const Grid g = build_grid(kTwo, 8, 64, eps);
    const auto s = sharp_profile(kStack, g);
    const auto d = diffuse_profile(kStack, g, eps);
    double integral = 0.0;
    for (std::size_t i = 0; i < g.nz(); ++i)
        if (std::abs(g.centers()[i] + 0.5) < eps) integral += (d.K_center[i] - s.K_center[i]) * g.dz()[i];
    EXPECT_NEAR(integral, 0.0, 1e-14);
}

TEST(Coeffs, L2DifferenceScalesLikeSqrtEps) {
    std::vector<double> eps{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
    std::vector<double> diff;
    const Grid g = build_grid(kTwo, 8, 512, eps);
    const auto s = sharp_profile(kStack, g);
    for (double e : eps) {
        const auto d = diffuse_profile(kStack, g, e);
        double acc = 0.0;
        for (std::size_t i = 0; i < g.nz(); ++i)
            acc += std::pow(d.K_center[i] - s.K_center[i], 2) * g.dz()[i] * g.L();
        const double l2 = std::sqrt(acc);
        EXPECT_LE(l2, std::abs(2.0 - 1.0) * std::sqrt(g.L() * 2 * e * 1));
        diff.push_back(l2);
    }
    const double slope = loglog_slope(eps, diff);
    EXPECT_GE(slope, 0.45);
    EXPECT_LE(slope, 0.55);
}

TEST(Coeffs, RejectsInvalidInputs) {
    const Grid g = build_grid(kTwo, 8, 16);
    EXPECT_THROW(sharp_profile(LayerStack{{-1.0, 1.0}, {1.0, 1.0}}, g), ConfigError);
    EXPECT_THROW(sharp_profile(LayerStack{{1.0}, {1.0}}, g), ConfigError);
    EXPECT_THROW(diffuse_profile(kStack, g, 0.3), ConfigError);
    // Band edges not on faces.
    EXPECT_THROW(diffuse_profile(kStack, g, 1.0 / 100), ConfigError);
    const Grid misaligned(kTwo, 8, {0.0, -0.3, -0.7, -1.0});
    EXPECT_THROW(sharp_profile(kStack, misaligned), ConfigError);
}
