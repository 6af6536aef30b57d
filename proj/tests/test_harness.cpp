#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "layered/harness.hpp"

using namespace layered;

namespace {

SweepConfig small_sweep() {
    SweepConfig c;
    c.base.domain = DomainSpec{1.0, 1.0, {-0.5}};
    c.base.stack = LayerStack{{1.0, 0.2}, {1.0, 0.5}};
    c.base.nx = 16;
    c.base.nz_per_layer = 32;
    c.base.T_final = 0.02;
    c.base.snapshots = 4;
    c.eps = {1.0 / 8, 1.0 / 16, 1.0 / 32};
    return c;
}

const std::vector<std::string> kDiffColumns{"dphi_l2",   "dxphi_l2", "dxxphi_l2",  "gradphi_l2l2", "gradP_l2",
                                            "du_l2",     "dphi_linf", "dP_linf",   "du_far_sup",   "du_far_sup_sqrt",
                                            "du_near_sup", "du_sup"};

}  // namespace

TEST(FitRate, ExactPowerLaw) {
    std::vector<double> e{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}, v;
    for (double x : e) v.push_back(std::sqrt(x));
    const RateFit f = fit_rate(e, v);
    EXPECT_NEAR(f.exponent, 0.5, 1e-12);
    EXPECT_NEAR(f.r2, 1.0, 1e-12);
    EXPECT_NEAR(f.intercept, 0.0, 1e-12);
    EXPECT_EQ(f.points, 4u);
}

TEST(FitRate, ConstantValues) {
    const RateFit f = fit_rate({0.1, 0.05, 0.025}, {2.0, 2.0, 2.0});
    EXPECT_NEAR(f.exponent, 0.0, 1e-12);
    EXPECT_GE(f.r2, 0.0);
    EXPECT_LE(f.r2, 1.0);
}

TEST(FitRate, NoisyQuarterPower) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    std::vector<double> e, v;
    for (int j = 4; j <= 8; ++j) {
        e.push_back(std::ldexp(1.0, -j));
        v.push_back(3 * std::pow(e.back(), 0.25) * (1 + 0.05 * ud(rng)));
    }
    const RateFit f = fit_rate(e, v);
    EXPECT_GE(f.exponent, 0.2);
    EXPECT_LE(f.exponent, 0.3);
}

TEST(FitRate, FloorAndInsufficientRows) {
    EXPECT_THROW(fit_rate({0.1, 0.05}, {1.0, 0.5}), Error);
    EXPECT_THROW(fit_rate({0.1, 0.05, 0.025}, {1.0, 0.5, 1e-14}), Error);
    const RateFit f = fit_rate({0.1, 0.05, 0.025, 0.0125}, {1.0, 0.5, 0.25, 0.0});
    EXPECT_EQ(f.points, 3u);
    EXPECT_NEAR(f.exponent, 1.0, 1e-12);
}

TEST(Mms, EllipticOrders) {
    const auto r = mms_verify(MmsCase::Elliptic);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0].orders.size(), 3u);
    EXPECT_GE(r[0].min_order, 1.9);
    EXPECT_LE(r[1].errors[0], 1e-10);
}

TEST(Mms, DiffusionOrders) {
    const auto r = mms_verify(MmsCase::Diffusion);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_GE(r[0].min_order, 1.9);  // space
    EXPECT_GE(r[1].min_order, 1.8);  // time
    EXPECT_GE(r[2].min_order, 1.9);  // layered space
}

TEST(Sweep, ZeroInitialDataGivesZeroDifferences) {
    SweepConfig c = small_sweep();
    c.base.initial.amplitude = 0.0;
    const auto r = run_sweep(c);
    ASSERT_EQ(r.table.rows.size(), 3u);
    for (const auto& row : r.table.rows)
        for (double v : row.values) EXPECT_EQ(v, 0.0);
}

TEST(Sweep, IdenticalLayersGiveRoundoffDifferences) {
    SweepConfig c = small_sweep();
    c.base.stack = LayerStack{{0.6, 0.6}, {0.8, 0.8}};
    const auto r = run_sweep(c);
    for (const auto& col : kDiffColumns)
        for (double v : r.table.column(col)) EXPECT_LE(v, 1e-12) << col;
}

TEST(Sweep, DeterministicAcrossRunsAndThreads) {
    SweepConfig c = small_sweep();
    const auto a = run_sweep(c);
    const auto b = run_sweep(c);
    c.threads = 2;
    const auto t = run_sweep(c);
    ASSERT_EQ(a.table.rows.size(), b.table.rows.size());
    for (std::size_t i = 0; i < a.table.rows.size(); ++i) {
        EXPECT_EQ(a.table.rows[i].values, b.table.rows[i].values);
        EXPECT_EQ(a.table.rows[i].values, t.table.rows[i].values);
    }
}

TEST(Sweep, TableShapeAndInvariants) {
    const SweepConfig c = small_sweep();
    const auto r = run_sweep(c);
    EXPECT_FALSE(r.table.partial);
    EXPECT_EQ(r.table.columns, convergence_columns(c.alphas));
    EXPECT_EQ(r.snapshot_times.size(), c.base.snapshots + 1);
    EXPECT_EQ(r.invariants.size(), 1 + c.eps.size());
    EXPECT_EQ(r.profiles.size(), c.eps.size());
    for (const auto& row : r.table.rows)
        for (double v : row.values) {
            EXPECT_TRUE(std::isfinite(v));
            EXPECT_GE(v, 0.0);
        }
    for (const auto& inv : r.invariants) {
        EXPECT_TRUE(inv.completed);
        EXPECT_LE(inv.max_phi_linf, inv.phi0_linf * 1.001);
        EXPECT_LE(inv.max_rel_divergence, 1e-10);
        EXPECT_LE(inv.max_mirror_defect, 1e-10);
    }
    // L2-type differences shrink with eps.
    for (const char* col : {"dphi_l2", "gradP_l2", "du_l2"}) {
        const auto v = r.table.column(col);
        for (std::size_t i = 1; i < v.size(); ++i) EXPECT_LE(v[i], v[i - 1] * 1.05) << col;
    }
}

TEST(Sweep, RejectsBadConfigs) {
    SweepConfig c = small_sweep();
    c.eps = {1.0 / 16, 1.0 / 8};
    EXPECT_THROW(run_sweep(c), ConfigError);
    c = small_sweep();
    c.base.domain = DomainSpec{1.0, 1.0, {-1.0 / 3, -2.0 / 3}};
    c.base.stack = LayerStack{{1, 1, 1}, {1, 1, 1}};
    c.eps = {0.2, 0.1, 0.05};
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Jumps, SmallStudyDecreases) {
    RunConfig c;
    c.domain = DomainSpec{1.0, 1.0, {-0.5}};
    c.stack = LayerStack{{1.0, 0.2}, {1.0, 0.5}};
    c.nx = 16;
    c.nz_per_layer = 32;
    c.stepper.dt = 2e-3;
    c.T_final = 0.02;
    c.snapshots = 2;
    const auto j = run_jumps(c, {32, 64});
    ASSERT_EQ(j.rows.size(), 2u);
    EXPECT_DOUBLE_EQ(j.rows[1].dt, 1e-3);
    const auto a = j.rows[0].residuals.entries(), b = j.rows[1].residuals.entries();
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT(b[i].second, a[i].second) << a[i].first;
}

TEST(Embed, IsoRatioIncreases) {
    const auto rows = embedding_family(0.75, 3, 5);
    ASSERT_EQ(rows.size(), 3u);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GT(rows[i].iso, rows[i - 1].iso);
    for (const auto& r : rows) EXPECT_GT(r.aniso, 0.0);
    EXPECT_THROW(embedding_family(0.75, 4, 3), ConfigError);
}
