#include <gtest/gtest.h>

#include <string>

#include "layered/config.hpp"

using namespace layered;

namespace {

const std::string kMinimal =
    "[domain]\n"
    "interfaces = -1/2\n"
    "[layers]\n"
    "K = 1, 0.2\n"
    "D = 1, 0.5\n";

std::string expect_config_error(const std::string& text) {
    try {
        validate_config(parse_config_text(text));
    } catch (const ConfigError& e) {
        return e.what();
    }
    ADD_FAILURE() << "accepted:\n" << text;
    return "";
}

bool mentions(const std::string& msg, const std::string& key) { return msg.find(key) != std::string::npos; }

}  // namespace

TEST(Config, MinimalParsesToDefaults) {
    const SweepConfig c = parse_config_text(kMinimal);
    EXPECT_NO_THROW(validate_config(c));
    const RunConfig& r = c.base;
    EXPECT_EQ(r.domain.L, 1.0);
    EXPECT_EQ(r.domain.H, 1.0);
    EXPECT_EQ(r.domain.interfaces, std::vector<double>{-0.5});
    EXPECT_EQ(r.stack.K, (std::vector<double>{1.0, 0.2}));
    EXPECT_EQ(r.stack.D, (std::vector<double>{1.0, 0.5}));
    EXPECT_EQ(r.nx, 128u);
    EXPECT_EQ(r.nz_per_layer, 512u);
    EXPECT_EQ(r.stepper.dt, 1e-3);
    EXPECT_EQ(r.T_final, 0.25);
    EXPECT_EQ(r.snapshots, 20u);
    EXPECT_EQ(r.stepper.scheme, Scheme::ImexCnab2);
    EXPECT_TRUE(r.stepper.dealias);
    EXPECT_EQ(r.model.kind, ProfileKind::Sharp);
    EXPECT_EQ(r.initial.kind, InitialSpec::Kind::Separable);
    EXPECT_EQ(r.initial.amplitude, 0.2);
    EXPECT_EQ(c.eps, (std::vector<double>{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256}));
    EXPECT_EQ(c.alphas, (std::vector<double>{0.6, 0.75}));
    EXPECT_EQ(c.jump_levels, (std::vector<std::size_t>{256, 512, 1024}));
}

TEST(Config, FractionsAreExact) {
    EXPECT_EQ(parse_number("k", "1/64"), 1.0 / 64);
    EXPECT_EQ(parse_number("k", " -3 / 8 "), -0.375);
    EXPECT_EQ(parse_number("k", "1/3"), 1.0 / 3);
    EXPECT_EQ(parse_number("k", "0.015625"), 1.0 / 64);
    EXPECT_EQ(parse_number("k", "+2e-3"), 2e-3);
    for (const char* bad : {"", "1/0", "abc", "1/2/3", "1e999", "0x10", "1 2"})
        EXPECT_THROW(parse_number("k", bad), ConfigError) << bad;
}

TEST(Config, NegativeKIsNamed) {
    const auto msg = expect_config_error(
        "[domain]\ninterfaces = -0.5\n[layers]\nK = 1, -1\nD = 1, 0.5\n");
    EXPECT_TRUE(mentions(msg, "layers.K[1]")) << msg;
}

TEST(Config, ErrorsNameTheKey) {
    EXPECT_TRUE(mentions(expect_config_error("[layers]\nK = 1, 0.2\nD = 1, 0.5\n"), "domain.interfaces"));
    EXPECT_TRUE(mentions(expect_config_error(kMinimal + "[grid]\nnx = many\n"), "grid.nx"));
    EXPECT_TRUE(mentions(expect_config_error(kMinimal + "[time]\ndt = 1e-3x\n"), "time.dt"));
    EXPECT_TRUE(mentions(expect_config_error(kMinimal + "[time]\ndt = -1\n"), "time.dt"));
    EXPECT_TRUE(mentions(expect_config_error(kMinimal + "[time]\nscheme = rk4\n"), "time.scheme"));
    EXPECT_TRUE(mentions(expect_config_error(kMinimal + "[grid]\nnz = 4\n"), "grid.nz"));
    EXPECT_TRUE(mentions(expect_config_error(kMinimal + "[gird]\nnx = 4\n"), "gird"));
    EXPECT_TRUE(mentions(expect_config_error(kMinimal + "[model]\nkind = diffuse\n"), "model.eps"));
    EXPECT_TRUE(mentions(expect_config_error(kMinimal + "[sweep]\neps = 1/16, 1/8\n"), "sweep.eps"));
    EXPECT_TRUE(mentions(expect_config_error(kMinimal + "[initial]\nmodes = 1:2\n"), "initial.modes"));
    EXPECT_TRUE(mentions(expect_config_error("stray = 1\n" + kMinimal), "stray"));
}

TEST(Config, EpsTooLargeForNarrowLayers) {
    const std::string narrow =
        "[domain]\ninterfaces = -0.45, -0.55\n[layers]\nK = 1, 0.2, 1\nD = 1, 0.5, 1\n"
        "[sweep]\neps = 1/4, 1/8\n";
    const auto msg = expect_config_error(narrow);
    EXPECT_TRUE(mentions(msg, "sweep.eps[0]")) << msg;
    EXPECT_TRUE(mentions(msg, "too large")) << msg;
}

TEST(Config, EchoRoundTrip) {
    const std::string full = kMinimal +
                             "[grid]\nnx = 64\nnz_per_layer = 96\n"
                             "[time]\ndt = 1/3000\nT = 0.1\nsnapshots = 5\nscheme = euler\ncfl = 0.3\ndealias = false\n"
                             "[model]\nkind = diffuse\neps = 1/48\n"
                             "[initial]\nkind = modes\nmodes = 1:1:0.1, 2:3:-1/7\n"
                             "[sweep]\neps = 1/12, 1/24, 1/48\nalphas = 0.5\nthreads = 3\nout = results dir\n"
                             "[jumps]\nlevels = 64, 128\nscale_dt = false\n";
    for (const std::string& text : {kMinimal, full}) {
        const SweepConfig c = parse_config_text(text);
        const SweepConfig back = parse_config_text(echo_config(c));
        EXPECT_TRUE(config_equal(c, back)) << echo_config(c);
        EXPECT_EQ(echo_config(back), echo_config(c));
    }
    const SweepConfig f = parse_config_text(full);
    EXPECT_EQ(f.base.initial.modes.size(), 2u);
    EXPECT_EQ(f.base.initial.modes[1].amplitude, -1.0 / 7);
    EXPECT_EQ(f.out_dir, "results dir");
    EXPECT_FALSE(config_equal(f, parse_config_text(kMinimal)));
}

TEST(Config, LoadFromFile) {
    EXPECT_THROW(load_config("/nonexistent/layered.ini"), ConfigError);
    const SweepConfig c = load_config(std::string(LAYERED_SOURCE_DIR) + "/configs/two_layer.ini");
    EXPECT_EQ(c.base.stack.K, (std::vector<double>{1.0, 0.2}));
}
