#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "layered/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;  // stdout only
    std::string err;
};

fs::path work_dir() {
    const fs::path d = fs::temp_directory_path() / "layered_test_cli";
    fs::create_directories(d);
    return d;
}

Result cli(const std::string& args) {
    static int calls = 0;
    const fs::path errf = work_dir() / ("stderr_" + std::to_string(getpid()) + "_" + std::to_string(calls++) + ".txt");
    const std::string cmd = std::string(LAYERED_CLI_PATH) + " " + args + " 2>" + errf.string();
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream e(errf);
    r.err.assign(std::istreambuf_iterator<char>(e), {});
    return r;
}

std::string config_path(const std::string& name) { return std::string(LAYERED_SOURCE_DIR) + "/configs/" + name; }

fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = work_dir() / name;
    std::ofstream(p) << text;
    return p;
}

fs::path fresh_out(const std::string& name) {
    const fs::path d = work_dir() / name;
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST(Cli, UnknownSubcommandExits2) {
    const auto r = cli("frobnicate");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("frobnicate"), std::string::npos);
    EXPECT_EQ(cli("").code, 2);
}

TEST(Cli, FlagErrorsExit2) {
    EXPECT_EQ(cli("run").code, 2);  // --config required
    EXPECT_EQ(cli("sweep --out x").code, 2);
    EXPECT_EQ(cli("run --config " + config_path("quick.ini") + " --bogus").code, 2);
    EXPECT_EQ(cli("run --config /nonexistent.ini").code, 2);
    EXPECT_EQ(cli("run --config " + config_path("quick.ini") + " --nx abc").code, 2);
    EXPECT_EQ(cli("--help").code, 0);
}

TEST(Cli, NarrowLayersEpsTooLargeExits2) {
    const auto out = fresh_out("narrow");
    const auto r = cli("sweep --config " + config_path("narrow_layers.ini") + " --eps 1/4 --out " + out.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("too large"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("interface gap"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(out / "sweep.csv"));
}

TEST(Cli, NegativeKNamedAndExits2) {
    const auto p = write_config("negk.ini", "[domain]\ninterfaces = -1/2\n[layers]\nK = 1, -1\nD = 1, 0.5\n");
    const auto r = cli("run --config " + p.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("layers.K[1]"), std::string::npos) << r.err;
}

TEST(Cli, MmsOnDefaultsWritesCsv) {
    const auto out = fresh_out("mms");
    const auto r = cli("mms --out " + out.string());
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(out / "mms.csv"));
    EXPECT_NE(r.out.find("wrote " + (out / "mms.csv").string()), std::string::npos) << r.out;
    const auto rows = layered::read_csv((out / "mms.csv").string());
    ASSERT_GT(rows.size(), 10u);
    EXPECT_EQ(rows[0][0], "case");
}

TEST(Cli, RunWritesLoadableSnapshotsAndListsThem) {
    const auto out = fresh_out("run");
    const auto r = cli("run --config " + config_path("quick.ini") + " --eps 1/16 --out " + out.string());
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* f : {"phi_0000.plyd", "phi_0004.plyd", "P_final.plyd", "u_final.plyd", "w_final.plyd",
                          "invariants.csv", "manifest.txt"}) {
        EXPECT_TRUE(fs::exists(out / f)) << f;
        EXPECT_NE(r.out.find("wrote " + (out / f).string()), std::string::npos) << f;
    }
    const auto s = layered::load_snapshot((out / "phi_0004.plyd").string());
    EXPECT_DOUBLE_EQ(s.time, 0.04);
    EXPECT_EQ(s.field.nx(), 32u);
    const auto m = layered::read_manifest((out / "manifest.txt").string());
    bool has_eps = false, has_time = false;
    for (const auto& [k, v] : m) {
        has_eps = has_eps || (k == "model.eps" && v == "0.0625");
        has_time = has_time || k == "seconds.total";
    }
    EXPECT_TRUE(has_eps);
    EXPECT_TRUE(has_time);
}

TEST(Cli, QuietSuppressesStdout) {
    const auto out = fresh_out("quiet");
    const auto r = cli("run -q --config " + config_path("quick.ini") + " --out " + out.string());
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty()) << r.out;
    EXPECT_TRUE(fs::exists(out / "manifest.txt"));
}

TEST(Cli, RunFailureExits1) {
    const auto p = write_config("blowup.ini",
                                "[domain]\ninterfaces = -1/2\n[layers]\nK = 1, 0.2\nD = 1, 0.5\n"
                                "[grid]\nnx = 32\nnz_per_layer = 64\n"
                                "[time]\ndt = 0.01\nT = 0.1\nsnapshots = 2\n[initial]\namplitude = 500\n");
    const auto r = cli("run --config " + p.string() + " --out " + fresh_out("blowup").string());
    EXPECT_EQ(r.code, 1) << r.out << r.err;
    EXPECT_FALSE(r.err.empty());
}

TEST(Cli, SweepThenReport) {
    const auto out = fresh_out("sweep");
    const auto r = cli("sweep --config " + config_path("quick.ini") + " --out " + out.string());
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* f : {"sweep.csv", "layer_profile.csv", "invariants.csv", "manifest.txt"})
        EXPECT_NE(r.out.find("wrote " + (out / f).string()), std::string::npos) << f;
    const auto t = layered::read_sweep_csv((out / "sweep.csv").string());
    EXPECT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.rows.front().eps, 0.125);

    const auto rep = cli("report --out " + out.string());
    EXPECT_EQ(rep.code, 0);
    EXPECT_NE(rep.out.find("dphi_l2"), std::string::npos);
    EXPECT_EQ(cli("report --out " + fresh_out("empty").string()).code, 2);
}

TEST(Cli, SweepEpsOverrideUsesFractions) {
    const auto out = fresh_out("sweep_eps");
    const auto r = cli("sweep --config " + config_path("quick.ini") + " --eps 1/16,1/32,1/64 --out " + out.string());
    ASSERT_EQ(r.code, 0) << r.err;
    const auto t = layered::read_sweep_csv((out / "sweep.csv").string());
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.rows[2].eps, 1.0 / 64);
}

TEST(Cli, JumpsLayerEmbed) {
    const auto out = fresh_out("misc");
    EXPECT_EQ(cli("jumps --config " + config_path("quick.ini") + " --out " + out.string()).code, 0);
    EXPECT_EQ(layered::read_csv((out / "jumps.csv").string()).size(), 4u);
    EXPECT_EQ(cli("layer --config " + config_path("quick.ini") + " --eps 1/32 --out " + out.string()).code, 0);
    EXPECT_TRUE(fs::exists(out / "layer_profile.csv"));
    EXPECT_EQ(cli("embed --alpha 0.75 --out " + out.string()).code, 0);
    EXPECT_EQ(layered::read_csv((out / "embed.csv").string()).size(), 6u);
    EXPECT_EQ(cli("embed --alpha 1.5 --out " + out.string()).code, 2);
}
