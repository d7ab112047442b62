/*
 * Copyright 2026 The amtj Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "amtj/cli.hpp"
#include "amtj/reports.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

using namespace amtj;
namespace fs = std::filesystem;

namespace {

class TempDir {
  public:
    TempDir() {
        const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
        path_ = fs::temp_directory_path() / (std::string("amtj_") + info->test_suite_name() + "_" + info->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    fs::path operator/(const std::string &name) const { return path_ / name; }
    std::size_t entries() const {
        return std::size_t(std::distance(fs::directory_iterator(path_), fs::directory_iterator()));
    }

  private:
    fs::path path_;
};

std::string slurp(const fs::path &p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string &s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string line; std::getline(is, line);)
        out.push_back(line);
    return out;
}

struct RunResult {
    int code;
    std::string out, err;
};

RunResult run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

} // namespace

TEST(Sweep, CsvShapeAndReduction) {
    const auto rows = reports::energy_sweep({5, 10, 12.5, 25, 50}, reports::default_calibration());
    ASSERT_EQ(rows.size(), 5u);
    for (const auto &r : rows)
        EXPECT_NEAR(r.reduction_pct, 100.0 * (r.cmos_pj - r.adiabatic_pj) / r.cmos_pj, 1e-12);
    EXPECT_GE(rows[3].reduction_pct, 60.0);
    const auto lines = lines_of(reports::sweep_csv(rows));
    ASSERT_EQ(lines.size(), 6u);
    EXPECT_EQ(lines[0], "freq_mhz,cmos_pj,adiabatic_pj,reduction_pct");
    for (std::size_t i = 1; i < lines.size(); ++i)
        EXPECT_EQ(std::count(lines[i].begin(), lines[i].end(), ','), 3);
    EXPECT_THROW(reports::energy_sweep({}, reports::default_calibration()), InvalidArgument);
}

TEST(Sweep, SvgIsSelfContained) {
    reports::Series s{"a", {1, 2, 3}, {3, 1, 2}, "", 1.5};
    const std::string svg = reports::line_chart_svg("t", "x", "y", {s});
    const auto open = svg.find("<svg");
    ASSERT_NE(open, std::string::npos);
    EXPECT_EQ(svg.rfind("</svg>"), svg.find_last_not_of(" \n") - 5);
    EXPECT_EQ(svg.find("href"), std::string::npos);
    EXPECT_EQ(svg.find("<script"), std::string::npos);
}

TEST(Sweep, EmitIsDeterministic) {
    TempDir dir;
    const auto rows = reports::energy_sweep({5, 10, 12.5, 25, 50}, reports::default_calibration());
    reports::emit_energy_sweep(rows, dir / "a.csv", dir / "a.svg");
    reports::emit_energy_sweep(rows, dir / "b.csv", dir / "b.svg");
    EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
    EXPECT_EQ(slurp(dir / "a.svg"), slurp(dir / "b.svg"));
    EXPECT_EQ(dir.entries(), 4u); // no temporaries left behind
}

TEST(Report, EnvelopeAndHash) {
    nlohmann::ordered_json cfg{{"a", 1}, {"b", "x"}};
    const auto rep = reports::make_report("cmd", cfg, {{"r", 2}});
    EXPECT_EQ(rep["command"], "cmd");
    EXPECT_EQ(rep["tool_version"], reports::tool_version());
    EXPECT_EQ(rep["config_hash"], reports::config_hash(cfg));
    EXPECT_EQ(reports::config_hash(cfg).size(), 16u);
    nlohmann::ordered_json other{{"a", 2}, {"b", "x"}};
    EXPECT_NE(reports::config_hash(cfg), reports::config_hash(other));
}

TEST(CpaPlots, TrueGuessCarriesGlobalPeak) {
    TempDir dir;
    auto cfg = trace::FamilyCfg::defaults(trace::Family::Cmos);
    const present::Key80 key{0x0123456789ABCDEFull, 0x4567};
    const auto ts = trace::gen_trace_set(1024, key, cfg, 2);
    const auto res = cpa::cpa_nibble(ts, 5);
    const auto prog = cpa::cpa_progression(ts, 5, 256);
    const std::uint8_t k = present::nibble(key.hi, 5);
    const auto files = reports::emit_cpa_plots(res, prog, dir / "n5", k);
    EXPECT_EQ(files.size(), 4u);
    for (const auto &f : files)
        EXPECT_TRUE(fs::exists(f)) << f;

    const auto lines = lines_of(slurp(dir / "n5_corr.csv"));
    ASSERT_EQ(lines.size(), 1 + 16 * ts.meta.n_samples);
    double best = -1;
    int best_guess = -1;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        int g = 0;
        std::size_t s = 0;
        double r = 0;
        ASSERT_EQ(std::sscanf(lines[i].c_str(), "%d,%zu,%lf", &g, &s, &r), 3);
        if (std::abs(r) > best) {
            best = std::abs(r);
            best_guess = g;
        }
    }
    EXPECT_EQ(best_guess, k);
    EXPECT_EQ(lines_of(slurp(dir / "n5_progression.csv")).size(), 1 + prog.sizes.size());
}

TEST(Cli, PresentVector) {
    const auto r = run_cli({"present", "--encrypt", "--key", "FFFFFFFFFFFFFFFFFFFF", "--pt", "FFFFFFFFFFFFFFFF"});
    EXPECT_EQ(r.code, cli::kExitOk);
    EXPECT_EQ(r.out, "3333DCD3213210D2\n");
}

TEST(Cli, VersionAndHelp) {
    EXPECT_EQ(run_cli({"--version"}).code, 0);
    const auto h = run_cli({"--help"});
    EXPECT_EQ(h.code, 0);
    EXPECT_NE(h.out.find("gen-traces"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run_cli({}).code, cli::kExitUsage);
    EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kExitUsage);
    EXPECT_EQ(run_cli({"present", "--encrypt", "--key", "00000000000000000000"}).code, cli::kExitUsage);
    EXPECT_EQ(run_cli({"present", "--encrypt", "--key", "00", "--pt", "0000000000000000"}).code, cli::kExitUsage);
    EXPECT_EQ(run_cli({"sim-energy", "--family", "ttl"}).code, cli::kExitUsage);
    EXPECT_EQ(run_cli({"cpa", "--traces", "/nonexistent/file.amtj"}).code, cli::kExitUsage);
    const auto r = run_cli({"sim-energy", "--bogus"});
    EXPECT_EQ(r.code, cli::kExitUsage);
    EXPECT_FALSE(r.err.empty());
}

TEST(Cli, UsageErrorWritesNothing) {
    TempDir dir;
    const auto r = run_cli({"sim-energy", "--svg", (dir / "x.svg").string()});
    EXPECT_EQ(r.code, cli::kExitUsage);
    const auto g = run_cli({"gen-traces", "--family", "cmos", "--traces", "16", "--noise", "-1", "--out",
                            (dir / "t.amtj").string()});
    EXPECT_EQ(g.code, cli::kExitUsage);
    EXPECT_EQ(dir.entries(), 0u);
}

TEST(Cli, CorruptTraceFileIsRuntimeError) {
    TempDir dir;
    {
        std::ofstream os(dir / "bad.amtj", std::ios::binary);
        os << "NOPE not a trace file";
    }
    const auto r = run_cli({"cpa", "--traces", (dir / "bad.amtj").string()});
    EXPECT_EQ(r.code, cli::kExitRuntime);
    EXPECT_NE(r.err.find("not an amtj trace file"), std::string::npos);
}

TEST(Cli, SimEnergyCmosRows) {
    TempDir dir;
    const auto r = run_cli({"sim-energy", "--family", "cmos", "--csv", (dir / "s.csv").string(), "--json",
                            (dir / "s.json").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines_of(r.out).size(), 6u);
    EXPECT_EQ(lines_of(slurp(dir / "s.csv")).size(), 6u);
    const auto j = nlohmann::json::parse(slurp(dir / "s.json"));
    EXPECT_EQ(j["command"], "sim-energy");
    EXPECT_TRUE(j.contains("config_hash"));
}

TEST(Cli, EndToEndCmosRecoversKey) {
    TempDir dir;
    const auto t = dir / "c.amtj";
    auto g = run_cli({"gen-traces", "--family", "cmos", "--traces", "512", "--seed", "3", "--key",
                      "00112233445566778899", "--out", t.string()});
    ASSERT_EQ(g.code, 0) << g.err;
    const auto c = run_cli({"cpa", "--traces", t.string(), "--json", (dir / "r.json").string(), "--plot-prefix",
                            (dir / "p").string()});
    ASSERT_EQ(c.code, 0) << c.err;
    const auto j = nlohmann::json::parse(slurp(dir / "r.json"));
    EXPECT_TRUE(j["results"]["success"].get<bool>());
    EXPECT_EQ(j["results"]["recovered_roundkey"], "0011223344556677");
    EXPECT_TRUE(fs::exists(dir / "p_corr.svg"));
}

TEST(Cli, EndToEndAdiabaticSmallSetFails) {
    TempDir dir;
    const auto t = dir / "a.amtj";
    ASSERT_EQ(run_cli({"gen-traces", "--family", "adiabatic-mtj", "--traces", "100", "--seed", "4", "--out",
                       t.string()})
                  .code,
              0);
    const auto c = run_cli({"cpa", "--traces", t.string(), "--json", (dir / "r.json").string()});
    ASSERT_EQ(c.code, 0) << c.err;
    const auto j = nlohmann::json::parse(slurp(dir / "r.json"));
    EXPECT_FALSE(j["results"]["success"].get<bool>());
}

TEST(Cli, WithheldKeyReportsUnknownSuccess) {
    TempDir dir;
    const auto t = dir / "w.amtj";
    ASSERT_EQ(run_cli({"gen-traces", "--family", "cmos", "--traces", "64", "--withhold-key", "--out", t.string()})
                  .code,
              0);
    const auto c = run_cli({"cpa", "--traces", t.string(), "--json", (dir / "r.json").string()});
    ASSERT_EQ(c.code, 0) << c.err;
    EXPECT_NE(c.out.find("unknown"), std::string::npos);
    const auto j = nlohmann::json::parse(slurp(dir / "r.json"));
    EXPECT_FALSE(j["results"].contains("success"));
}

TEST(Cli, GenTracesIsDeterministic) {
    TempDir dir;
    for (const char *name : {"a", "b"})
        ASSERT_EQ(run_cli({"gen-traces", "--family", "adiabatic-mtj", "--traces", "20", "--seed", "9", "--noise",
                           "1e-6", "--out", (dir / (std::string(name) + ".amtj")).string(), "--csv",
                           (dir / (std::string(name) + ".csv")).string()})
                      .code,
                  0);
    EXPECT_EQ(slurp(dir / "a.amtj"), slurp(dir / "b.amtj"));
    EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
}

TEST(Cli, MetricsCustomList) {
    const auto r = run_cli({"metrics", "--energies-fj", "7.1,102.0"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("NED 93.04%"), std::string::npos) << r.out;
}
