/*
 * Copyright (C) 2026 The gpme-system authors
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
#include "gpme/run.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gpme;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("gpme_test_run_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string spec(const std::string& name) { return read_file(std::string(GPME_SPEC_DIR "/") + name + ".spec"); }

const char* small_cauchy = R"(
[domain]
extent = 12
cells = 96
T = 0.5
[isotherm]
isotherm = freundlich p=0.5 phi=0.2
[species]
count = 2
[initial]
u1 = bump center=-1 radius=1.5 height=0.8
u2 = bump center=1 radius=1 height=0.4 profile=indicator
[solver]
mode = decomposed
n_snapshots = 5
)";

} // namespace

TEST(RunCommand, WritesEveryFileAndTheManifestLast)
{
    const fs::path dir = scratch("files");
    const auto r       = run_command(spec("barenblatt"), dir);
    ASSERT_EQ(r.exit_code, exit_ok) << r.message;
    ASSERT_TRUE(r.manifest.has_value());
    const auto j = nlohmann::json::parse(read_file(dir / "manifest.json"));
    EXPECT_EQ(j["command"], "run");
    EXPECT_EQ(j["exit_code"], 0);
    EXPECT_TRUE(j["abort_reason"].is_null());
    EXPECT_EQ(j["spec_hash"], "fnv1a64:" + fnv1a_hex(spec("barenblatt")));
    EXPECT_GT(j["steps"].get<std::size_t>(), 0u);
    const auto manifest_time = fs::last_write_time(dir / "manifest.json");
    for (const auto& f : j["files"]) {
        const fs::path p = dir / f.get<std::string>();
        ASSERT_TRUE(fs::exists(p)) << p;
        EXPECT_LE(fs::last_write_time(p), manifest_time);
    }
    EXPECT_TRUE(fs::exists(dir / "snapshot_0000.csv"));
    EXPECT_TRUE(fs::exists(dir / "snapshot_0020.csv"));
    EXPECT_TRUE(parse_spec(read_file(dir / "resolved.spec")) == parse_spec(spec("barenblatt")));
}

TEST(RunCommand, SnapshotAndDiagnosticsLayout)
{
    const fs::path dir = scratch("layout");
    ASSERT_EQ(run_command(small_cauchy, dir).exit_code, exit_ok);
    std::istringstream snap(read_file(dir / "snapshot_0000.csv"));
    std::string header, row;
    std::getline(snap, header);
    EXPECT_EQ(header, "# t=0 dim=1 cells=96 h=0.125 species=2");
    std::getline(snap, row);
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), 5);
    std::istringstream diag(read_file(dir / "diagnostics.csv"));
    std::getline(diag, header);
    EXPECT_EQ(header, "t,mass,sup_w,inf_w,energy_Psi,cum_grad_energy,support_radius,"
                      "mass_1,sup_1,grad_energy_rho_u1,mass_2,sup_2,grad_energy_rho_u2");
    const std::string inv = read_file(dir / "invariants.csv");
    EXPECT_EQ(inv.rfind("# report=invariants params=eps_supp=1e-08\n", 0), 0u);
    EXPECT_EQ(inv.find(",false"), std::string::npos) << inv;
}

TEST(RunCommand, RerunsAreBitwiseIdentical)
{
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    ASSERT_EQ(run_command(small_cauchy, a).exit_code, exit_ok);
    ASSERT_EQ(run_command(small_cauchy, b).exit_code, exit_ok);
    EXPECT_EQ(read_file(a / "diagnostics.csv"), read_file(b / "diagnostics.csv"));
    EXPECT_EQ(read_file(a / "snapshot_0005.csv"), read_file(b / "snapshot_0005.csv"));
}

TEST(RunCommand, CollarAbortIsReportedInTheManifest)
{
    std::string text = small_cauchy;
    text.replace(text.find("T = 0.5"), 7, "T = 50");
    const fs::path dir = scratch("abort");
    const auto r       = run_command(text, dir);
    EXPECT_EQ(r.exit_code, exit_abort);
    const auto j = nlohmann::json::parse(read_file(dir / "manifest.json"));
    EXPECT_EQ(j["exit_code"], exit_abort);
    EXPECT_NE(j["abort_reason"].get<std::string>().find("collar"), std::string::npos);
}

TEST(RunCommand, ParseErrorsThrowBeforeAnyOutput)
{
    std::string text = small_cauchy;
    text.replace(text.find("p=0.5"), 5, "p=1.5");
    const fs::path dir = scratch("parse");
    EXPECT_THROW(run_command(text, dir), ParseError);
    EXPECT_FALSE(fs::exists(dir));
}

TEST(RunCommand, FailedChecksGiveInvariantExitCode)
{
    const fs::path dir = scratch("checks");
    detail::OutputWriter out(dir, "run", "x");
    const int code = detail::record_checks(out, {{"ok", 0.0, 1.0, true}, {"broken", 2.0, 1.0, false}}, 1e-8);
    EXPECT_EQ(code, exit_invariant);
    ASSERT_EQ(out.manifest().violations.size(), 1u);
    EXPECT_EQ(out.manifest().violations[0], "broken=2");
}

TEST(DivideRuleCommand, WritesThreeTrajectoriesAndTheReport)
{
    const fs::path dir = scratch("divide");
    const auto r       = divide_rule_command(spec("two_bumps"), dir);
    ASSERT_EQ(r.exit_code, exit_ok) << r.message;
    for (const char* suffix : {"_full", "_hat", "_check"}) {
        EXPECT_TRUE(fs::exists(dir / ("diagnostics" + std::string(suffix) + ".csv")));
        EXPECT_TRUE(fs::exists(dir / ("snapshot_0000" + std::string(suffix) + ".csv")));
    }
    const std::string rep = read_file(dir / "divide_rule.csv");
    EXPECT_EQ(rep.rfind("# report=divide_rule params=", 0), 0u);
    EXPECT_NE(rep.find("touch_time,0.33"), std::string::npos) << rep;
    EXPECT_TRUE(fs::exists(dir / "divide_rule_deviation.csv"));
    EXPECT_THROW(divide_rule_command(small_cauchy, scratch("nosplit")), ParseError);
}

TEST(PersistenceCommand, ReportsSupportSeries)
{
    const fs::path dir = scratch("persist");
    const auto r       = persistence_command(small_cauchy, dir);
    ASSERT_EQ(r.exit_code, exit_ok) << r.message;
    EXPECT_NE(read_file(dir / "persistence.csv").find("violations=0"), std::string::npos);
    EXPECT_NE(read_file(dir / "support_series.csv").find("t,radius,cells,radius_u1,radius_u2"), std::string::npos);
    EXPECT_THROW(persistence_command(spec("freundlich_box"), scratch("persist_box")), ParseError);
}

TEST(BenchmarkCommand, QuickSuitePasses)
{
    const fs::path dir = scratch("bench");
    const auto r       = benchmark_command(dir, {true});
    EXPECT_EQ(r.exit_code, exit_ok) << r.message;
    EXPECT_TRUE(fs::exists(dir / "benchmark_refinement.csv"));
    EXPECT_TRUE(fs::exists(dir / "benchmark_growth.csv"));
}

#ifdef GPME_CLI_PATH
namespace {
int cli(const std::string& args)
{
    const std::string cmd = std::string(GPME_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status      = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
} // namespace

TEST(Cli, ExitCodes)
{
    const fs::path dir = scratch("cli");
    fs::create_directories(dir);
    EXPECT_EQ(cli("run " GPME_SPEC_DIR "/barenblatt.spec --out " + (dir / "ok").string()), 0);
    EXPECT_EQ(cli("check-isotherm --p 0.5 --phi 0.5"), 0);
    EXPECT_EQ(cli("check-isotherm --p 1.5 --phi 0.5"), 2);
    EXPECT_EQ(cli("run " + (dir / "missing.spec").string()), 2);
    EXPECT_EQ(cli("frobnicate"), 2);

    std::string text = small_cauchy;
    std::ofstream(dir / "bad.spec") << text.replace(text.find("height=0.8"), 10, "height=-1");
    EXPECT_EQ(cli("run " + (dir / "bad.spec").string() + " --out " + (dir / "bad").string()), 2);

    text = small_cauchy;
    std::ofstream(dir / "long.spec") << text.replace(text.find("T = 0.5"), 7, "T = 50");
    EXPECT_EQ(cli("run " + (dir / "long.spec").string() + " --out " + (dir / "long").string()), 4);
}
#endif
