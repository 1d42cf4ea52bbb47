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
// Acceptance suite: twelve end-to-end criteria, one PASS/FAIL line each.
// Exit status is the number of failed criteria (0 when all pass).

#include "gpme/analysis.hpp"
#include "gpme/benchmark.hpp"
#include "gpme/run.hpp"
#include "gpme/structure.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace gpme;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Suite {
    int failed = 0;

    void run(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body)
    {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = body();
        }
        catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (budget_s > 0.0 && secs > budget_s) {
            o.pass = false;
            o.detail += " (over the " + fmt(budget_s) + " s budget)";
        }
        std::printf("[%s] %2d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }

    static std::string fmt(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", v);
        return buf;
    }
};

std::string fmt(double v) { return Suite::fmt(v); }

/// Nonnegativity and mass bookkeeping collected over every run of the suite.
struct Ledger {
    double worst_min_ratio = 0.0;   ///< min over runs of min_u / M
    double worst_mass_drift = 0.0;  ///< max relative drift over unforced vacuum runs
    std::size_t runs = 0;
    std::vector<const RunTrajectory*> cauchy; ///< vacuum runs for the persistence check

    void add(const RunTrajectory& t, bool unforced_vacuum)
    {
        ++runs;
        const double M = std::max(t.stats.m_bound, 1e-300);
        worst_min_ratio = std::min(worst_min_ratio, t.stats.min_u / M);
        if (unforced_vacuum) {
            for (std::size_t i = 0; i < t.stats.initial_mass.size(); ++i) {
                if (t.stats.initial_mass[i] > 0.0) {
                    worst_mass_drift = std::max(worst_mass_drift, t.stats.max_mass_drift[i] / t.stats.initial_mass[i]);
                }
            }
        }
    }
};

Field cosine_bump(const Grid& g, double xc, double r, double a)
{
    return Field::sample(g, [&](const Point& x) {
        const double d = std::abs(x[0] - xc);
        return d < r ? 0.5 * a * (1.0 + std::cos(M_PI * d / r)) : 0.0;
    });
}

double sup_diff(std::span<const double> a, std::span<const double> b)
{
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        d = std::max(d, std::abs(a[k] - b[k]));
    }
    return d;
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

/// Three random bumps on 400 cells with the power law m = 2; T gives about 1e4 steps.
SystemProblem three_species_problem()
{
    std::mt19937_64 rng(20261018);
    std::uniform_real_distribution<double> c(-4.0, 4.0), r(0.5, 2.0), a(0.2, 1.0);
    const Grid g(20.0, 400, -10.0);
    SystemProblem p{g, IsothermModel::power_law(2.0), {}, {}, BoundaryKind::Vacuum, {}, 1.0, {}};
    for (int i = 0; i < 3; ++i) {
        const double xc = c(rng), rad = r(rng), amp = a(rng);
        p.u0.push_back(cosine_bump(g, xc, rad, amp));
    }
    Field w0(g);
    for (const auto& u : p.u0) {
        w0 += u;
    }
    p.T = 1e4 * cfl_dt(p.model, w0.max(), g, 0.5).dt;
    return p;
}

SystemProblem as_single_species(const SystemProblem& p)
{
    const ScalarProblem s = summed_problem(p);
    return SystemProblem{s.grid, s.model, {s.w0}, {}, BoundaryKind::Vacuum, {}, s.T, {}};
}

} // namespace

int main()
{
    Suite suite;
    Ledger ledger;
    std::vector<RunTrajectory> keep; // trajectories reused by later criteria
    keep.reserve(16);

    const std::vector<double> ps{0.2, 0.5, 0.8}, phis{0.0, 0.3, 0.7};

    suite.run(1, "isotherm round trip", 1.0, [&] {
        double worst = 0.0;
        for (double p : ps) {
            for (double theta : phis) {
                const auto model = IsothermModel::freundlich(p, theta);
                for (int k = 0; k < 1000; ++k) {
                    const double s = std::pow(10.0, -8.0 + 11.0 * k / 999.0);
                    worst = std::max(worst, std::abs(beta(model, phi(model, s)) - s) / std::max(1.0, s));
                }
            }
        }
        return Outcome{worst <= 1e-10, "max |beta(Phi(s)) - s|/max(1,s) = " + fmt(worst) + " (limit 1e-10)"};
    });

    suite.run(2, "structure checks", 5.0, [&] {
        int ok = 0;
        for (double p : ps) {
            for (double theta : phis) {
                const auto rep = check_structure(IsothermModel::freundlich(p, theta), 1e-4, 1e3, 2000, 1.0 / p);
                ok += rep.h1_ok && rep.a_h2_ok && rep.h3_ok && rep.sm_ok;
            }
        }
        bool exact = true;
        for (double m : {1.0, 1.5, 2.0, 3.0, 4.0}) {
            exact = exact && check_structure(IsothermModel::power_law(m), 1e-4, 1e3, 2000).a_lower == 1.0 / m;
        }
        return Outcome{ok == 9 && exact, std::to_string(ok) + "/9 Freundlich models pass H1 H2 H3 S'_m; power law a = 1/m " +
                                             (exact ? "exact" : "NOT exact")};
    });

    const SystemProblem three = three_species_problem();

    suite.run(3, "discrete decoupling", 30.0, [&] {
        double worst = 0.0, internal = 0.0, w0max = 0.0;
        std::size_t steps = 0;
        for (SolverMode mode : {SolverMode::Coupled, SolverMode::Decomposed}) {
            SolverConfig cfg;
            cfg.mode        = mode;
            cfg.n_snapshots = 100;
            SystemIntegrator sys(three, cfg);
            SolverConfig scfg = cfg;
            scfg.mode         = SolverMode::Coupled;
            SystemIntegrator scalar(as_single_species(three), scfg);
            w0max = *std::max_element(scalar.w().begin(), scalar.w().end());
            while (!sys.finished()) {
                sys.advance();
                scalar.advance();
                worst = std::max(worst, sup_diff(sys.w(), scalar.w()));
            }
            steps    = sys.total_steps();
            auto t   = std::move(sys).finish();
            internal = std::max(internal, t.stats.max_decoupling_dev);
            ledger.add(t, true);
            keep.push_back(std::move(t));
        }
        const double lim = 1e-12 * w0max;
        return Outcome{worst <= lim && internal <= lim,
                       "max |sum u_i - w_scalar| = " + fmt(worst) + ", in-run w deviation " + fmt(internal) +
                           " (limit " + fmt(lim) + "), " + std::to_string(steps) + " steps"};
    });

    suite.run(4, "mode equivalence", 0.0, [&] {
        SolverConfig a, b;
        b.mode = SolverMode::Decomposed;
        SystemIntegrator coupled(three, a), decomposed(three, b);
        const double M = coupled.trajectory().stats.m_bound;
        double worst   = 0.0;
        while (!coupled.finished()) {
            coupled.advance();
            decomposed.advance();
            for (std::size_t i = 0; i < three.species(); ++i) {
                worst = std::max(worst, sup_diff(coupled.fields()[i].values(), decomposed.fields()[i].values()));
            }
        }
        return Outcome{worst <= 1e-9 * M, "sup |u_coupled - u_decomposed| = " + fmt(worst) + " (limit " + fmt(1e-9 * M) + ")"};
    });

    suite.run(5, "Barenblatt accuracy", 120.0, [&] {
        const auto study = barenblatt_refinement(2.0, 128, 3, 8.0, 1.0, 1.0);
        const auto r     = study.ratios();
        bool ok          = true;
        std::string d    = "L1 errors";
        for (const auto& l : study.levels) {
            d += " " + fmt(l.l1_error);
        }
        d += ", ratios";
        for (double v : r) {
            d += " " + fmt(v);
            ok = ok && v >= 1.5;
        }
        return Outcome{ok, d + " (need >= 1.5)"};
    });

    suite.run(6, "support growth", 120.0, [&] {
        bool ok = true;
        std::string d;
        for (const auto& [m, T, half, h] : {std::tuple{2.0, 1e4, 94.0, 0.5}, std::tuple{3.0, 1e5, 80.0, 1.0}}) {
            auto g = barenblatt_growth(m, 1.0, T, half, h);
            ok     = ok && g.relative_error() <= 0.2 && g.fit.nondecreasing && g.fit.max_excess <= 1.1;
            d += "m=" + fmt(m) + " lambda " + fmt(g.fit.lambda) + " vs " + fmt(g.target) + " (" +
                 fmt(100 * g.relative_error()) + "%), R/R_fit <= " + fmt(g.fit.max_excess) + "; ";
            ledger.add(g.trajectory, true);
            keep.push_back(std::move(g.trajectory));
        }
        return Outcome{ok, d + "limit 20%"};
    });

    std::optional<DivideRuleReport> divide;
    suite.run(8, "divide and rule", 120.0, [&] {
        const ProblemSpec s   = parse_spec(read_file(GPME_SPEC_DIR "/two_bumps.spec"));
        const auto [hat, chk] = split_problem(s);
        divide                = divide_rule_experiment(hat, chk, build_config(s));
        const auto& r         = *divide;
        const double lim      = 1e-9 * r.m_bound;
        for (const auto* t : {&r.full, &r.hat, &r.check}) {
            ledger.add(*t, true);
        }
        const bool ok = r.touch_step > 0 && std::isfinite(r.touch_time) && r.pre_touch_max_dev <= lim && r.post_growth >= 1e3;
        return Outcome{ok, "gap " + fmt(r.initial_distance) + ", touch t=" + fmt(r.touch_time) + " (step " +
                               std::to_string(r.touch_step) + "), pre-touch dev " + fmt(r.pre_touch_max_dev) + " (limit " +
                               fmt(lim) + "), growth within 50 steps " + fmt(r.post_growth) + "x (need >= 1e3)"};
    });

    suite.run(7, "persistence", 0.0, [&] {
        // one more Cauchy run with a Freundlich isotherm and two species
        const Grid g(12.0, 120, -6.0);
        SystemProblem p{g, IsothermModel::freundlich(0.5, 0.3), {cosine_bump(g, -1.0, 1.5, 0.8), cosine_bump(g, 1.2, 0.8, 0.5)},
                        {}, BoundaryKind::Vacuum, {}, 0.5, {}};
        auto t = solve_system(p, {});
        ledger.add(t, true);
        keep.push_back(std::move(t));
        std::size_t total = 0, runs = 0;
        for (const auto& tr : keep) {
            total += check_persistence(tr, 1e-8).size();
            ++runs;
        }
        if (divide) {
            for (const auto* tr : {&divide->full, &divide->hat, &divide->check}) {
                total += check_persistence(*tr, 1e-8).size();
                ++runs;
            }
        }
        return Outcome{total == 0 && runs >= 8, std::to_string(total) + " violations over " + std::to_string(runs) +
                                                    " Cauchy runs (eps_supp 1e-8)"};
    });

    suite.run(9, "comparison bound", 0.0, [&] {
        const double M = 0.8, T = 1.0;
        const auto model = IsothermModel::power_law(2.0);
        const Grid g(1.0, 50);
        ScalarProblem p{g, model, Field(g, M), {{Field(g, M)}}, BoundaryKind::Dirichlet,
                        [&](double) { return gpme::phi(model, M); }, T, M};
        SolverConfig cfg;
        cfg.n_snapshots = 1000;
        const auto t    = solve_scalar(p, cfg);
        ledger.add(t, false);
        const auto r = comparison_monitor(t, M, T);
        return Outcome{r.pass && !t.aborted(), "sup w = " + fmt(r.sup_w) + " <= M(1+T) = " + fmt(r.bound) + " + 1e-8"};
    });

    suite.run(11, "weak residual", 0.0, [&] {
        const BumpTestFunction phi_t{{0.5, 0.0}, 3.0, 0.5, 0.45};
        std::vector<double> res;
        for (int cells : {128, 256, 512}) {
            const Grid g(16.0, cells, -8.0);
            SolverConfig cfg;
            cfg.n_snapshots = 1u << 20; // every step
            const auto t =
                solve_scalar({g, IsothermModel::power_law(2.0), Barenblatt(2.0, 1).sample(g, 1.0), {}, BoundaryKind::Vacuum, {}, 1.0, {}}, cfg);
            ledger.add(t, true);
            res.push_back(std::abs(weak_residual(t, phi_t)[0]));
        }
        const double o1 = std::log2(res[0] / res[1]), o2 = std::log2(res[1] / res[2]);
        return Outcome{o1 >= 1.0 && o2 >= 1.0, "residuals " + fmt(res[0]) + " " + fmt(res[1]) + " " + fmt(res[2]) +
                                                   ", measured orders " + fmt(o1) + " " + fmt(o2) + " (need >= 1)"};
    });

    suite.run(10, "conservation and positivity", 0.0, [&] {
        const bool ok = ledger.worst_mass_drift <= 1e-10 && ledger.worst_min_ratio >= -1e-14;
        return Outcome{ok, "max relative mass drift " + fmt(ledger.worst_mass_drift) + " (limit 1e-10), min u/M " +
                               fmt(ledger.worst_min_ratio) + " (limit -1e-14) over " + std::to_string(ledger.runs) + " runs"};
    });

    suite.run(12, "determinism", 0.0, [&] {
        const fs::path base = fs::temp_directory_path() / "gpme_acceptance";
        fs::remove_all(base);
        std::size_t same = 0, total = 0;
        for (const char* name : {"barenblatt", "freundlich_box", "two_bumps"}) {
            const std::string text = read_file(std::string(GPME_SPEC_DIR "/") + name + ".spec");
            const auto a = run_command(text, base / (std::string(name) + "_a"));
            const auto b = run_command(text, base / (std::string(name) + "_b"));
            ++total;
            same += a.exit_code == exit_ok && b.exit_code == exit_ok &&
                    read_file(base / (std::string(name) + "_a") / "diagnostics.csv") ==
                        read_file(base / (std::string(name) + "_b") / "diagnostics.csv");
        }
        fs::remove_all(base);
        return Outcome{same == total, std::to_string(same) + "/" + std::to_string(total) +
                                          " shipped specs reproduce diagnostics.csv byte for byte"};
    });

    std::printf("%d criteria failed\n", suite.failed);
    return suite.failed;
}
