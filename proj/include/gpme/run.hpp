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
#pragma once

/// @file run.hpp
/// Command drivers behind the `gpme` executable. Each command writes its files into an
/// output directory and finishes with manifest.json, whose presence marks a complete run.
///
/// Exit codes: 0 success, 2 parse or validation error, 3 invariant violation, 4 solver abort.

#include "gpme/analysis.hpp"
#include "gpme/benchmark.hpp"
#include "gpme/output.hpp"
#include "gpme/spec_file.hpp"
#include "gpme/system_solver.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace gpme {

enum ExitCode : int { exit_ok = 0, exit_parse = 2, exit_invariant = 3, exit_abort = 4 };

struct RunManifest {
    std::string command;
    std::string spec_hash;
    std::string output_dir;
    std::vector<std::string> files;
    double wall_clock_seconds = 0.0;
    std::size_t steps = 0;
    std::optional<std::string> abort_reason;
    std::vector<std::string> violations;
    int exit_code = exit_ok;

    nlohmann::json to_json() const
    {
        nlohmann::json j;
        j["command"]            = command;
        j["spec_hash"]          = spec_hash;
        j["output_dir"]         = output_dir;
        j["files"]              = files;
        j["wall_clock_seconds"] = wall_clock_seconds;
        j["steps"]              = steps;
        j["abort_reason"]       = abort_reason ? nlohmann::json(*abort_reason) : nlohmann::json(nullptr);
        j["violations"]         = violations;
        j["exit_code"]          = exit_code;
        return j;
    }
};

struct CommandResult {
    int exit_code = exit_ok;
    std::string message; ///< one-line summary or the error text
    std::optional<RunManifest> manifest;
};

namespace detail {

class OutputWriter {
public:
    OutputWriter(std::filesystem::path dir, std::string command, std::string_view spec_text)
        : dir_(std::move(dir)), start_(std::chrono::steady_clock::now())
    {
        std::filesystem::create_directories(dir_);
        std::filesystem::remove(dir_ / "manifest.json");
        manifest_.command    = std::move(command);
        manifest_.spec_hash  = "fnv1a64:" + fnv1a_hex(spec_text);
        manifest_.output_dir = dir_.string();
    }

    void write(const std::string& name, const std::string& content)
    {
        std::ofstream out(dir_ / name, std::ios::binary);
        out << content;
        if (!out) {
            throw Error("cannot write " + (dir_ / name).string());
        }
        manifest_.files.push_back(name);
    }

    void write_run(const RunTrajectory& traj, const std::string& suffix, bool snapshots)
    {
        write("diagnostics" + suffix + ".csv", diagnostics_csv(traj));
        if (!snapshots) {
            return;
        }
        for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
            char name[64];
            std::snprintf(name, sizeof name, "snapshot_%04zu%s.csv", s, suffix.c_str());
            write(name, snapshot_csv(traj.snapshots[s], traj.grid, traj.model));
        }
    }

    RunManifest& manifest() noexcept { return manifest_; }

    CommandResult finish(int code, std::string message)
    {
        manifest_.exit_code          = code;
        manifest_.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        std::ofstream out(dir_ / "manifest.json", std::ios::binary);
        out << manifest_.to_json().dump(2) << "\n";
        return CommandResult{code, std::move(message), manifest_};
    }

private:
    std::filesystem::path dir_;
    std::chrono::steady_clock::time_point start_;
    RunManifest manifest_;
};

struct Check {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool pass = true;
};

inline ReportTable check_table(const std::vector<Check>& checks, double eps_supp)
{
    ReportTable t("invariants", {"check", "value", "limit", "pass"});
    t.param("eps_supp", eps_supp);
    for (const auto& c : checks) {
        t.row({c.name, format_number(c.value), format_number(c.limit), c.pass ? "true" : "false"});
    }
    return t;
}

/// Run-level invariants of a finished trajectory.
inline std::vector<Check> run_checks(const RunTrajectory& traj, const SystemProblem& p, const SolverConfig& cfg)
{
    std::vector<Check> out;
    const auto& st  = traj.stats;
    double w0 = 0.0;
    if (!traj.snapshots.empty()) {
        w0 = traj.snapshots.front().w().max();
    }
    const double scale = std::max(w0, st.m_bound);
    out.push_back({"min_u", st.min_u, -1e-14 * scale, st.min_u >= -1e-14 * scale});
    out.push_back({"max_w_vs_comparison_bound", st.max_w, st.m_bound + 1e-8, st.max_w <= st.m_bound + 1e-8});
    if (cfg.mode == SolverMode::Decomposed) {
        const double lim = 1e-12 * std::max(w0, scale);
        out.push_back({"decoupling_dev", st.max_decoupling_dev, lim, st.max_decoupling_dev <= lim});
    }
    bool forced = false;
    for (const auto& terms : p.forcing) {
        forced = forced || !terms.empty();
    }
    if (p.boundary == BoundaryKind::Vacuum && !forced) {
        for (std::size_t i = 0; i < st.initial_mass.size(); ++i) {
            const double lim = 1e-10 * st.initial_mass[i];
            out.push_back({"mass_drift_u" + std::to_string(i + 1), st.max_mass_drift[i], lim,
                           st.max_mass_drift[i] <= lim});
        }
    }
    const auto series = support_series(traj, cfg.eps_supp, traj.center);
    out.push_back({"containment_violations", static_cast<double>(series.containment_violations), 0.0,
                   series.containment_violations == 0});
    return out;
}

inline int record_checks(OutputWriter& out, const std::vector<Check>& checks, double eps_supp)
{
    out.write("invariants.csv", check_table(checks, eps_supp).str());
    int code = exit_ok;
    for (const auto& c : checks) {
        if (!c.pass) {
            out.manifest().violations.push_back(c.name + "=" + format_number(c.value));
            code = exit_invariant;
        }
    }
    return code;
}

inline std::filesystem::path output_dir_for(const ProblemSpec& s, const std::optional<std::filesystem::path>& over)
{
    return over ? *over : std::filesystem::path(s.out_dir);
}

} // namespace detail

/// `run`: solve the system, write snapshots, diagnostics, invariants and the resolved spec.
inline CommandResult run_command(std::string_view spec_text, const std::optional<std::filesystem::path>& out_dir = {})
{
    const ProblemSpec spec  = parse_spec(spec_text);
    const SystemProblem p   = build_problem(spec);
    const SolverConfig cfg  = build_config(spec);
    detail::OutputWriter out(detail::output_dir_for(spec, out_dir), "run", spec_text);
    out.write("resolved.spec", emit_spec(spec));
    const RunTrajectory traj = solve_system(p, cfg);
    out.write_run(traj, "", spec.write_snapshots);
    out.manifest().steps        = traj.stats.steps;
    out.manifest().abort_reason = traj.stats.abort_reason;
    const int code = detail::record_checks(out, detail::run_checks(traj, p, cfg), cfg.eps_supp);
    if (traj.aborted()) {
        return out.finish(exit_abort, "solver aborted: " + *traj.stats.abort_reason);
    }
    return out.finish(code, code == exit_ok ? "run complete" : "invariant violated");
}

/// `persistence`: run, then report the support series and any cell that leaves the support.
inline CommandResult persistence_command(std::string_view spec_text,
                                         const std::optional<std::filesystem::path>& out_dir = {})
{
    const ProblemSpec spec = parse_spec(spec_text);
    if (spec.boundary != BoundaryKind::Vacuum) {
        throw ParseError("persistence check needs kind = vacuum (Cauchy setting)");
    }
    const SystemProblem p  = build_problem(spec);
    const SolverConfig cfg = build_config(spec);
    detail::OutputWriter out(detail::output_dir_for(spec, out_dir), "persistence", spec_text);
    out.write("resolved.spec", emit_spec(spec));
    const RunTrajectory traj = solve_system(p, cfg);
    out.write_run(traj, "", spec.write_snapshots);
    out.manifest().steps        = traj.stats.steps;
    out.manifest().abort_reason = traj.stats.abort_reason;

    const auto series = support_series(traj, cfg.eps_supp, traj.center);
    std::vector<std::string> cols{"t", "radius", "cells"};
    for (std::size_t i = 1; i <= traj.species; ++i) {
        cols.push_back("radius_u" + std::to_string(i));
    }
    ReportTable st("support_series", cols);
    st.param("eps_supp", cfg.eps_supp).param("center_x", traj.center[0]).param("center_y", traj.center[1]);
    for (std::size_t k = 0; k < series.times.size(); ++k) {
        std::vector<std::string> r{format_number(series.times[k]), format_number(series.radii[k]),
                                   std::to_string(series.cells[k])};
        for (double v : series.species_radii[k]) {
            r.push_back(format_number(v));
        }
        st.row(std::move(r));
    }
    out.write("support_series.csv", st.str());

    const auto viol = check_persistence(traj, cfg.eps_supp);
    ReportTable pt("persistence", {"t_prev", "t_next", "cell", "x", "y"});
    pt.param("eps_supp", cfg.eps_supp).param("violations", std::to_string(viol.size()));
    for (const auto& v : viol) {
        const Point x = traj.grid.center(v.cell);
        pt.row({format_number(v.t_prev), format_number(v.t_next), std::to_string(v.cell), format_number(x[0]),
                format_number(x[1])});
    }
    out.write("persistence.csv", pt.str());

    auto checks = detail::run_checks(traj, p, cfg);
    checks.push_back({"persistence_violations", static_cast<double>(viol.size()), 0.0, viol.empty()});
    const int code = detail::record_checks(out, checks, cfg.eps_supp);
    if (traj.aborted()) {
        return out.finish(exit_abort, "solver aborted: " + *traj.stats.abort_reason);
    }
    return out.finish(code, viol.empty() ? "support never shrinks"
                                         : std::to_string(viol.size()) + " persistence violation(s)");
}

/// `divide-rule`: full system against its two blocks (species 1..split and the rest).
inline CommandResult divide_rule_command(std::string_view spec_text,
                                         const std::optional<std::filesystem::path>& out_dir = {},
                                         std::size_t post_window = 50)
{
    const ProblemSpec spec = parse_spec(spec_text);
    if (!spec.split) {
        throw ParseError("divide-rule needs [species] split");
    }
    const auto [hat, chk]  = split_problem(spec);
    const SolverConfig cfg = build_config(spec);
    DivideRuleReport rep   = [&] {
        try {
            return divide_rule_experiment(hat, chk, cfg, post_window);
        }
        catch (const DomainError& e) {
            throw ParseError(e.what());
        }
    }();
    detail::OutputWriter out(detail::output_dir_for(spec, out_dir), "divide-rule", spec_text);
    out.write("resolved.spec", emit_spec(spec));
    out.write_run(rep.full, "_full", spec.write_snapshots);
    out.write_run(rep.hat, "_hat", spec.write_snapshots);
    out.write_run(rep.check, "_check", spec.write_snapshots);
    out.manifest().steps = rep.steps;
    for (const auto* t : {&rep.full, &rep.hat, &rep.check}) {
        if (t->aborted()) {
            out.manifest().abort_reason = t->stats.abort_reason;
        }
    }

    const double limit = 1e-9 * rep.m_bound;
    ReportTable summary("divide_rule", {"quantity", "value"});
    summary.param("eps_supp", rep.eps_supp).param("split", std::to_string(*spec.split));
    summary.param("post_window_steps", std::to_string(post_window));
    summary.row({"initial_distance", format_number(rep.initial_distance)})
        .row({"touch_time", format_number(rep.touch_time)})
        .row({"touch_step", std::to_string(rep.touch_step)})
        .row({"steps", std::to_string(rep.steps)})
        .row({"m_bound", format_number(rep.m_bound)})
        .row({"pre_touch_max_dev", format_number(rep.pre_touch_max_dev)})
        .row({"pre_touch_limit", format_number(limit)})
        .row({"post_touch_growth", format_number(rep.post_growth)});
    out.write("divide_rule.csv", summary.str());

    ReportTable series("divide_rule_deviation", {"t", "deviation"});
    series.param("eps_supp", rep.eps_supp).param("touch_time", rep.touch_time);
    for (const auto& [t, d] : rep.post_touch_dev) {
        series.row({format_number(t), format_number(d)});
    }
    out.write("divide_rule_deviation.csv", series.str());

    const bool ok = rep.pre_touch_max_dev <= limit;
    out.write("invariants.csv",
              detail::check_table({{"pre_touch_max_dev", rep.pre_touch_max_dev, limit, ok}}, rep.eps_supp).str());
    if (out.manifest().abort_reason) {
        return out.finish(exit_abort, "solver aborted: " + *out.manifest().abort_reason);
    }
    if (!ok) {
        out.manifest().violations.push_back("pre_touch_max_dev=" + format_number(rep.pre_touch_max_dev));
        return out.finish(exit_invariant, "blocks deviate before the supports touch");
    }
    std::ostringstream msg;
    msg << "touch at t=" << format_number(rep.touch_time) << ", pre-touch deviation "
        << format_number(rep.pre_touch_max_dev);
    return out.finish(exit_ok, msg.str());
}

struct BenchmarkOptions {
    bool quick = false; ///< shorter horizons, for smoke tests
};

/// `benchmark`: Barenblatt refinement (m=2) and support growth (m=2, m=3) in 1D.
inline CommandResult benchmark_command(const std::filesystem::path& out_dir, const BenchmarkOptions& opt = {})
{
    const std::string params = opt.quick ? "quick" : "full";
    detail::OutputWriter out(out_dir, "benchmark", "benchmark " + params);

    const auto study = barenblatt_refinement(2.0, opt.quick ? 64 : 128, 3, 8.0, 1.0, 1.0);
    ReportTable rt("barenblatt_refinement", {"cells", "h", "dt", "steps", "l1_error", "ratio", "min_w", "mass_drift"});
    rt.param("m", 2.0).param("n", 1.0).param("t0", study.t0).param("T", study.T);
    const auto ratios = study.ratios();
    std::vector<detail::Check> checks;
    for (std::size_t k = 0; k < study.levels.size(); ++k) {
        const auto& l = study.levels[k];
        rt.row({std::to_string(l.cells), format_number(l.h), format_number(l.dt), std::to_string(l.steps),
                format_number(l.l1_error), k ? format_number(ratios[k - 1]) : "", format_number(l.min_w),
                format_number(l.mass_drift)});
        if (k) {
            checks.push_back({"l1_ratio_level_" + std::to_string(k), ratios[k - 1], 1.5, ratios[k - 1] >= 1.5});
        }
    }
    out.write("benchmark_refinement.csv", rt.str());

    ReportTable gt("barenblatt_growth",
                   {"m", "target", "lambda", "c1", "R0", "rel_error", "samples", "max_excess", "persistence_violations"});
    gt.param("n", 1.0).param("t0", 1.0).param("fit", "log(R-R0) vs log t, first 20% dropped");
    std::size_t steps = 0;
    struct Case {
        double m, T, half_width, h;
    };
    const std::vector<Case> cases = opt.quick ? std::vector<Case>{{2.0, 300.0, 30.0, 0.5}, {3.0, 1000.0, 30.0, 1.0}}
                                              : std::vector<Case>{{2.0, 1e4, 94.0, 0.5}, {3.0, 1e5, 80.0, 1.0}};
    for (const auto& c : cases) {
        const auto g = barenblatt_growth(c.m, 1.0, c.T, c.half_width, c.h);
        steps += g.trajectory.stats.steps;
        gt.row({format_number(c.m), format_number(g.target), format_number(g.fit.lambda), format_number(g.fit.c1),
                format_number(g.R0), format_number(g.relative_error()), std::to_string(g.fit.samples),
                format_number(g.fit.max_excess), std::to_string(g.persistence_violations)});
        const std::string tag = "m" + format_number(c.m);
        checks.push_back({"growth_rel_error_" + tag, g.relative_error(), 0.2, g.relative_error() <= 0.2});
        checks.push_back({"persistence_" + tag, static_cast<double>(g.persistence_violations), 0.0,
                          g.persistence_violations == 0});
    }
    out.write("benchmark_growth.csv", gt.str());
    out.manifest().steps = steps;
    const int code       = detail::record_checks(out, checks, 1e-8);
    return out.finish(code, code == exit_ok ? "benchmark within tolerances" : "benchmark outside tolerances");
}

} // namespace gpme
