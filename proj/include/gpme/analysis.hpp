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

/// @file analysis.hpp
/// Free-boundary experiments and diagnostics over finished trajectories: support growth,
/// persistence, divide-and-rule, energy norms, weak-form residuals, Hoelder quotients and
/// the comparison bound. Supports are always eps_supp superlevel sets.

#include "gpme/errors.hpp"
#include "gpme/grid.hpp"
#include "gpme/system_solver.hpp"
#include "gpme/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <sstream>
#include <vector>

namespace gpme {

struct SupportSeries {
    std::vector<double> times;
    std::vector<double> radii;
    std::vector<std::size_t> cells;
    std::vector<std::vector<double>> species_radii; ///< [snapshot][species]
    std::size_t containment_violations = 0;         ///< cells in supp u_i but not in supp w
};

inline SupportSeries support_series(const RunTrajectory& traj, double eps_supp, const Point& center)
{
    SupportSeries out;
    for (const auto& snap : traj.snapshots) {
        const Field w    = snap.w();
        const Support sw = support(w, eps_supp, center);
        out.times.push_back(snap.t);
        out.radii.push_back(sw.radius);
        out.cells.push_back(sw.cells.size());
        std::vector<double> per;
        for (const auto& ui : snap.u) {
            const Support si = support(ui, eps_supp, center);
            per.push_back(si.radius);
            for (std::size_t c : si.cells) {
                if (!std::binary_search(sw.cells.begin(), sw.cells.end(), c)) {
                    ++out.containment_violations;
                }
            }
        }
        out.species_radii.push_back(std::move(per));
    }
    return out;
}

struct GrowthFit {
    double c1 = 0.0;     ///< prefactor of t^lambda
    double lambda = 0.0; ///< growth exponent
    std::size_t samples = 0;
    double t_first = 0.0; ///< fitted time range
    double t_last  = 0.0;
    double max_excess = 0.0; ///< max over the fitted range of R(t) / (R0 + c1 t^lambda)
    bool nondecreasing = true;
};

/// Least-squares fit of log(R - R0) against log t, ignoring the first 20% of samples.
inline GrowthFit fit_growth_exponent(const SupportSeries& series, double R0)
{
    const std::size_t n     = series.times.size();
    const std::size_t first = n / 5;
    std::vector<double> lx, ly;
    std::vector<std::size_t> used;
    for (std::size_t s = first; s < n; ++s) {
        const double t = series.times[s];
        const double r = series.radii[s] - R0;
        if (t > 0.0 && r > 0.0) {
            lx.push_back(std::log(t));
            ly.push_back(std::log(r));
            used.push_back(s);
        }
    }
    if (lx.size() < 5) {
        throw DomainError("growth fit needs at least 5 samples with radius above R0");
    }
    const double m = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        mx += lx[k];
        my += ly[k];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        sxx += (lx[k] - mx) * (lx[k] - mx);
        sxy += (lx[k] - mx) * (ly[k] - my);
    }
    if (!(sxx > 0.0)) {
        throw DomainError("growth fit needs samples at distinct times");
    }
    GrowthFit fit;
    fit.lambda  = sxy / sxx;
    fit.c1      = std::exp(my - fit.lambda * mx);
    fit.samples = lx.size();
    fit.t_first = series.times[used.front()];
    fit.t_last  = series.times[used.back()];
    for (std::size_t k = 0; k < used.size(); ++k) {
        const std::size_t s = used[k];
        const double model  = R0 + fit.c1 * std::pow(series.times[s], fit.lambda);
        fit.max_excess      = std::max(fit.max_excess, series.radii[s] / model);
        if (k > 0 && series.radii[s] < series.radii[used[k - 1]]) {
            fit.nondecreasing = false;
        }
    }
    return fit;
}

struct PersistenceViolation {
    double t_prev = 0.0;
    double t_next = 0.0;
    std::size_t cell = 0;
};

/// Cells in supp w at one snapshot but not at the next.
inline std::vector<PersistenceViolation> check_persistence(const RunTrajectory& traj, double eps_supp)
{
    std::vector<PersistenceViolation> out;
    for (std::size_t s = 1; s < traj.snapshots.size(); ++s) {
        const Field prev = traj.snapshots[s - 1].w();
        const Field next = traj.snapshots[s].w();
        for (std::size_t c = 0; c < prev.size(); ++c) {
            if (prev[c] > eps_supp && !(next[c] > eps_supp)) {
                out.push_back({traj.snapshots[s - 1].t, traj.snapshots[s].t, c});
            }
        }
    }
    return out;
}

struct DivideRuleReport {
    double eps_supp = 0.0;
    double initial_distance = 0.0;  ///< gap between the initial block supports
    double touch_time = std::numeric_limits<double>::infinity();
    std::size_t touch_step = 0;     ///< 0 when the supports never touch
    double pre_touch_max_dev = 0.0; ///< sup deviation on steps before the touch
    std::vector<std::pair<double, double>> post_touch_dev; ///< (t, deviation) after the touch
    double post_growth = 0.0;       ///< max deviation in the window after touch / pre_touch_max_dev
    std::size_t post_window = 50;
    double m_bound = 0.0;
    std::size_t steps = 0;
    RunTrajectory full, hat, check;
};

namespace detail {

inline std::vector<std::size_t> positive_cells(const std::vector<Field>& u)
{
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < u.front().size(); ++c) {
        for (const auto& ui : u) {
            if (ui[c] > 0.0) {
                out.push_back(c);
                break;
            }
        }
    }
    return out;
}

inline double sup_dev(const std::vector<Field>& full, std::size_t offset, const std::vector<Field>& block)
{
    double d = 0.0;
    for (std::size_t i = 0; i < block.size(); ++i) {
        const auto a = full[offset + i].values();
        const auto b = block[i].values();
        for (std::size_t c = 0; c < a.size(); ++c) {
            d = std::max(d, std::abs(a[c] - b[c]));
        }
    }
    return d;
}

} // namespace detail

/// Runs the full system (hat species first, then check species) and both blocks in lockstep
/// with a common step, and compares them until and after the block supports first share a cell.
inline DivideRuleReport divide_rule_experiment(const SystemProblem& hat, const SystemProblem& check,
                                               const SolverConfig& config, std::size_t post_window = 50)
{
    if (!(hat.grid == check.grid) || !(hat.model == check.model) || hat.T != check.T) {
        throw DomainError("divide-rule blocks must share grid, isotherm and horizon");
    }
    if (hat.boundary != BoundaryKind::Vacuum || check.boundary != BoundaryKind::Vacuum) {
        throw DomainError("divide-rule experiment runs in the vacuum (Cauchy) setting");
    }
    if (!is_degenerate(hat.model)) {
        throw DomainError("divide-rule needs a degenerate isotherm (Phi'(0) = 0); finite speed fails otherwise");
    }
    if (hat.species() == 0 || check.species() == 0) {
        throw DomainError("divide-rule blocks need at least one species each");
    }
    const Grid& g = hat.grid;
    const auto a  = detail::positive_cells(hat.u0);
    const auto b  = detail::positive_cells(check.u0);
    double gap    = std::numeric_limits<double>::infinity();
    double min_h  = g.h(0);
    if (g.dim() == 2) {
        min_h = std::min(min_h, g.h(1));
    }
    for (std::size_t i : a) {
        for (std::size_t j : b) {
            gap = std::min(gap, g.distance(g.center(i), g.center(j)));
        }
    }
    if (gap < 2.0 * min_h * (1.0 - 1e-12)) {
        throw DomainError("divide-rule initial supports overlap or are adjacent");
    }

    SystemProblem full = hat;
    full.u0.insert(full.u0.end(), check.u0.begin(), check.u0.end());
    full.forcing.resize(hat.species());
    auto fc = check.forcing;
    fc.resize(check.species());
    full.forcing.insert(full.forcing.end(), fc.begin(), fc.end());
    if (hat.declared_m && check.declared_m) {
        full.declared_m = std::max(*hat.declared_m, *check.declared_m);
    }
    else {
        full.declared_m.reset();
    }

    SystemIntegrator run_full(full, config);
    SolverConfig block_cfg = config;
    block_cfg.fixed_steps  = run_full.total_steps();
    SystemIntegrator run_hat(hat, block_cfg);
    SystemIntegrator run_check(check, block_cfg);

    struct Tally {
        double touch_time = std::numeric_limits<double>::infinity();
        std::size_t touch_step = 0;
        double pre = 0.0;
        double post_max = 0.0;
        std::vector<std::pair<double, double>> post;
    } tally;

    const std::size_t k = hat.species();
    while (!run_full.finished() && !run_hat.finished() && !run_check.finished()) {
        run_full.advance();
        run_hat.advance();
        run_check.advance();
        const double dev = std::max(detail::sup_dev(run_full.fields(), 0, run_hat.fields()),
                                    detail::sup_dev(run_full.fields(), k, run_check.fields()));
        if (tally.touch_step == 0) {
            const auto wh = run_hat.w();
            const auto wc = run_check.w();
            for (std::size_t c = 0; c < wh.size(); ++c) {
                if (wh[c] > config.eps_supp && wc[c] > config.eps_supp) {
                    tally.touch_step = run_full.step();
                    tally.touch_time = run_full.time();
                    break;
                }
            }
        }
        if (tally.touch_step == 0) {
            tally.pre = std::max(tally.pre, dev);
        }
        else {
            tally.post.emplace_back(run_full.time(), dev);
            if (run_full.step() - tally.touch_step < post_window) {
                tally.post_max = std::max(tally.post_max, dev);
            }
        }
    }
    double growth = 0.0;
    if (tally.touch_step > 0) {
        growth = tally.pre > 0.0 ? tally.post_max / tally.pre
                                 : (tally.post_max > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    }
    const double m_bound    = run_full.trajectory().stats.m_bound;
    const std::size_t steps = run_full.total_steps();
    return DivideRuleReport{config.eps_supp, gap, tally.touch_time, tally.touch_step, tally.pre,
                            std::move(tally.post), growth, post_window, m_bound, steps,
                            std::move(run_full).finish(), std::move(run_hat).finish(),
                            std::move(run_check).finish()};
}

struct EnergyNorms {
    double global_w = 0.0;       ///< ||grad Phi(w)||_{L2(Q_T)} over the whole domain
    std::vector<double> species; ///< ||grad(rho u_i)||_{L2} over the interior window
    int margin_cells = 0;
};

/// Trapezoid rule in time over the snapshots; the species norms only use faces between cells
/// at least `margin_cells` from the boundary.
inline EnergyNorms energy_norms(const RunTrajectory& traj, int margin_cells)
{
    if (margin_cells < 2) {
        throw DomainError("energy window margin must be at least 2 cells");
    }
    const Grid& g = traj.grid;
    const auto keep = [&](int i, int j) { return g.cells_to_boundary(g.index(i, j)) >= margin_cells; };
    bool any = false;
    for (std::size_t c = 0; c < g.size(); ++c) {
        any = any || g.cells_to_boundary(c) >= margin_cells;
    }
    if (!any) {
        throw DomainError("energy window is empty for this margin");
    }
    EnergyNorms out;
    out.margin_cells = margin_cells;
    out.species.assign(traj.species, 0.0);
    std::vector<double> prev_sp(traj.species, 0.0), cur_sp(traj.species, 0.0);
    double prev_w = 0.0;
    std::vector<double> q(g.size()), r(g.size());
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        const auto& snap = traj.snapshots[s];
        const Field w    = snap.w();
        for (std::size_t c = 0; c < g.size(); ++c) {
            r[c] = rho(traj.model, w[c]);
            q[c] = r[c] * w[c];
        }
        const double cur_w = detail::gradient_energy(g, q);
        for (std::size_t i = 0; i < traj.species; ++i) {
            for (std::size_t c = 0; c < g.size(); ++c) {
                q[c] = r[c] * snap.u[i][c];
            }
            cur_sp[i] = detail::gradient_energy_where(g, q, keep);
        }
        if (s > 0) {
            const double dt = snap.t - traj.snapshots[s - 1].t;
            out.global_w += 0.5 * dt * (prev_w + cur_w);
            for (std::size_t i = 0; i < traj.species; ++i) {
                out.species[i] += 0.5 * dt * (prev_sp[i] + cur_sp[i]);
            }
        }
        prev_w  = cur_w;
        prev_sp = cur_sp;
    }
    out.global_w = std::sqrt(out.global_w);
    for (double& v : out.species) {
        v = std::sqrt(v);
    }
    return out;
}

/// phi(x, t) = g((x - c)/r) [g((y - c_y)/r)] g((t - t_c)/tau),  g(s) = (1 - s^2)^4 on |s| < 1.
struct BumpTestFunction {
    Point center{0.0, 0.0};
    double radius = 1.0;
    double t_center = 0.5;
    double t_radius = 0.5;
    double amplitude = 1.0;

    static double g(double s) noexcept
    {
        const double a = 1.0 - s * s;
        return std::abs(s) < 1.0 ? a * a * a * a : 0.0;
    }
    static double g1(double s) noexcept
    {
        const double a = 1.0 - s * s;
        return std::abs(s) < 1.0 ? -8.0 * s * a * a * a : 0.0;
    }
    static double g2(double s) noexcept
    {
        const double a = 1.0 - s * s;
        return std::abs(s) < 1.0 ? -8.0 * a * a * a + 48.0 * s * s * a * a : 0.0;
    }

    double space(const Point& x, int dim) const noexcept
    {
        double v = g((x[0] - center[0]) / radius);
        if (dim == 2) {
            v *= g((x[1] - center[1]) / radius);
        }
        return v;
    }
    double space_laplacian(const Point& x, int dim) const noexcept
    {
        const double sx = (x[0] - center[0]) / radius;
        if (dim == 1) {
            return g2(sx) / (radius * radius);
        }
        const double sy = (x[1] - center[1]) / radius;
        return (g2(sx) * g(sy) + g(sx) * g2(sy)) / (radius * radius);
    }
    double time(double t) const noexcept { return amplitude * g((t - t_center) / t_radius); }
    double time_derivative(double t) const noexcept { return amplitude * g1((t - t_center) / t_radius) / t_radius; }
};

/// Discrete very weak form per species:
///   sum over snapshots (trapezoid) of sum_cells [u_i phi_t + rho u_i Lap phi + f_i phi] h^d
///   + sum_cells u_i(0) phi(., 0) h^d.
inline std::vector<double> weak_residual(const RunTrajectory& traj, const BumpTestFunction& phi_t,
                                         const std::vector<std::vector<ForcingTerm>>& forcing = {})
{
    const Grid& g = traj.grid;
    const int dim = g.dim();
    if (!(phi_t.radius > 0.0) || !(phi_t.t_radius > 0.0)) {
        throw DomainError("test function radii must be positive");
    }
    for (int a = 0; a < dim; ++a) {
        const double lo = g.origin(a), hi = g.origin(a) + g.extent(a);
        if (phi_t.center[a] - phi_t.radius <= lo || phi_t.center[a] + phi_t.radius >= hi) {
            throw DomainError("test function support touches the domain boundary");
        }
    }
    if (phi_t.t_center + phi_t.t_radius > traj.T * (1.0 + 1e-12)) {
        throw DomainError("test function must vanish before the final time");
    }
    if (traj.snapshots.empty()) {
        throw DomainError("trajectory has no snapshots");
    }
    if (!forcing.empty() && forcing.size() != traj.species) {
        throw DomainError("forcing must be given per species");
    }
    const double vol = g.cell_volume();
    std::vector<double> sp(g.size()), lap(g.size());
    for (std::size_t c = 0; c < g.size(); ++c) {
        sp[c]  = phi_t.space(g.center(c), dim);
        lap[c] = phi_t.space_laplacian(g.center(c), dim);
    }
    std::vector<double> out(traj.species, 0.0), prev(traj.species, 0.0), cur(traj.species, 0.0);
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        const auto& snap = traj.snapshots[s];
        const Field w    = snap.w();
        const double tt = phi_t.time(snap.t), dtt = phi_t.time_derivative(snap.t);
        for (std::size_t i = 0; i < traj.species; ++i) {
            double acc = 0.0;
            for (std::size_t c = 0; c < g.size(); ++c) {
                const double u = snap.u[i][c];
                acc += u * sp[c] * dtt + rho(traj.model, w[c]) * u * lap[c] * tt;
            }
            if (!forcing.empty()) {
                for (const auto& term : forcing[i]) {
                    if (term.active(snap.t)) {
                        for (std::size_t c = 0; c < g.size(); ++c) {
                            acc += term.profile[c] * sp[c] * tt;
                        }
                    }
                }
            }
            cur[i] = acc * vol;
        }
        if (s > 0) {
            const double dt = snap.t - traj.snapshots[s - 1].t;
            for (std::size_t i = 0; i < traj.species; ++i) {
                out[i] += 0.5 * dt * (prev[i] + cur[i]);
            }
        }
        prev = cur;
    }
    const auto& first = traj.snapshots.front();
    const double t0   = phi_t.time(first.t);
    for (std::size_t i = 0; i < traj.species; ++i) {
        double acc = 0.0;
        for (std::size_t c = 0; c < g.size(); ++c) {
            acc += first.u[i][c] * sp[c];
        }
        out[i] += acc * t0 * vol;
    }
    return out;
}

struct HolderWindow {
    int margin_cells = 2; ///< spatial window: cells at least this far from the boundary
    double tau = 0.0;     ///< temporal window: snapshots with t >= tau
};

struct HolderEstimate {
    double alpha = 0.0;
    HolderWindow window;
    double T = 0.0;
    double quotient = 0.0; ///< max over pairs and species of |u(x,t) - u(y,s)| / (|x-y| + |t-s|^(1/2))^alpha
    std::size_t pairs = 0;
};

/// Random cell and snapshot pairs in the window; half of them share the snapshot.
inline HolderEstimate holder_modulus(const RunTrajectory& traj, double alpha, const HolderWindow& window,
                                     std::size_t pairs, std::uint64_t seed = 1)
{
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw DomainError("Hoelder exponent must be in (0,1]");
    }
    if (window.margin_cells <= 0 || !(window.tau > 0.0)) {
        throw DomainError("Hoelder window must be strictly interior (margin > 0, tau > 0)");
    }
    const Grid& g = traj.grid;
    std::vector<std::size_t> cells;
    for (std::size_t c = 0; c < g.size(); ++c) {
        if (g.cells_to_boundary(c) >= window.margin_cells) {
            cells.push_back(c);
        }
    }
    std::vector<std::size_t> snaps;
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        if (traj.snapshots[s].t >= window.tau) {
            snaps.push_back(s);
        }
    }
    if (cells.size() < 2 || snaps.empty()) {
        throw DomainError("Hoelder window contains too few cells or snapshots");
    }
    HolderEstimate est{alpha, window, traj.T, 0.0, 0};
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick_cell(0, cells.size() - 1), pick_snap(0, snaps.size() - 1);
    for (std::size_t n = 0; n < pairs; ++n) {
        const std::size_t a = cells[pick_cell(rng)], b = cells[pick_cell(rng)];
        const std::size_t s = snaps[pick_snap(rng)];
        const std::size_t r = n % 2 == 0 ? s : snaps[pick_snap(rng)];
        const double dx     = g.distance(g.center(a), g.center(b));
        const double dt     = std::abs(traj.snapshots[s].t - traj.snapshots[r].t);
        const double denom  = std::pow(dx + std::sqrt(dt), alpha);
        if (!(denom > 0.0)) {
            continue;
        }
        ++est.pairs;
        for (std::size_t i = 0; i < traj.species; ++i) {
            const double du = std::abs(traj.snapshots[s].u[i][a] - traj.snapshots[r].u[i][b]);
            est.quotient    = std::max(est.quotient, du / denom);
        }
    }
    return est;
}

struct ComparisonResult {
    bool pass = true;
    double sup_w = 0.0;
    double bound = 0.0;
};

/// Pass iff sup w over every step is at most M(1+T) + 1e-8.
inline ComparisonResult comparison_monitor(const RunTrajectory& traj, double M, double T)
{
    ComparisonResult r;
    r.sup_w = traj.stats.max_w;
    for (const auto& snap : traj.snapshots) {
        r.sup_w = std::max(r.sup_w, snap.w().max());
    }
    r.bound = M * (1.0 + T);
    r.pass  = r.sup_w <= r.bound + 1e-8;
    return r;
}

} // namespace gpme
