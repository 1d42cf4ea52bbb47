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

/// @file benchmark.hpp
/// Barenblatt suite for the power-law isotherm: L1 error under refinement and support growth.

#include "gpme/analysis.hpp"
#include "gpme/barenblatt.hpp"
#include "gpme/scalar_gpme.hpp"

#include <cmath>
#include <vector>

namespace gpme {

struct RefinementLevel {
    int cells = 0;
    double h = 0.0;
    double dt = 0.0;
    std::size_t steps = 0;
    double l1_error = 0.0;
    double min_w = 0.0;
    double mass_drift = 0.0; ///< relative
};

struct RefinementStudy {
    double m = 2.0;
    double t0 = 1.0;
    double T = 1.0;
    std::vector<RefinementLevel> levels;

    /// error(level k-1) / error(level k)
    std::vector<double> ratios() const
    {
        std::vector<double> r;
        for (std::size_t k = 1; k < levels.size(); ++k) {
            r.push_back(levels[k - 1].l1_error / levels[k].l1_error);
        }
        return r;
    }
};

/// 1D runs from the profile at t0 up to t0 + T, doubling the cell count per level.
inline RefinementStudy barenblatt_refinement(double m, int base_cells, int levels, double half_width, double t0,
                                             double T, double safety = 0.5)
{
    if (levels < 1 || base_cells < 3) {
        throw DomainError("refinement study needs at least one level and three cells");
    }
    const Barenblatt exact(m, 1);
    RefinementStudy out{m, t0, T, {}};
    SolverConfig cfg;
    cfg.safety      = safety;
    cfg.n_snapshots = 1;
    for (int l = 0; l < levels; ++l) {
        const int cells = base_cells << l;
        const Grid g(2.0 * half_width, cells, -half_width);
        const auto traj =
            solve_scalar({g, IsothermModel::power_law(m), exact.sample(g, t0), {}, BoundaryKind::Vacuum, {}, T, {}}, cfg);
        if (traj.aborted()) {
            throw InvariantError("refinement run aborted: " + *traj.stats.abort_reason);
        }
        const Field ref = exact.sample(g, t0 + T);
        const Field& w  = traj.snapshots.back().u[0];
        double err      = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            err += std::abs(w[k] - ref[k]);
        }
        out.levels.push_back({cells, g.h(0), traj.stats.dt, traj.stats.steps, err * g.cell_volume(), traj.stats.min_u,
                              traj.stats.max_mass_drift[0] / traj.stats.initial_mass[0]});
    }
    return out;
}

struct GrowthStudy {
    double m = 2.0;
    double target = 0.0; ///< self-similar exponent 1/(m+1) in 1D
    double R0 = 0.0;
    GrowthFit fit;
    SupportSeries series;
    std::size_t persistence_violations = 0;
    double max_mass_drift = 0.0; ///< relative
    double min_w = 0.0;
    double m_bound = 0.0;
    RunTrajectory trajectory;

    double relative_error() const { return std::abs(fit.lambda - target) / target; }
};

/// Long 1D run from the profile at t0; fits R(t) = R0 + C1 t^lambda with R0 the initial radius
/// and t the elapsed time.
inline GrowthStudy barenblatt_growth(double m, double t0, double T, double half_width, double h,
                                     std::size_t snapshots = 200, double eps_supp = 1e-8)
{
    const Barenblatt exact(m, 1);
    const int cells = static_cast<int>(std::lround(2.0 * half_width / h));
    const Grid g(2.0 * half_width, cells, -half_width);
    SolverConfig cfg;
    cfg.n_snapshots = snapshots;
    cfg.eps_supp    = eps_supp;
    auto traj = solve_scalar({g, IsothermModel::power_law(m), exact.sample(g, t0), {}, BoundaryKind::Vacuum, {}, T, {}},
                             cfg);
    if (traj.aborted()) {
        throw InvariantError("growth run aborted: " + *traj.stats.abort_reason);
    }
    auto series     = support_series(traj, eps_supp, {0.0, 0.0});
    const double R0 = series.radii.front();
    const auto fit  = fit_growth_exponent(series, R0);
    const auto viol = check_persistence(traj, eps_supp).size();
    const double drift = traj.stats.max_mass_drift[0] / traj.stats.initial_mass[0];
    const double min_w = traj.stats.min_u, mb = traj.stats.m_bound;
    return GrowthStudy{m, exact.growth_exponent(), R0, fit, std::move(series), viol, drift, min_w, mb, std::move(traj)};
}

} // namespace gpme
