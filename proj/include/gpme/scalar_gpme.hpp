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

/// @file scalar_gpme.hpp
/// The summed equation  dw/dt = Lap Phi(w) + F  with Dirichlet data g_D imposed on Phi(w).

#include "gpme/engine.hpp"
#include "gpme/grid.hpp"
#include "gpme/isotherm.hpp"
#include "gpme/problem.hpp"
#include "gpme/stepping.hpp"
#include "gpme/trajectory.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace gpme {

struct ScalarProblem {
    Grid grid;
    IsothermModel model;
    Field w0;
    std::vector<ForcingTerm> forcing;
    BoundaryKind boundary = BoundaryKind::Vacuum;
    std::function<double(double)> g_d; ///< boundary value of Phi(w); unused for Vacuum
    double T = 1.0;
    std::optional<double> declared_m; ///< bound M on w0 and F, checked when set
};

/// One explicit step. Phi(w) is formed as rho(w)*w, the same product the species step uses.
inline Field step_w(const Field& w, const Field& F, double g_d, const IsothermModel& model, double dt)
{
    if (!(F.grid() == w.grid())) {
        throw DomainError("forcing grid mismatch");
    }
    detail::require_nonnegative_field(w, "density w");
    detail::require_nonnegative_field(F, "forcing F");
    detail::require_nonnegative(g_d, "boundary value g_D");
    const Grid& g = w.grid();
    detail::require_step(model, std::max(w.max(), beta(model, g_d)), g, dt);

    std::vector<double> q(g.size());
    std::vector<double> lap(g.size());
    for (std::size_t c = 0; c < g.size(); ++c) {
        q[c] = rho(model, w[c]) * w[c];
    }
    Field out(g);
    detail::explicit_update(g, w.values(), q, g_d, F.values(), dt, lap, out.values());
    return out;
}

inline RunTrajectory solve_scalar(const ScalarProblem& problem, const SolverConfig& config)
{
    detail::EngineSetup setup{problem.grid, problem.model, {problem.w0}, {problem.forcing}, problem.boundary,
                              {}, problem.T, problem.declared_m};
    if (problem.boundary == BoundaryKind::Dirichlet) {
        if (!problem.g_d) {
            throw DomainError("Dirichlet scalar problem needs boundary data g_D");
        }
        setup.boundary_values.push_back(problem.g_d);
    }
    return detail::Engine(std::move(setup), config).finish();
}

} // namespace gpme
