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

/// @file trajectory.hpp
/// Output of a run: snapshots of the species densities plus diagnostic series.

#include "gpme/grid.hpp"
#include "gpme/isotherm.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gpme {

struct Snapshot {
    double t = 0.0;
    std::size_t step = 0;
    std::vector<Field> u; ///< one field per species

    Field w() const
    {
        Field sum = u.front();
        for (std::size_t k = 1; k < u.size(); ++k) {
            sum += u[k];
        }
        return sum;
    }
};

struct SpeciesDiagnostics {
    double mass = 0.0;
    double sup  = 0.0;
    double grad_energy_rho_u = 0.0; ///< cumulative sum over steps of dt*|grad(rho u_i)|^2
};

struct DiagnosticsRow {
    double t = 0.0;
    double mass = 0.0;
    double sup_w = 0.0;
    double inf_w = 0.0;
    double energy_psi = 0.0;      ///< integral of Psi(w)
    double cum_grad_energy = 0.0; ///< sum over steps of dt*|grad Phi(w)|^2
    double support_radius = 0.0;
    std::vector<SpeciesDiagnostics> species;
};

struct RunStats {
    std::size_t steps = 0;
    double dt = 0.0;
    double lipschitz = 0.0;  ///< sup Phi' on [0, M_bound]
    double m_bound = 0.0;    ///< comparison bound used for the step size
    double min_u = 0.0;      ///< min over all cells, steps and species
    double max_w = 0.0;      ///< max over all cells and steps
    double max_decoupling_dev = 0.0; ///< decomposed mode: max |sum u_i - w| (absolute)
    std::vector<double> initial_mass;
    std::vector<double> max_mass_drift; ///< max over steps of |mass_i(t) - mass_i(0)|
    std::optional<std::string> abort_reason;
};

struct RunTrajectory {
    RunTrajectory(Grid g, IsothermModel m, std::size_t n_species = 1, double horizon = 0.0)
        : grid(std::move(g)), model(std::move(m)), species(n_species), T(horizon)
    {
    }

    Grid grid;
    IsothermModel model;
    std::size_t species = 1;
    double T = 0.0;
    Point center{0.0, 0.0};
    double eps_supp = 1e-8;
    std::vector<Snapshot> snapshots;
    std::vector<DiagnosticsRow> diagnostics;
    RunStats stats;

    bool aborted() const noexcept { return stats.abort_reason.has_value(); }
};

} // namespace gpme
