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

/// @file problem.hpp
/// Data descriptors shared by the scalar and system solvers.

#include "gpme/grid.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <vector>

namespace gpme {

enum class SolverMode { Coupled, Decomposed };

/// Dirichlet: prescribed boundary concentrations. Vacuum: homogeneous Dirichlet data on a
/// box large enough to emulate the Cauchy problem; the run aborts if the support reaches the
/// boundary collar.
enum class BoundaryKind { Dirichlet, Vacuum };

/// A forcing profile switched on for t in [t_on, t_off).
struct ForcingTerm {
    Field profile;
    double t_on  = 0.0;
    double t_off = std::numeric_limits<double>::infinity();

    bool active(double t) const noexcept { return t >= t_on && t < t_off; }
};

/// Boundary concentration, constant or linearly ramped from 0 to value over [0, ramp].
struct BoundaryValue {
    double value = 0.0;
    double ramp  = 0.0;

    double at(double t) const noexcept { return ramp > 0.0 ? value * std::min(1.0, t / ramp) : value; }
    bool operator==(const BoundaryValue&) const = default;
};

struct SolverConfig {
    double safety          = 0.5;  ///< fraction of the explicit stability limit
    double eps_supp        = 1e-8; ///< support threshold (density units)
    std::size_t n_snapshots = 50;
    SolverMode mode        = SolverMode::Coupled;
    bool use_phi_table     = false;
    double regularize_eps  = 0.0; ///< 0 disables the Phi_eps regularization
    std::optional<Point> center;  ///< support centre; domain centre when unset
    int collar_cells       = 3;   ///< vacuum runs abort when the support gets this close
    std::optional<std::size_t> fixed_steps; ///< force the step count (lockstep runs)
    bool keep_snapshots    = true;
};

} // namespace gpme
