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

/// @file stepping.hpp
/// Forward Euler kernel shared by every solver path, and the step-size rules.
///
/// One step of  du/dt = Lap(q) + f  with q = rho(w) u is
///     u_i <- u_i + dt * Lap_h[q]_i + dt * f_i,
/// where a missing neighbour of a boundary cell is the ghost 2*q_b - q_i. Using one kernel
/// for the scalar density w and for each species density makes the species updates sum to
/// the scalar update up to floating-point summation order.

#include "gpme/grid.hpp"
#include "gpme/isotherm.hpp"

#include <cmath>
#include <limits>
#include <span>
#include <sstream>

namespace gpme {

struct CflStep {
    double dt = 0.0;
    double lipschitz = 0.0; ///< sup Phi' on [0, M]
    bool degenerate_range = false; ///< Phi' vanished on the whole range
};

namespace detail {

inline double inverse_h2_sum(const Grid& g)
{
    double s = 1.0 / (g.h(0) * g.h(0));
    if (g.dim() == 2) {
        s += 1.0 / (g.h(1) * g.h(1));
    }
    return s;
}

inline double min_h(const Grid& g) { return g.dim() == 2 ? std::min(g.h(0), g.h(1)) : g.h(0); }

/// out = u + dt*Lap_h[q] + dt*f with constant boundary value q_b; lap is scratch.
inline void explicit_update(const Grid& g, std::span<const double> u, std::span<const double> q, double q_b,
                            std::span<const double> f, double dt, std::span<double> lap, std::span<double> out)
{
    laplacian_into(g, q, [q_b](const Point&) { return q_b; }, lap);
    for (std::size_t k = 0; k < u.size(); ++k) {
        out[k] = u[k] + dt * lap[k] + dt * f[k];
    }
}

} // namespace detail

/// Explicit step size safety * h^2 / (2 dim L), L = sup_{[0, M]} Phi'.
inline CflStep cfl_dt(const IsothermModel& model, double m_bound, const Grid& grid, double safety)
{
    if (!(m_bound > 0.0) || !std::isfinite(m_bound)) {
        throw DomainError("cfl_dt needs a positive finite density bound");
    }
    if (!(safety > 0.0 && safety <= 1.0)) {
        throw DomainError("CFL safety factor must be in (0,1]");
    }
    CflStep out;
    out.lipschitz = lipschitz_bound(model, m_bound);
    if (out.lipschitz == 0.0) {
        const double h = detail::min_h(grid);
        out.dt = safety * h * h;
        out.degenerate_range = true;
        return out;
    }
    out.dt = safety / (2.0 * out.lipschitz * detail::inverse_h2_sum(grid));
    return out;
}

/// Largest dt keeping the update an M-matrix step for densities up to `bound`, including
/// boundary cells whose ghost adds one more -q_i per boundary face: dt L sum_a 3/h_a^2 <= 1.
/// Equals cfl_dt at safety 2/3.
inline double positivity_limit(const IsothermModel& model, double bound, const Grid& grid)
{
    const double lip = lipschitz_bound(model, bound);
    if (lip == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 1.0 / (3.0 * lip * detail::inverse_h2_sum(grid));
}

namespace detail {

inline void require_step(const IsothermModel& model, double bound, const Grid& grid, double dt)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw DomainError("time step must be positive");
    }
    const double limit = positivity_limit(model, bound, grid);
    if (dt > limit * (1.0 + 1e-12)) {
        std::ostringstream os;
        os.precision(17);
        os << "time step " << dt << " exceeds the positivity limit " << limit;
        throw CflError(os.str());
    }
}

} // namespace detail

} // namespace gpme
