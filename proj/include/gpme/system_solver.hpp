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

/// @file system_solver.hpp
/// The N-species system  du_i/dt = Lap(rho(w) u_i) + f_i,  w = sum_i u_i,  in two modes:
///   - coupled: every species is stepped directly with rho taken from the pre-step w;
///   - decomposed: w is first advanced by the scalar scheme, then each species is advanced
///     by its linear equation with the frozen coefficient rho(w).
/// Both modes form the same products rho*u_i, so they agree to rounding, and the species
/// updates sum to the scalar update.

#include "gpme/engine.hpp"
#include "gpme/scalar_gpme.hpp"

#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace gpme {

class SpeciesState {
public:
    SpeciesState(std::vector<Field> u, double t = 0.0) : u_(std::move(u)), t_(t)
    {
        if (u_.empty()) {
            throw DomainError("species state needs at least one species");
        }
        for (const auto& f : u_) {
            if (!(f.grid() == u_.front().grid())) {
                throw DomainError("species fields live on different grids");
            }
        }
    }

    std::size_t species() const noexcept { return u_.size(); }
    const Grid& grid() const noexcept { return u_.front().grid(); }
    double t() const noexcept { return t_; }
    const Field& u(std::size_t i) const { return u_.at(i); }
    const std::vector<Field>& fields() const noexcept { return u_; }

    /// w = sum_i u_i, recomputed on every call.
    Field w() const
    {
        Field sum = u_.front();
        for (std::size_t k = 1; k < u_.size(); ++k) {
            sum += u_[k];
        }
        return sum;
    }

    Field rho_field(const IsothermModel& model) const
    {
        Field w_now = w();
        for (std::size_t c = 0; c < w_now.size(); ++c) {
            w_now[c] = rho(model, w_now[c]);
        }
        return w_now;
    }

private:
    std::vector<Field> u_;
    double t_;
};

struct SystemProblem {
    Grid grid;
    IsothermModel model;
    std::vector<Field> u0;
    std::vector<std::vector<ForcingTerm>> forcing; ///< per species, may be empty
    BoundaryKind boundary = BoundaryKind::Vacuum;
    std::vector<BoundaryValue> z_d; ///< boundary concentrations per species (Dirichlet)
    double T = 1.0;
    std::optional<double> declared_m;

    std::size_t species() const noexcept { return u0.size(); }
};

struct BoundaryTranslation {
    double g_d = 0.0;          ///< |z_D|_1, the boundary value of Phi(w)
    double w_b = 0.0;          ///< beta(g_D), boundary density sum
    std::vector<double> u_b;   ///< per-species boundary densities z_i/rho(w_b)
};

/// Translates boundary concentrations into the density formulation.
inline BoundaryTranslation boundary_translate(const IsothermModel& model, std::span<const double> z_d)
{
    BoundaryTranslation out;
    for (double z : z_d) {
        detail::require_nonnegative(z, "boundary concentration");
        out.g_d += z;
    }
    out.u_b.assign(z_d.size(), 0.0);
    if (out.g_d == 0.0) {
        return out;
    }
    out.w_b          = beta(model, out.g_d);
    const double rho_b = rho(model, out.w_b);
    for (std::size_t i = 0; i < z_d.size(); ++i) {
        out.u_b[i] = z_d[i] / rho_b;
    }
    return out;
}

namespace detail {

inline void check_step_inputs(const SpeciesState& state, std::span<const Field> f, std::span<const double> z_d)
{
    const std::size_t N = state.species();
    if (f.size() != N || z_d.size() != N) {
        throw DomainError("forcing and boundary data must be given per species");
    }
    for (std::size_t i = 0; i < N; ++i) {
        require_nonnegative_field(state.u(i), "species density");
        require_nonnegative_field(f[i], "species forcing");
        require_nonnegative(z_d[i], "boundary concentration");
        if (!(f[i].grid() == state.grid())) {
            throw DomainError("forcing grid mismatch");
        }
    }
}

inline std::vector<Field> species_update(const SpeciesState& state, const std::vector<double>& rho_c,
                                         std::span<const Field> f, std::span<const double> z_d, double dt)
{
    const Grid& g = state.grid();
    std::vector<double> q(g.size());
    std::vector<double> lap(g.size());
    std::vector<Field> next;
    next.reserve(state.species());
    for (std::size_t i = 0; i < state.species(); ++i) {
        const auto ui = state.u(i).values();
        for (std::size_t c = 0; c < g.size(); ++c) {
            q[c] = rho_c[c] * ui[c];
        }
        Field out(g);
        explicit_update(g, ui, q, z_d[i], f[i].values(), dt, lap, out.values());
        next.push_back(std::move(out));
    }
    return next;
}

inline std::vector<double> rho_cells(const IsothermModel& model, const Field& w)
{
    std::vector<double> r(w.size());
    for (std::size_t c = 0; c < w.size(); ++c) {
        r[c] = rho(model, w[c]);
    }
    return r;
}

} // namespace detail

/// One coupled step: u_i <- u_i + dt Lap_h[rho u_i] + dt f_i, rho from the pre-step w.
inline SpeciesState step_coupled(const SpeciesState& state, std::span<const Field> f, std::span<const double> z_d,
                                 const IsothermModel& model, double dt)
{
    detail::check_step_inputs(state, f, z_d);
    const Field w = state.w();
    const double g_d = std::accumulate(z_d.begin(), z_d.end(), 0.0);
    detail::require_step(model, std::max(w.max(), beta(model, g_d)), state.grid(), dt);
    const auto rho_c = detail::rho_cells(model, w);
    return SpeciesState(detail::species_update(state, rho_c, f, z_d, dt), state.t() + dt);
}

struct DecomposedStep {
    SpeciesState state;
    Field w;                  ///< w advanced independently by the scalar scheme
    double decoupling_dev = 0.0; ///< max |sum_i u_i - w|
};

/// One decomposed step: advance w by the scalar scheme, then the N linear equations with
/// rho frozen at the pre-step w.
inline DecomposedStep step_decomposed(const SpeciesState& state, std::span<const Field> f,
                                      std::span<const double> z_d, const IsothermModel& model, double dt)
{
    detail::check_step_inputs(state, f, z_d);
    const Field w0 = state.w();
    Field F(state.grid());
    for (const auto& fi : f) {
        F += fi;
    }
    const double g_d = std::accumulate(z_d.begin(), z_d.end(), 0.0);
    Field w1 = step_w(w0, F, g_d, model, dt);

    const auto rho_c = detail::rho_cells(model, w0);
    SpeciesState next(detail::species_update(state, rho_c, f, z_d, dt), state.t() + dt);

    const Field sum = next.w();
    double dev = 0.0;
    for (std::size_t c = 0; c < sum.size(); ++c) {
        dev = std::max(dev, std::abs(sum[c] - w1[c]));
    }
    return DecomposedStep{std::move(next), std::move(w1), dev};
}

namespace detail {

inline EngineSetup engine_setup(const SystemProblem& p)
{
    if (p.boundary == BoundaryKind::Dirichlet && p.z_d.size() != p.species()) {
        throw DomainError("Dirichlet system problem needs one boundary concentration per species");
    }
    for (const auto& z : p.z_d) {
        if (!(z.value >= 0.0) || !(z.ramp >= 0.0)) {
            throw DomainError("boundary concentrations must be nonnegative");
        }
    }
    EngineSetup setup{p.grid, p.model, p.u0, p.forcing, p.boundary, {}, p.T, p.declared_m};
    if (p.boundary == BoundaryKind::Dirichlet) {
        for (const auto& z : p.z_d) {
            setup.boundary_values.push_back([z](double t) { return z.at(t); });
        }
    }
    return setup;
}

} // namespace detail

/// Incremental driver, for callers that need the state between steps.
class SystemIntegrator {
public:
    SystemIntegrator(const SystemProblem& problem, const SolverConfig& config)
        : engine_(detail::engine_setup(problem), config)
    {
    }

    void advance() { engine_.advance(); }
    bool finished() const noexcept { return engine_.finished(); }
    double time() const noexcept { return engine_.time(); }
    double dt() const noexcept { return engine_.dt(); }
    std::size_t step() const noexcept { return engine_.step(); }
    std::size_t total_steps() const noexcept { return engine_.total_steps(); }
    const std::vector<Field>& fields() const noexcept { return engine_.fields(); }
    std::span<const double> w() const noexcept { return engine_.w(); }
    const RunTrajectory& trajectory() const noexcept { return engine_.trajectory(); }
    RunTrajectory finish() && { return std::move(engine_).finish(); }

private:
    detail::Engine engine_;
};

inline RunTrajectory solve_system(const SystemProblem& problem, const SolverConfig& config)
{
    return SystemIntegrator(problem, config).finish();
}

/// The summed scalar problem (w0 = sum u0_i, F = sum f_i, g_D = |z_D|_1).
inline ScalarProblem summed_problem(const SystemProblem& p)
{
    ScalarProblem s{p.grid, p.model, Field(p.grid), {}, p.boundary, {}, p.T, p.declared_m};
    for (const auto& u : p.u0) {
        s.w0 += u;
    }
    for (const auto& terms : p.forcing) {
        s.forcing.insert(s.forcing.end(), terms.begin(), terms.end());
    }
    if (p.boundary == BoundaryKind::Dirichlet) {
        s.g_d = [z = p.z_d](double t) {
            double g = 0.0;
            for (const auto& zi : z) {
                g += zi.at(t);
            }
            return g;
        };
    }
    return s;
}

/// Concentrations z = rho(w) u per cell; vacuum cells give 0.
inline std::vector<Field> concentration_view(const SpeciesState& state, const IsothermModel& model)
{
    const auto rho_c = detail::rho_cells(model, state.w());
    std::vector<Field> z;
    for (std::size_t i = 0; i < state.species(); ++i) {
        Field zi = state.u(i);
        for (std::size_t c = 0; c < zi.size(); ++c) {
            zi[c] = rho_c[c] * zi[c];
        }
        z.push_back(std::move(zi));
    }
    return z;
}

} // namespace gpme
