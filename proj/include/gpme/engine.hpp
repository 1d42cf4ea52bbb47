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

/// @file engine.hpp
/// Time loop shared by the scalar and the system solver. The engine advances N nonnegative
/// densities u_k with the common coefficient rho(sum_k u_k) frozen at the start of each
/// step; N = 1 is the scalar equation dw/dt = Lap Phi(w) + F.

#include "gpme/errors.hpp"
#include "gpme/grid.hpp"
#include "gpme/isotherm.hpp"
#include "gpme/problem.hpp"
#include "gpme/stepping.hpp"
#include "gpme/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace gpme::detail {

struct EngineSetup {
    Grid grid;
    IsothermModel model;
    std::vector<Field> u0;
    std::vector<std::vector<ForcingTerm>> forcing; ///< per field; may be empty
    BoundaryKind boundary = BoundaryKind::Vacuum;
    std::vector<std::function<double(double)>> boundary_values; ///< per field, value of rho*u on faces
    double T = 0.0;
    std::optional<double> declared_m;
};

inline void require_nonnegative_field(const Field& f, const char* what)
{
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (!(f[k] >= 0.0) || !std::isfinite(f[k])) {
            std::ostringstream os;
            os << what << " must be finite and nonnegative (cell " << k << " holds " << f[k] << ")";
            throw DomainError(os.str());
        }
    }
}

class Engine {
public:
    Engine(EngineSetup setup, const SolverConfig& config)
        : grid_(setup.grid), model_(setup.model), config_(config), boundary_(setup.boundary), T_(setup.T)
    {
        validate(setup);
        u_       = std::move(setup.u0);
        forcing_ = std::move(setup.forcing);
        forcing_.resize(u_.size());
        bvals_ = std::move(setup.boundary_values);
        bvals_.resize(u_.size());

        if (config_.regularize_eps > 0.0) {
            model_ = regularize(model_, config_.regularize_eps);
        }
        m_bound_ = comparison_bound();
        if (config_.use_phi_table) {
            model_ = model_.with_phi_table(1e-12 * std::max(1.0, m_bound_), 1.01 * std::max(1.0, m_bound_));
        }
        if (setup.declared_m) {
            check_declared(*setup.declared_m);
        }

        const double m_eff = m_bound_ > 0.0 ? m_bound_ : 1.0;
        const CflStep cfl  = cfl_dt(model_, m_eff, grid_, config_.safety);
        if (config_.fixed_steps) {
            total_ = std::max<std::size_t>(1, *config_.fixed_steps);
        }
        else {
            total_ = static_cast<std::size_t>(std::max(1.0, std::ceil(T_ / cfl.dt - 1e-9)));
        }
        dt_ = T_ / static_cast<double>(total_);
        require_step(model_, m_eff, grid_, dt_);
        stride_ = std::max<std::size_t>(1, (total_ + config_.n_snapshots - 1) / std::max<std::size_t>(1, config_.n_snapshots));

        const std::size_t n = grid_.size();
        w_.assign(n, 0.0);
        w_adv_.assign(n, 0.0);
        rho_.assign(n, 0.0);
        q_.assign(n, 0.0);
        qw_.assign(n, 0.0);
        lap_.assign(n, 0.0);
        f_sum_.assign(n, 0.0);
        next_.assign(u_.size(), std::vector<double>(n, 0.0));
        f_now_.assign(u_.size(), std::vector<double>(n, 0.0));
        active_.assign(u_.size(), std::vector<char>{});
        cum_species_.assign(u_.size(), 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            if (boundary_ == BoundaryKind::Vacuum && grid_.cells_to_boundary(k) < config_.collar_cells) {
                collar_.push_back(k);
            }
        }

        traj_.grid     = grid_;
        traj_.model    = model_;
        traj_.species  = u_.size();
        traj_.T        = T_;
        traj_.center   = config_.center.value_or(grid_.domain_center());
        traj_.eps_supp = config_.eps_supp;
        auto& st       = traj_.stats;
        st.dt          = dt_;
        st.lipschitz   = cfl.lipschitz;
        st.m_bound     = m_bound_;
        st.min_u       = std::numeric_limits<double>::infinity();
        st.max_w       = 0.0;
        st.max_mass_drift.assign(u_.size(), 0.0);
        for (const auto& uk : u_) {
            st.initial_mass.push_back(integrate(uk));
        }

        sum_fields();
        monitor();
        check_collar();
        record();
    }

    bool finished() const noexcept { return step_ >= total_ || traj_.aborted(); }
    std::size_t step() const noexcept { return step_; }
    std::size_t total_steps() const noexcept { return total_; }
    double dt() const noexcept { return dt_; }
    double time() const noexcept { return static_cast<double>(step_) * dt_; }
    const std::vector<Field>& fields() const noexcept { return u_; }
    std::span<const double> w() const noexcept { return w_; }
    const IsothermModel& model() const noexcept { return model_; }
    const RunTrajectory& trajectory() const noexcept { return traj_; }

    void advance()
    {
        if (finished()) {
            return;
        }
        const double t      = time();
        const std::size_t n = grid_.size();
        const std::size_t N = u_.size();
        update_forcing(t);

        for (std::size_t c = 0; c < n; ++c) {
            rho_[c] = rho(model_, w_[c]);
            qw_[c]  = rho_[c] * w_[c];
        }
        cum_grad_ += dt_ * gradient_energy(grid_, qw_);

        double g_d = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            const double q_b = boundary_value(k, t);
            g_d += q_b;
            auto uk = u_[k].values();
            for (std::size_t c = 0; c < n; ++c) {
                q_[c] = rho_[c] * uk[c];
            }
            cum_species_[k] += dt_ * gradient_energy(grid_, q_);
            explicit_update(grid_, uk, q_, q_b, f_now_[k], dt_, lap_, next_[k]);
        }

        if (config_.mode == SolverMode::Decomposed) {
            std::fill(f_sum_.begin(), f_sum_.end(), 0.0);
            for (std::size_t k = 0; k < N; ++k) {
                for (std::size_t c = 0; c < n; ++c) {
                    f_sum_[c] += f_now_[k][c];
                }
            }
            explicit_update(grid_, w_, qw_, g_d, f_sum_, dt_, lap_, w_adv_);
        }

        for (std::size_t k = 0; k < N; ++k) {
            auto uk = u_[k].values();
            std::copy(next_[k].begin(), next_[k].end(), uk.begin());
        }
        ++step_;
        sum_fields();

        if (config_.mode == SolverMode::Decomposed) {
            double dev = 0.0;
            for (std::size_t c = 0; c < n; ++c) {
                dev = std::max(dev, std::abs(w_[c] - w_adv_[c]));
            }
            traj_.stats.max_decoupling_dev = std::max(traj_.stats.max_decoupling_dev, dev);
        }
        monitor();
        check_collar();
        if (!traj_.aborted() && traj_.stats.max_w > m_bound_ * (1.0 + 1e-9) + 1e-300) {
            std::ostringstream os;
            os.precision(17);
            os << "density " << traj_.stats.max_w << " exceeds the comparison bound " << m_bound_ << " at t=" << time();
            traj_.stats.abort_reason = os.str();
        }
        if (step_ % stride_ == 0 || step_ == total_ || traj_.aborted()) {
            record();
        }
    }

    RunTrajectory finish() &&
    {
        while (!finished()) {
            advance();
        }
        traj_.stats.steps = step_;
        return std::move(traj_);
    }

private:
    void validate(const EngineSetup& s) const
    {
        if (s.u0.empty()) {
            throw DomainError("at least one species is required");
        }
        if (!(s.T > 0.0) || !std::isfinite(s.T)) {
            throw DomainError("time horizon T must be positive");
        }
        for (const auto& u : s.u0) {
            if (!(u.grid() == s.grid)) {
                throw DomainError("initial field grid mismatch");
            }
            require_nonnegative_field(u, "initial density");
        }
        if (!s.forcing.empty() && s.forcing.size() != s.u0.size()) {
            throw DomainError("forcing must be given per species");
        }
        for (const auto& terms : s.forcing) {
            for (const auto& term : terms) {
                if (!(term.profile.grid() == s.grid)) {
                    throw DomainError("forcing field grid mismatch");
                }
                require_nonnegative_field(term.profile, "forcing");
                if (!(term.t_off > term.t_on)) {
                    throw DomainError("forcing window must have t_off > t_on");
                }
            }
        }
        if (!s.boundary_values.empty() && s.boundary_values.size() != s.u0.size()) {
            throw DomainError("boundary data must be given per species");
        }
        if (config_.n_snapshots == 0) {
            throw DomainError("n_snapshots must be positive");
        }
        if (!(config_.eps_supp > 0.0)) {
            throw DomainError("eps_supp must be positive");
        }
    }

    double boundary_value(std::size_t k, double t) const
    {
        if (boundary_ == BoundaryKind::Vacuum || !bvals_[k]) {
            return 0.0;
        }
        const double v = bvals_[k](t);
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw DomainError("boundary data must be nonnegative");
        }
        return v;
    }

    /// max(sup w0, sup_t beta(g_D(t))) + T sup F.
    double comparison_bound() const
    {
        double w0 = 0.0;
        Field sum = u_.front();
        for (std::size_t k = 1; k < u_.size(); ++k) {
            sum += u_[k];
        }
        w0 = sum.max();
        double wb = 0.0;
        if (boundary_ == BoundaryKind::Dirichlet) {
            constexpr int samples = 64;
            for (int s = 0; s <= samples; ++s) {
                const double t = T_ * s / samples;
                double g       = 0.0;
                for (std::size_t k = 0; k < u_.size(); ++k) {
                    g += boundary_value(k, t);
                }
                wb = std::max(wb, beta(model_, g));
            }
        }
        double f = 0.0;
        for (const auto& terms : forcing_) {
            for (const auto& term : terms) {
                f += term.profile.max();
            }
        }
        return std::max(w0, wb) + T_ * f;
    }

    void check_declared(double m) const
    {
        if (!(m > 0.0)) {
            throw DomainError("declared bound M must be positive");
        }
        Field sum = u_.front();
        for (std::size_t k = 1; k < u_.size(); ++k) {
            sum += u_[k];
        }
        if (sum.max() > m) {
            throw DomainError("initial data exceed the declared bound M");
        }
        for (const auto& terms : forcing_) {
            for (const auto& term : terms) {
                if (term.profile.max() > m) {
                    throw DomainError("forcing exceeds the declared bound M");
                }
            }
        }
    }

    void update_forcing(double t)
    {
        for (std::size_t k = 0; k < u_.size(); ++k) {
            std::vector<char> mask(forcing_[k].size());
            for (std::size_t j = 0; j < mask.size(); ++j) {
                mask[j] = forcing_[k][j].active(t) ? 1 : 0;
            }
            if (mask == active_[k] && step_ > 0) {
                continue;
            }
            active_[k] = mask;
            std::fill(f_now_[k].begin(), f_now_[k].end(), 0.0);
            for (std::size_t j = 0; j < mask.size(); ++j) {
                if (mask[j]) {
                    const auto prof = forcing_[k][j].profile.values();
                    for (std::size_t c = 0; c < prof.size(); ++c) {
                        f_now_[k][c] += prof[c];
                    }
                }
            }
        }
    }

    void sum_fields()
    {
        const auto u0 = u_.front().values();
        std::copy(u0.begin(), u0.end(), w_.begin());
        for (std::size_t k = 1; k < u_.size(); ++k) {
            const auto uk = u_[k].values();
            for (std::size_t c = 0; c < w_.size(); ++c) {
                w_[c] += uk[c];
            }
        }
    }

    void monitor()
    {
        auto& st = traj_.stats;
        for (std::size_t k = 0; k < u_.size(); ++k) {
            st.min_u = std::min(st.min_u, u_[k].min());
            st.max_mass_drift[k] = std::max(st.max_mass_drift[k], std::abs(integrate(u_[k]) - st.initial_mass[k]));
        }
        st.max_w = std::max(st.max_w, *std::max_element(w_.begin(), w_.end()));
    }

    void check_collar()
    {
        for (std::size_t c : collar_) {
            if (w_[c] > config_.eps_supp) {
                std::ostringstream os;
                os.precision(17);
                os << "support reached the boundary collar (" << config_.collar_cells << " cells) at t=" << time()
                   << ", cell " << c;
                traj_.stats.abort_reason = os.str();
                return;
            }
        }
    }

    void record()
    {
        const double t = time();
        if (config_.keep_snapshots) {
            traj_.snapshots.push_back(Snapshot{t, step_, u_});
        }
        DiagnosticsRow row;
        row.t = t;
        const Field w(grid_, w_);
        row.mass  = integrate(w);
        row.sup_w = w.max();
        row.inf_w = w.min();
        double psi_sum = 0.0;
        for (double v : w_) {
            psi_sum += psi(model_, v);
        }
        row.energy_psi      = psi_sum * grid_.cell_volume();
        row.cum_grad_energy = cum_grad_;
        row.support_radius  = support(w, config_.eps_supp, traj_.center).radius;
        for (std::size_t k = 0; k < u_.size(); ++k) {
            row.species.push_back({integrate(u_[k]), u_[k].max(), cum_species_[k]});
        }
        traj_.diagnostics.push_back(std::move(row));
    }

    Grid grid_;
    IsothermModel model_;
    SolverConfig config_;
    BoundaryKind boundary_;
    double T_;
    std::vector<Field> u_;
    std::vector<std::vector<ForcingTerm>> forcing_;
    std::vector<std::function<double(double)>> bvals_;

    double m_bound_ = 0.0;
    double dt_ = 0.0;
    std::size_t total_ = 0;
    std::size_t stride_ = 1;
    std::size_t step_ = 0;

    std::vector<double> w_, w_adv_, rho_, q_, qw_, lap_, f_sum_;
    std::vector<std::vector<double>> next_, f_now_;
    std::vector<std::vector<char>> active_;
    std::vector<std::size_t> collar_;
    double cum_grad_ = 0.0;
    std::vector<double> cum_species_;
    RunTrajectory traj_{grid_, model_};
};

} // namespace gpme::detail
