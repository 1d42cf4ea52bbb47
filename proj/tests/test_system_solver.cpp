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
#include "gpme/system_solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace gpme;

namespace {

const IsothermModel pme2 = IsothermModel::power_law(2.0);

Field five(std::vector<double> v) { return Field(Grid(5.0, 5), std::move(v)); }

Field random_bump(const Grid& g, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> c(-2.0, 2.0), r(0.5, 2.0), a(0.1, 1.0);
    const double xc = c(rng), rad = r(rng), amp = a(rng);
    return Field::sample(g, [&](const Point& x) {
        const double d = std::abs(x[0] - xc);
        return d < rad ? 0.5 * amp * (1.0 + std::cos(M_PI * d / rad)) : 0.0;
    });
}

SystemProblem random_problem(std::mt19937_64& rng, std::size_t N, const IsothermModel& model)
{
    const Grid g(12.0, 96, -6.0);
    SystemProblem p{g, model, {}, {}, BoundaryKind::Vacuum, {}, 0.5, {}};
    for (std::size_t i = 0; i < N; ++i) {
        p.u0.push_back(random_bump(g, rng));
    }
    return p;
}

double sup_diff(const Field& a, const Field& b)
{
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        d = std::max(d, std::abs(a[k] - b[k]));
    }
    return d;
}

} // namespace

TEST(BoundaryTranslate, Examples)
{
    const std::vector<double> zero{0.0, 0.0};
    const auto z = boundary_translate(pme2, zero);
    EXPECT_EQ(z.g_d, 0.0);
    EXPECT_EQ(z.u_b, (std::vector<double>{0.0, 0.0}));

    const std::vector<double> zd{0.18, 0.18};
    const auto b = boundary_translate(pme2, zd);
    EXPECT_NEAR(b.g_d, 0.36, 1e-15);
    EXPECT_NEAR(b.w_b, 0.6, 1e-14);
    EXPECT_NEAR(b.u_b[0], 0.3, 1e-14);
    EXPECT_NEAR(b.u_b[0] + b.u_b[1], b.w_b, 1e-14);

    const auto fr = IsothermModel::freundlich(0.4, 0.3);
    const std::vector<double> one{0.7};
    EXPECT_NEAR(boundary_translate(fr, one).u_b[0], beta(fr, 0.7), 1e-12);
    const std::vector<double> neg{-0.1};
    EXPECT_THROW(boundary_translate(fr, neg), DomainError);
}

TEST(StepCoupled, HandStencil)
{
    const SpeciesState s({five({0, 0, 0.5, 0, 0}), five({0, 0, 0.5, 0, 0})});
    const std::vector<Field> f(2, five({0, 0, 0, 0, 0}));
    const std::vector<double> zd{0.0, 0.0};
    const auto next = step_coupled(s, f, zd, pme2, 0.1);
    const std::vector<double> expect{0, 0.05, 0.4, 0.05, 0};
    for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_NEAR(next.u(0)[k], expect[k], 1e-15);
        EXPECT_EQ(next.u(0)[k], next.u(1)[k]);
        EXPECT_NEAR(next.w()[k], 2.0 * expect[k], 1e-15);
    }
    EXPECT_NEAR(next.t(), 0.1, 1e-15);

    const auto dec = step_decomposed(s, f, zd, pme2, 0.1);
    for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_EQ(dec.state.u(0)[k], next.u(0)[k]);
    }
    EXPECT_LE(dec.decoupling_dev, 1e-15);
    EXPECT_THROW(step_coupled(s, f, zd, pme2, 0.3), CflError);
}

TEST(StepCoupled, ZeroSpeciesStaysZero)
{
    const SpeciesState s({five({0, 0.3, 1, 0.3, 0}), five({0, 0, 0, 0, 0})});
    const std::vector<Field> f(2, five({0, 0, 0, 0, 0}));
    const std::vector<double> zd{0.0, 0.0};
    SpeciesState cur = s;
    for (int n = 0; n < 10; ++n) {
        cur = step_coupled(cur, f, zd, pme2, 0.05);
        EXPECT_EQ(cur.u(1).max(), 0.0);
    }
}

TEST(StepDecomposed, SingleSpeciesReducesToScalarStep)
{
    const SpeciesState s({five({0.1, 0.4, 1, 0.2, 0})});
    const std::vector<Field> f{five({0, 0.5, 0, 0, 0.2})};
    const std::vector<double> zd{0.3};
    const auto dec = step_decomposed(s, f, zd, pme2, 0.05);
    const Field w  = step_w(s.u(0), f[0], 0.3, pme2, 0.05);
    for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_EQ(dec.state.u(0)[k], w[k]);
        EXPECT_EQ(dec.w[k], w[k]);
    }
    const auto zero = step_decomposed(SpeciesState({five({0, 0, 0, 0, 0})}), std::vector<Field>{five({0, 0, 0, 0, 0})},
                                      std::vector<double>{0.0}, pme2, 0.05);
    EXPECT_EQ(zero.state.u(0).max(), 0.0);
}

TEST(SolveSystem, ModesAgreeAndSumToScalar)
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 4; ++trial) {
        const auto model = trial % 2 ? pme2 : IsothermModel::freundlich(0.5, 0.3);
        auto p           = random_problem(rng, 3, model);
        SolverConfig cfg;
        cfg.n_snapshots    = 20;
        const auto coupled = solve_system(p, cfg);
        cfg.mode           = SolverMode::Decomposed;
        const auto dec     = solve_system(p, cfg);
        const auto scalar  = solve_scalar(summed_problem(p), cfg);
        ASSERT_EQ(coupled.snapshots.size(), dec.snapshots.size());
        ASSERT_EQ(coupled.snapshots.size(), scalar.snapshots.size());
        const double w0 = coupled.snapshots.front().w().max();
        EXPECT_LE(dec.stats.max_decoupling_dev, 1e-12 * w0);
        for (std::size_t s = 0; s < coupled.snapshots.size(); ++s) {
            for (std::size_t i = 0; i < 3; ++i) {
                EXPECT_LE(sup_diff(coupled.snapshots[s].u[i], dec.snapshots[s].u[i]), 1e-9 * w0);
            }
            EXPECT_LE(sup_diff(coupled.snapshots[s].w(), scalar.snapshots[s].u[0]), 1e-12 * w0);
        }
    }
}

TEST(SolveSystem, SingleSpeciesIsBitIdenticalToScalar)
{
    std::mt19937_64 rng(5);
    const auto p  = random_problem(rng, 1, IsothermModel::freundlich(0.3, 0.7));
    const auto a  = solve_system(p, {});
    const auto b  = solve_scalar(summed_problem(p), {});
    ASSERT_EQ(a.snapshots.size(), b.snapshots.size());
    for (std::size_t s = 0; s < a.snapshots.size(); ++s) {
        EXPECT_TRUE(a.snapshots[s].u[0] == b.snapshots[s].u[0]);
    }
}

TEST(SolveSystem, PermutationEquivariance)
{
    std::mt19937_64 rng(9);
    auto p = random_problem(rng, 3, pme2);
    auto q = p;
    std::swap(q.u0[0], q.u0[2]);
    const auto a = solve_system(p, {});
    const auto b = solve_system(q, {});
    const double scale = a.snapshots.front().w().max();
    for (std::size_t s = 0; s < a.snapshots.size(); ++s) {
        EXPECT_LE(sup_diff(a.snapshots[s].u[0], b.snapshots[s].u[2]), 1e-14 * scale);
        EXPECT_LE(sup_diff(a.snapshots[s].u[1], b.snapshots[s].u[1]), 1e-14 * scale);
        EXPECT_LE(sup_diff(a.snapshots[s].u[2], b.snapshots[s].u[0]), 1e-14 * scale);
    }
}

TEST(SolveSystem, SymmetricSpeciesStayEqualAndDominatedBySum)
{
    std::mt19937_64 rng(13);
    auto p = random_problem(rng, 1, IsothermModel::freundlich(0.6, 0.1));
    p.u0.push_back(p.u0.front());
    p.u0.push_back(random_bump(p.grid, rng));
    const auto traj = solve_system(p, {});
    EXPECT_GE(traj.stats.min_u, 0.0);
    for (const auto& s : traj.snapshots) {
        EXPECT_TRUE(s.u[0] == s.u[1]);
        const Field w = s.w();
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t k = 0; k < w.size(); ++k) {
                EXPECT_LE(s.u[i][k], w[k]);
            }
        }
    }
}

TEST(SolveSystem, SpeciesMassBalanceWithForcing)
{
    const Grid g(10.0, 100, -5.0);
    Field f(g);
    for (std::size_t k = 45; k < 55; ++k) {
        f[k] = 0.5;
    }
    SystemProblem p{g, pme2, {Field(g), Field(g)}, {{ForcingTerm{f, 0.0, 0.2}}, {}}, BoundaryKind::Vacuum, {}, 0.4, {}};
    const auto traj    = solve_system(p, {});
    const double added = 0.2 * integrate(f);
    EXPECT_NEAR(traj.diagnostics.back().species[0].mass, added, 1e-12);
    EXPECT_EQ(traj.diagnostics.back().species[1].mass, 0.0);
}

TEST(SolveSystem, DirichletBoxApproachesBoundaryState)
{
    const Grid g(1.0, 20);
    SystemProblem p{g, pme2, {Field(g), Field(g)}, {}, BoundaryKind::Dirichlet, {{0.18, 0.0}, {0.18, 0.0}}, 2.0, {}};
    const auto traj = solve_system(p, {});
    const auto& s   = traj.snapshots.back();
    for (std::size_t k = 0; k < g.size(); ++k) {
        EXPECT_NEAR(s.u[0][k], 0.3, 1e-3);
        EXPECT_NEAR(s.u[1][k], 0.3, 1e-3);
    }
    EXPECT_LE(traj.stats.max_w, 0.6 + 1e-12);
}

TEST(ConcentrationView, Examples)
{
    const Grid g(3.0, 3);
    const SpeciesState zero({Field(g), Field(g)});
    for (const auto& z : concentration_view(zero, pme2)) {
        EXPECT_EQ(z.max(), 0.0);
    }
    const SpeciesState s({Field(g, std::vector<double>{3, 0, 1}), Field(g)});
    const auto z = concentration_view(s, pme2);
    EXPECT_NEAR(z[0][0], 9.0, 1e-13);
    EXPECT_EQ(z[1][0], 0.0);
    const auto zf = concentration_view(s, IsothermModel::freundlich(0.5, 0.5));
    EXPECT_NEAR(zf[0][0], 4.0, 1e-12);
    EXPECT_EQ(zf[0][1], 0.0);
}

TEST(SpeciesState, RejectsMismatchedGrids)
{
    EXPECT_THROW(SpeciesState({}), DomainError);
    EXPECT_THROW(SpeciesState({Field(Grid(1.0, 4)), Field(Grid(1.0, 5))}), DomainError);
}
