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
#include "gpme/grid.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace gpme;

namespace {
Field spike5()
{
    return Field(Grid(5.0, 5), std::vector<double>{0, 0, 1, 0, 0});
}
} // namespace

TEST(Grid, GeometryAndIndexing)
{
    const Grid g({2.0, 1.0}, {4, 5}, {-1.0, 0.0});
    EXPECT_EQ(g.dim(), 2);
    EXPECT_EQ(g.size(), 20u);
    EXPECT_DOUBLE_EQ(g.h(0), 0.5);
    EXPECT_DOUBLE_EQ(g.h(1), 0.2);
    const auto c = g.center(g.index(1, 2));
    EXPECT_DOUBLE_EQ(c[0], -1.0 + 1.5 * 0.5);
    EXPECT_DOUBLE_EQ(c[1], 2.5 * 0.2);
    EXPECT_EQ(g.cells_to_boundary(g.index(1, 2)), 1);
    EXPECT_THROW(Grid(1.0, 2), DomainError);
    EXPECT_THROW(Grid(-1.0, 8), DomainError);
}

TEST(Laplacian, ConstantFieldWithMatchingBoundaryIsZero)
{
    const Field c1(Grid(3.0, 7), 2.5);
    const auto l1 = laplacian(c1, 2.5);
    for (double v : l1.values()) {
        EXPECT_EQ(v, 0.0);
    }
    const Field c2(Grid({1.0, 2.0}, {5, 6}), 0.75);
    const auto l2 = laplacian(c2, 0.75);
    for (double v : l2.values()) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(Laplacian, QuadraticIsExactInTheInterior)
{
    const Grid g(2.0, 20, -1.0);
    const auto f   = Field::sample(g, [](const Point& x) { return x[0] * x[0]; });
    const auto lap = laplacian(f, 0.0);
    for (int i = 1; i < 19; ++i) {
        EXPECT_NEAR(lap[i], 2.0, 1e-11);
    }
    const Grid g2({1.0, 1.0}, {8, 8});
    const auto f2   = Field::sample(g2, [](const Point& x) { return x[0] * x[0] + 3 * x[1] * x[1] + x[0] - x[1]; });
    const auto lap2 = laplacian(f2, 0.0);
    for (int j = 1; j < 7; ++j) {
        for (int i = 1; i < 7; ++i) {
            EXPECT_NEAR(lap2[g2.index(i, j)], 8.0, 1e-10);
        }
    }
}

TEST(Laplacian, SpikeStencil)
{
    const auto lap = laplacian(spike5(), 0.0);
    const std::vector<double> expected{0, 1, -2, 1, 0};
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(lap[i], expected[i]);
    }
}

TEST(Laplacian, BoundaryValueImposedAtFaceMidpoints)
{
    // zero field, bc(x) = x on [0, 4] with h = 1: ghosts are 2*0 and 2*4
    const Field f(Grid(4.0, 4), 0.0);
    const auto lap = laplacian(f, [](const Point& x) { return x[0]; });
    EXPECT_DOUBLE_EQ(lap[0], 0.0);
    EXPECT_DOUBLE_EQ(lap[3], 8.0);
    // an affine field with its own trace as boundary data is harmonic everywhere
    const Grid g(1.0, 10);
    const auto aff = Field::sample(g, [](const Point& x) { return 3 * x[0] + 1; });
    const auto l2  = laplacian(aff, [](const Point& x) { return 3 * x[0] + 1; });
    for (double v : l2.values()) {
        EXPECT_NEAR(v, 0.0, 1e-11);
    }
}

TEST(Integrate, Examples)
{
    EXPECT_DOUBLE_EQ(integrate(Field(Grid(3.5, 7), 1.0)), 3.5);
    EXPECT_DOUBLE_EQ(integrate(spike5()), 1.0);
    EXPECT_DOUBLE_EQ(integrate(Field(Grid({1.0, 1.0}, {4, 4}), 2.0)), 2.0);
}

TEST(GradientEnergy, Examples)
{
    EXPECT_EQ(gradient_energy(Field(Grid(1.0, 9), 4.0)), 0.0);
    const Grid g(1.0, 50);
    const auto lin = Field::sample(g, [](const Point& x) { return x[0]; });
    // 49 interior faces of slope 1, measure h each
    EXPECT_NEAR(gradient_energy(lin), 49.0 / 50.0, 1e-12);
    EXPECT_DOUBLE_EQ(gradient_energy(spike5()), 2.0);
}

TEST(Support, Examples)
{
    const Field zero(Grid(5.0, 5), 0.0);
    const auto s0 = support(zero, 1e-8, {2.5, 0.0});
    EXPECT_TRUE(s0.cells.empty());
    EXPECT_EQ(s0.radius, 0.0);

    const Field f(Grid(5.0, 5), std::vector<double>{0, 0.1, 0.8, 0.1, 0});
    const auto s = support(f, 1e-8, {2.5, 0.0});
    EXPECT_EQ(s.cells, (std::vector<std::size_t>{1, 2, 3}));
    EXPECT_DOUBLE_EQ(s.radius, 1.0);

    EXPECT_TRUE(support(f, 0.9, {2.5, 0.0}).cells.empty());
    EXPECT_THROW(support(f, 0.0, {2.5, 0.0}), DomainError);
}

TEST(GridProperty, DiscreteDivergenceTheorem)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> val(0.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Grid g({2.0, 3.0}, {12, 9});
        Field f(g);
        for (std::size_t k = 0; k < g.size(); ++k) {
            f[k] = g.cells_to_boundary(k) >= 2 ? val(rng) : 0.0;
        }
        EXPECT_NEAR(integrate(laplacian(f, 0.0)), 0.0, 1e-11);
    }
}

TEST(GridProperty, SupportMonotoneInThreshold)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> val(0.0, 1.0);
    const Grid g(1.0, 64);
    Field f(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        f[k] = val(rng) * val(rng);
    }
    std::vector<double> eps{1e-8, 1e-3, 0.05, 0.2, 0.5};
    for (std::size_t a = 0; a + 1 < eps.size(); ++a) {
        const auto lo = support(f, eps[a], {0.5, 0});
        const auto hi = support(f, eps[a + 1], {0.5, 0});
        EXPECT_TRUE(std::includes(lo.cells.begin(), lo.cells.end(), hi.cells.begin(), hi.cells.end()));
    }
}
