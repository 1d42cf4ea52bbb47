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

/// @file grid.hpp
/// Uniform structured cell-centred mesh in one or two space dimensions, per-cell fields,
/// and the discrete operators used by the solvers (Laplacian with face-midpoint Dirichlet
/// ghosts, cell quadrature, face gradient energy, thresholded support).

#include "gpme/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

namespace gpme {

using Point = std::array<double, 2>;

class Grid {
public:
    /// One-dimensional grid on [origin, origin + extent].
    Grid(double extent, int cells, double origin = 0.0)
        : Grid(1, {extent, 1.0}, {cells, 1}, {origin, 0.0})
    {
    }

    /// Two-dimensional grid, row-major (x fastest).
    Grid(Point extent, std::array<int, 2> cells, Point origin = {0.0, 0.0})
        : Grid(2, extent, cells, origin)
    {
    }

    int dim() const noexcept { return dim_; }
    int cells(int axis) const noexcept { return cells_[axis]; }
    int nx() const noexcept { return cells_[0]; }
    int ny() const noexcept { return cells_[1]; }
    double extent(int axis) const noexcept { return extent_[axis]; }
    double origin(int axis) const noexcept { return origin_[axis]; }
    double h(int axis) const noexcept { return h_[axis]; }
    double cell_volume() const noexcept { return dim_ == 1 ? h_[0] : h_[0] * h_[1]; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(cells_[0]) * cells_[1]; }

    std::size_t index(int i, int j = 0) const noexcept
    {
        return static_cast<std::size_t>(j) * cells_[0] + static_cast<std::size_t>(i);
    }
    int i_of(std::size_t idx) const noexcept { return static_cast<int>(idx % cells_[0]); }
    int j_of(std::size_t idx) const noexcept { return static_cast<int>(idx / cells_[0]); }

    Point center(std::size_t idx) const noexcept
    {
        Point c{origin_[0] + (i_of(idx) + 0.5) * h_[0], 0.0};
        if (dim_ == 2) {
            c[1] = origin_[1] + (j_of(idx) + 0.5) * h_[1];
        }
        return c;
    }

    Point domain_center() const noexcept
    {
        return {origin_[0] + 0.5 * extent_[0], dim_ == 2 ? origin_[1] + 0.5 * extent_[1] : 0.0};
    }

    double distance(const Point& a, const Point& b) const noexcept
    {
        const double dx = a[0] - b[0];
        const double dy = dim_ == 2 ? a[1] - b[1] : 0.0;
        return std::sqrt(dx * dx + dy * dy);
    }

    /// Number of cells between this cell and the nearest boundary face (0 for boundary cells).
    int cells_to_boundary(std::size_t idx) const noexcept
    {
        const int i = i_of(idx);
        int d       = std::min(i, cells_[0] - 1 - i);
        if (dim_ == 2) {
            const int j = j_of(idx);
            d           = std::min({d, j, cells_[1] - 1 - j});
        }
        return d;
    }

    bool operator==(const Grid&) const = default;

private:
    Grid(int dim, Point extent, std::array<int, 2> cells, Point origin)
        : dim_(dim), cells_(cells), extent_(extent), origin_(origin)
    {
        for (int a = 0; a < dim_; ++a) {
            if (cells_[a] < 3) {
                throw DomainError("grid needs at least 3 cells per axis");
            }
            if (!(extent_[a] > 0.0) || !std::isfinite(extent_[a]) || !std::isfinite(origin_[a])) {
                throw DomainError("grid extent must be positive and finite");
            }
            h_[a] = extent_[a] / cells_[a];
        }
        if (dim_ == 1) {
            cells_[1] = 1;
            extent_[1] = 1.0;
            origin_[1] = 0.0;
            h_[1]      = 1.0;
        }
    }

    int dim_;
    std::array<int, 2> cells_;
    Point extent_;
    Point origin_;
    Point h_{1.0, 1.0};
};

/// One scalar per cell of a grid.
class Field {
public:
    explicit Field(Grid grid, double value = 0.0) : grid_(std::move(grid)), values_(grid_.size(), value) {}

    Field(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values))
    {
        if (values_.size() != grid_.size()) {
            throw DomainError("field size does not match grid");
        }
    }

    template <class Fn>
    static Field sample(const Grid& grid, Fn&& fn)
    {
        Field f(grid);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            f.values_[k] = fn(grid.center(k));
        }
        return f;
    }

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    double& operator[](std::size_t k) noexcept { return values_[k]; }
    double operator[](std::size_t k) const noexcept { return values_[k]; }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    double max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }
    double min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }
    bool all_finite() const noexcept
    {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

    Field& operator+=(const Field& other)
    {
        for (std::size_t k = 0; k < values_.size(); ++k) {
            values_[k] += other.values_[k];
        }
        return *this;
    }

    bool operator==(const Field&) const = default;

private:
    Grid grid_;
    std::vector<double> values_;
};

namespace detail {

/// Five-point (three-point in 1D) Laplacian of q, written into out. A missing neighbour is
/// replaced by the ghost 2*bc(face) - q_i, which imposes bc at the face midpoint.
template <class BoundaryFn>
void laplacian_into(const Grid& g, std::span<const double> q, BoundaryFn&& bc, std::span<double> out)
{
    const int nx     = g.nx();
    const int ny     = g.ny();
    const double ihx = 1.0 / (g.h(0) * g.h(0));
    const double ihy = g.dim() == 2 ? 1.0 / (g.h(1) * g.h(1)) : 0.0;
    const double hx  = g.h(0);
    const double hy  = g.h(1);
    const bool two_d = g.dim() == 2;
    const auto ghost = [&](int i, int j, double dx, double dy, double qc) {
        const double x = g.origin(0) + (i + 0.5 + dx) * hx;
        const double y = two_d ? g.origin(1) + (j + 0.5 + dy) * hy : 0.0;
        return 2.0 * bc(Point{x, y}) - qc;
    };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = g.index(i, j);
            const double qc     = q[k];
            const double left   = i > 0 ? q[k - 1] : ghost(i, j, -0.5, 0.0, qc);
            const double right  = i < nx - 1 ? q[k + 1] : ghost(i, j, 0.5, 0.0, qc);
            double lap          = (left + right - 2.0 * qc) * ihx;
            if (two_d) {
                const double down = j > 0 ? q[k - nx] : ghost(i, j, 0.0, -0.5, qc);
                const double up   = j < ny - 1 ? q[k + nx] : ghost(i, j, 0.0, 0.5, qc);
                lap += (down + up - 2.0 * qc) * ihy;
            }
            out[k] = lap;
        }
    }
}

} // namespace detail

/// Discrete Laplacian with a boundary value given per face midpoint.
template <class BoundaryFn>
    requires std::is_invocable_r_v<double, BoundaryFn, const Point&>
Field laplacian(const Field& f, BoundaryFn&& bc)
{
    Field out(f.grid());
    detail::laplacian_into(f.grid(), f.values(), bc, out.values());
    return out;
}

/// Discrete Laplacian with one boundary value on every face.
inline Field laplacian(const Field& f, double bc_value)
{
    return laplacian(f, [bc_value](const Point&) { return bc_value; });
}

/// Cell quadrature sum_i f_i h^dim.
inline double integrate(const Field& f)
{
    double sum = 0.0;
    for (double v : f.values()) {
        sum += v;
    }
    return sum * f.grid().cell_volume();
}

namespace detail {

/// Sum over interior faces, restricted to cells whose indices satisfy keep(i, j) on both sides.
template <class Keep>
double gradient_energy_where(const Grid& g, std::span<const double> f, Keep&& keep)
{
    const int nx    = g.nx();
    const int ny    = g.ny();
    const double hx = g.h(0);
    const double hy = g.h(1);
    const double vol = g.cell_volume();
    double sum       = 0.0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            if (keep(i, j) && keep(i + 1, j)) {
                const double d = (f[g.index(i + 1, j)] - f[g.index(i, j)]) / hx;
                sum += d * d;
            }
        }
    }
    if (g.dim() == 2) {
        for (int j = 0; j + 1 < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                if (keep(i, j) && keep(i, j + 1)) {
                    const double d = (f[g.index(i, j + 1)] - f[g.index(i, j)]) / hy;
                    sum += d * d;
                }
            }
        }
    }
    return sum * vol;
}

inline double gradient_energy(const Grid& g, std::span<const double> f)
{
    return gradient_energy_where(g, f, [](int, int) { return true; });
}

} // namespace detail

/// sum over interior faces of ((f_R - f_L)/h)^2 h^dim; boundary faces excluded.
inline double gradient_energy(const Field& f) { return detail::gradient_energy(f.grid(), f.values()); }

struct Support {
    std::vector<std::size_t> cells; ///< ascending cell indices with f > eps
    double radius = 0.0;            ///< max distance of those cell centres from the centre
};

inline Support support(const Field& f, double eps_supp, const Point& center)
{
    if (!(eps_supp > 0.0)) {
        throw DomainError("support threshold must be positive");
    }
    Support s;
    const Grid& g = f.grid();
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (f[k] > eps_supp) {
            s.cells.push_back(k);
            s.radius = std::max(s.radius, g.distance(g.center(k), center));
        }
    }
    return s;
}

} // namespace gpme
