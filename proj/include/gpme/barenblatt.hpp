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

/// @file barenblatt.hpp
/// Self-similar source-type solution of  dw/dt = Lap(w^m), m > 1, in n dimensions:
///   U(x,t) = t^-alpha (C - k |x|^2 t^(-2 alpha/n))_+^(1/(m-1)),
///   alpha = n/(n(m-1)+2),  k = alpha (m-1)/(2 m n).
/// Its support radius grows like t^(alpha/n) = t^(1/(n(m-1)+2)).

#include "gpme/errors.hpp"
#include "gpme/grid.hpp"

#include <cmath>

namespace gpme {

class Barenblatt {
public:
    Barenblatt(double m, int n, double C = 1.0, Point center = {0.0, 0.0}) : m_(m), n_(n), C_(C), center_(center)
    {
        if (!(m > 1.0)) {
            throw DomainError("Barenblatt profile needs m > 1");
        }
        if (n < 1 || n > 2) {
            throw DomainError("Barenblatt profile is provided for 1 or 2 dimensions");
        }
        if (!(C > 0.0)) {
            throw DomainError("Barenblatt constant C must be positive");
        }
        alpha_ = n_ / (n_ * (m_ - 1.0) + 2.0);
        k_     = alpha_ * (m_ - 1.0) / (2.0 * m_ * n_);
    }

    double alpha() const noexcept { return alpha_; }
    /// Exponent of the support radius growth.
    double growth_exponent() const noexcept { return alpha_ / n_; }

    double operator()(const Point& x, double t) const
    {
        const double r2   = radius2(x);
        const double base = C_ - k_ * r2 * std::pow(t, -2.0 * alpha_ / n_);
        if (base <= 0.0) {
            return 0.0;
        }
        return std::pow(t, -alpha_) * std::pow(base, 1.0 / (m_ - 1.0));
    }

    double radius(double t) const noexcept { return std::sqrt(C_ / k_) * std::pow(t, alpha_ / n_); }
    double peak(double t) const noexcept { return std::pow(t, -alpha_) * std::pow(C_, 1.0 / (m_ - 1.0)); }

    Field sample(const Grid& grid, double t) const
    {
        return Field::sample(grid, [&](const Point& x) { return (*this)(x, t); });
    }

private:
    double radius2(const Point& x) const noexcept
    {
        const double dx = x[0] - center_[0];
        const double dy = n_ == 2 ? x[1] - center_[1] : 0.0;
        return dx * dx + dy * dy;
    }

    double m_;
    int n_;
    double C_;
    Point center_;
    double alpha_ = 0.0;
    double k_     = 0.0;
};

} // namespace gpme
