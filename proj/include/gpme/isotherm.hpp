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

/// @file isotherm.hpp
/// Nonlinearity algebra of the adsorption model: the isotherm beta, its inverse Phi,
/// the pressure coefficient rho = Phi(w)/w and the potential Psi = int_0^s Phi.
///
/// Three families are supported:
///   - Freundlich:  beta(r) = phi*r + (1-phi)*r^p,  0 < p < 1, 0 <= phi < 1
///   - PowerLaw:    Phi(s) = s^m (so beta(r) = r^(1/m)), m >= 1
///   - Linear:      Phi(s) = s
/// All arguments are nonnegative; signed solutions are not modelled.

#include "gpme/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace gpme {

struct Freundlich {
    double p   = 0.5;
    double phi = 0.5;
    bool operator==(const Freundlich&) const = default;
};

struct PowerLaw {
    double m = 2.0;
    bool operator==(const PowerLaw&) const = default;
};

struct Linear {
    bool operator==(const Linear&) const = default;
};

using IsothermKind = std::variant<Freundlich, PowerLaw, Linear>;

class IsothermModel;

namespace detail {

/// Regularization window: Phi_eps is the chord s*Phi(eps)/eps on [0, eps), Phi on
/// [eps, 1/eps] and the tangent line of Phi at 1/eps above.
struct Window {
    double lo;       // eps
    double hi;       // 1/eps
    double phi_lo;   // Phi(eps)
    double phi_hi;   // Phi(1/eps)
    double slope_hi; // Phi'(1/eps)
    double psi_lo;   // Psi(eps)
    double psi_hi;   // Psi(1/eps)
};

} // namespace detail

/// Log-spaced lookup table for Phi with monotone cubic Hermite interpolation.
/// Built once from exact inversions; immutable afterwards.
class PhiTable {
public:
    PhiTable(const IsothermModel& model, double s_min, double s_max, std::size_t nodes);

    double s_min() const noexcept { return s_min_; }
    double s_max() const noexcept { return s_max_; }
    bool covers(double s) const noexcept { return s >= s_min_ && s <= s_max_; }
    double operator()(double s) const noexcept;

private:
    double s_min_;
    double s_max_;
    double log_min_;
    double dlog_;
    std::vector<double> s_;
    std::vector<double> value_;
    std::vector<double> slope_;
};

class IsothermModel {
public:
    static constexpr double default_inversion_tol = 1e-12;

    explicit IsothermModel(IsothermKind kind, double inversion_tol = default_inversion_tol)
        : kind_(kind), tol_(inversion_tol)
    {
        validate();
    }

    static IsothermModel freundlich(double p, double phi) { return IsothermModel(Freundlich{p, phi}); }
    static IsothermModel power_law(double m) { return IsothermModel(PowerLaw{m}); }
    static IsothermModel linear() { return IsothermModel(Linear{}); }

    const IsothermKind& kind() const noexcept { return kind_; }
    double inversion_tol() const noexcept { return tol_; }

    /// Window parameter eps of a regularized model (Phi modified outside [eps, 1/eps]).
    std::optional<double> regularization_eps() const noexcept
    {
        return window_ ? std::optional<double>(window_->lo) : std::nullopt;
    }
    const detail::Window* window() const noexcept { return window_ ? &*window_ : nullptr; }

    const PhiTable* phi_table() const noexcept { return table_.get(); }

    /// Copy of this model whose Phi is served from a lookup table on [s_min, s_max].
    IsothermModel with_phi_table(double s_min, double s_max, std::size_t nodes = 4096) const
    {
        IsothermModel copy = *this;
        copy.table_.reset();
        copy.table_ = std::make_shared<const PhiTable>(copy, s_min, s_max, nodes);
        return copy;
    }

    std::string describe() const;

    /// Equality of the mathematical model; the lookup cache is ignored.
    bool operator==(const IsothermModel& other) const
    {
        return kind_ == other.kind_ && tol_ == other.tol_ && regularization_eps() == other.regularization_eps();
    }

private:
    friend IsothermModel regularize(const IsothermModel& model, double eps);

    void validate() const
    {
        if (!(tol_ > 0.0 && tol_ < 1e-2)) {
            throw DomainError("inversion_tol must be in (0, 1e-2)");
        }
        if (const auto* f = std::get_if<Freundlich>(&kind_)) {
            if (!(f->p > 0.0 && f->p < 1.0)) {
                throw DomainError("Freundlich exponent p must be in (0,1)");
            }
            if (!(f->phi >= 0.0 && f->phi < 1.0)) {
                throw DomainError("Freundlich porosity phi must be in [0,1)");
            }
        }
        else if (const auto* pl = std::get_if<PowerLaw>(&kind_)) {
            if (!(pl->m >= 1.0) || !std::isfinite(pl->m)) {
                throw DomainError("power-law exponent m must be >= 1");
            }
        }
    }

    IsothermKind kind_;
    double tol_;
    std::optional<detail::Window> window_;
    std::shared_ptr<const PhiTable> table_;
};

namespace detail {

inline void require_nonnegative(double x, const char* what)
{
    if (!(x >= 0.0) || !std::isfinite(x)) {
        std::ostringstream os;
        os << what << " must be finite and nonnegative (got " << x << ")";
        throw DomainError(os.str());
    }
}

inline double base_beta(const IsothermKind& k, double r)
{
    if (r == 0.0) {
        return 0.0;
    }
    if (const auto* f = std::get_if<Freundlich>(&k)) {
        return f->phi * r + (1.0 - f->phi) * std::pow(r, f->p);
    }
    if (const auto* pl = std::get_if<PowerLaw>(&k)) {
        return pl->m == 1.0 ? r : std::pow(r, 1.0 / pl->m);
    }
    return r;
}

inline double base_beta_prime(const IsothermKind& k, double r)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (const auto* f = std::get_if<Freundlich>(&k)) {
        if (r == 0.0) {
            return inf;
        }
        return f->phi + (1.0 - f->phi) * f->p * std::pow(r, f->p - 1.0);
    }
    if (const auto* pl = std::get_if<PowerLaw>(&k)) {
        if (pl->m == 1.0) {
            return 1.0;
        }
        if (r == 0.0) {
            return inf;
        }
        return std::pow(r, 1.0 / pl->m - 1.0) / pl->m;
    }
    return 1.0;
}

inline double base_beta_second(const IsothermKind& k, double r)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (const auto* f = std::get_if<Freundlich>(&k)) {
        if (r == 0.0) {
            return -inf;
        }
        return (1.0 - f->phi) * f->p * (f->p - 1.0) * std::pow(r, f->p - 2.0);
    }
    if (const auto* pl = std::get_if<PowerLaw>(&k)) {
        if (pl->m == 1.0) {
            return 0.0;
        }
        if (r == 0.0) {
            return -inf;
        }
        const double q = 1.0 / pl->m;
        return q * (q - 1.0) * std::pow(r, q - 2.0);
    }
    return 0.0;
}

/// int_0^r beta.
inline double base_beta_integral(const IsothermKind& k, double r)
{
    if (r == 0.0) {
        return 0.0;
    }
    if (const auto* f = std::get_if<Freundlich>(&k)) {
        return 0.5 * f->phi * r * r + (1.0 - f->phi) * std::pow(r, f->p + 1.0) / (f->p + 1.0);
    }
    if (const auto* pl = std::get_if<PowerLaw>(&k)) {
        const double q = 1.0 / pl->m;
        return std::pow(r, q + 1.0) / (q + 1.0);
    }
    return 0.5 * r * r;
}

/// Solves phi*r + (1-phi)*r^p = s for r.
/// Bisection on a guaranteed bracket until its relative width is below 1e-3 (at most 60
/// halvings), then Newton safeguarded by the bracket.
inline double invert_freundlich(const Freundlich& f, double s, double tol)
{
    if (s == 0.0) {
        return 0.0;
    }
    const double q = 1.0 / f.p;
    if (f.phi == 0.0) {
        return std::pow(s, q);
    }
    // beta(r) >= phi*r and beta(r) >= (1-phi)*r^p give the upper end; beta(r) <= 2*max of
    // the two terms gives the lower end.
    double lo = std::min(s / (2.0 * f.phi), std::pow(s / (2.0 * (1.0 - f.phi)), q));
    double hi = std::min(s / f.phi, std::pow(s / (1.0 - f.phi), q));
    const auto g = [&](double r) { return f.phi * r + (1.0 - f.phi) * std::pow(r, f.p) - s; };

    for (int it = 0; it < 60 && (hi - lo) > 1e-3 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }

    double r = 0.5 * (lo + hi);
    for (int it = 0; it < 60; ++it) {
        const double gr = g(r);
        if (gr == 0.0) {
            return r;
        }
        (gr < 0.0 ? lo : hi) = r;
        const double slope = f.phi + (1.0 - f.phi) * f.p * std::pow(r, f.p - 1.0);
        double next = r - gr / slope;
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        const bool converged = std::abs(next - r) <= 4.0 * std::numeric_limits<double>::epsilon() * next;
        r = next;
        if (converged || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
            break;
        }
    }
    if (std::abs(g(r)) > tol * std::max(1.0, s)) {
        std::ostringstream os;
        os.precision(17);
        os << "Freundlich inversion did not converge for s=" << s << ": bracket [" << lo << ", " << hi
           << "], residual " << g(r);
        throw NumericError(os.str());
    }
    return r;
}

inline double base_phi(const IsothermKind& k, double s, double tol)
{
    if (s == 0.0) {
        return 0.0;
    }
    if (const auto* f = std::get_if<Freundlich>(&k)) {
        return invert_freundlich(*f, s, tol);
    }
    if (const auto* pl = std::get_if<PowerLaw>(&k)) {
        return pl->m == 2.0 ? s * s : std::pow(s, pl->m);
    }
    return s;
}

inline double base_phi_prime(const IsothermKind& k, double s, double tol)
{
    if (const auto* f = std::get_if<Freundlich>(&k)) {
        if (s == 0.0) {
            return 0.0;
        }
        return 1.0 / base_beta_prime(k, invert_freundlich(*f, s, tol));
    }
    if (const auto* pl = std::get_if<PowerLaw>(&k)) {
        if (pl->m == 1.0) {
            return 1.0;
        }
        if (s == 0.0) {
            return 0.0;
        }
        return pl->m * std::pow(s, pl->m - 1.0);
    }
    return 1.0;
}

inline double base_phi_second(const IsothermKind& k, double s, double tol)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (const auto* f = std::get_if<Freundlich>(&k)) {
        if (s == 0.0) {
            // Phi(s) ~ (s/(1-phi))^(1/p) near 0.
            const double q = 1.0 / f->p;
            if (q > 2.0) {
                return 0.0;
            }
            if (q == 2.0) {
                return 2.0 / ((1.0 - f->phi) * (1.0 - f->phi));
            }
            return inf;
        }
        const double r = invert_freundlich(*f, s, tol);
        const double b1 = base_beta_prime(k, r);
        return -base_beta_second(k, r) / (b1 * b1 * b1);
    }
    if (const auto* pl = std::get_if<PowerLaw>(&k)) {
        const double m = pl->m;
        if (m == 1.0) {
            return 0.0;
        }
        if (s == 0.0) {
            return m > 2.0 ? 0.0 : (m == 2.0 ? 2.0 : inf);
        }
        return m * (m - 1.0) * std::pow(s, m - 2.0);
    }
    return 0.0;
}

inline double base_psi(const IsothermKind& k, double s, double tol)
{
    if (s == 0.0) {
        return 0.0;
    }
    if (const auto* f = std::get_if<Freundlich>(&k)) {
        // Legendre identity Psi(s) = s*r - int_0^r beta, r = Phi(s), written without cancellation.
        const double r  = invert_freundlich(*f, s, tol);
        const double rp = std::pow(r, f->p + 1.0);
        const double defect = s - (f->phi * r + (1.0 - f->phi) * std::pow(r, f->p));
        return 0.5 * f->phi * r * r + (1.0 - f->phi) * f->p / (f->p + 1.0) * rp + defect * r;
    }
    if (const auto* pl = std::get_if<PowerLaw>(&k)) {
        return std::pow(s, pl->m + 1.0) / (pl->m + 1.0);
    }
    return 0.5 * s * s;
}

} // namespace detail

namespace detail {

inline Window make_window(const IsothermKind& k, double eps, double tol)
{
    Window w{};
    w.lo       = eps;
    w.hi       = 1.0 / eps;
    w.phi_lo   = base_phi(k, w.lo, tol);
    w.phi_hi   = base_phi(k, w.hi, tol);
    w.slope_hi = base_phi_prime(k, w.hi, tol);
    w.psi_lo   = base_psi(k, w.lo, tol);
    w.psi_hi   = base_psi(k, w.hi, tol);
    return w;
}

} // namespace detail

/// Globally Lipschitz approximation Phi_eps with Phi_eps(0)=0, Phi_eps = Phi on [eps, 1/eps]
/// and Phi_eps' > 0 everywhere.
inline IsothermModel regularize(const IsothermModel& model, double eps)
{
    if (!(eps > 0.0 && eps < 1.0)) {
        throw DomainError("regularization eps must be in (0,1)");
    }
    if (model.regularization_eps()) {
        throw DomainError("model is already regularized");
    }
    IsothermModel out = model;
    out.table_.reset();
    out.window_ = detail::make_window(model.kind(), eps, model.inversion_tol());
    return out;
}

/// beta(r), the density sum carried by a concentration sum r >= 0.
inline double beta(const IsothermModel& model, double r)
{
    detail::require_nonnegative(r, "concentration sum r");
    if (model.window()) {
        const auto& w = *model.window();
        if (r < w.phi_lo) {
            return r * w.lo / w.phi_lo;
        }
        if (r > w.phi_hi) {
            return w.hi + (r - w.phi_hi) / w.slope_hi;
        }
    }
    return detail::base_beta(model.kind(), r);
}

inline double beta_prime(const IsothermModel& model, double r)
{
    detail::require_nonnegative(r, "concentration sum r");
    if (model.window()) {
        const auto& w = *model.window();
        if (r < w.phi_lo) {
            return w.lo / w.phi_lo;
        }
        if (r > w.phi_hi) {
            return 1.0 / w.slope_hi;
        }
    }
    return detail::base_beta_prime(model.kind(), r);
}

/// Phi = beta^{-1}, the concentration sum for a density sum s >= 0.
inline double phi(const IsothermModel& model, double s)
{
    detail::require_nonnegative(s, "density sum s");
    if (model.window()) {
        const auto& w = *model.window();
        if (s < w.lo) {
            return s * (w.phi_lo / w.lo);
        }
        if (s > w.hi) {
            return w.phi_hi + w.slope_hi * (s - w.hi);
        }
    }
    if (const auto* table = model.phi_table(); table && table->covers(s)) {
        return (*table)(s);
    }
    return detail::base_phi(model.kind(), s, model.inversion_tol());
}

/// Phi'(s); at s = 0 the limit value (0 for degenerate models).
inline double phi_prime(const IsothermModel& model, double s)
{
    detail::require_nonnegative(s, "density sum s");
    if (model.window()) {
        const auto& w = *model.window();
        if (s < w.lo) {
            return w.phi_lo / w.lo;
        }
        if (s > w.hi) {
            return w.slope_hi;
        }
    }
    return detail::base_phi_prime(model.kind(), s, model.inversion_tol());
}

inline double phi_second(const IsothermModel& model, double s)
{
    detail::require_nonnegative(s, "density sum s");
    if (const auto* w = model.window()) {
        if (s < w->lo || s > w->hi) {
            return 0.0;
        }
    }
    return detail::base_phi_second(model.kind(), s, model.inversion_tol());
}

/// Pressure coefficient rho(w) = Phi(w)/w, with rho(0) = Phi'(0).
inline double rho(const IsothermModel& model, double w)
{
    detail::require_nonnegative(w, "density sum w");
    if (w == 0.0) {
        return phi_prime(model, 0.0);
    }
    if (model.regularization_eps() || model.phi_table()) {
        return phi(model, w) / w;
    }
    const auto& k = model.kind();
    if (const auto* pl = std::get_if<PowerLaw>(&k)) {
        return pl->m == 2.0 ? w : std::pow(w, pl->m - 1.0);
    }
    if (std::holds_alternative<Linear>(k)) {
        return 1.0;
    }
    return detail::base_phi(k, w, model.inversion_tol()) / w;
}

/// Psi(s) = int_0^s Phi, the energy density.
inline double psi(const IsothermModel& model, double s)
{
    detail::require_nonnegative(s, "density sum s");
    const auto& k = model.kind();
    const double tol = model.inversion_tol();
    if (model.window()) {
        const auto& w = *model.window();
        if (s < w.lo) {
            return 0.5 * (w.phi_lo / w.lo) * s * s;
        }
        const double below = 0.5 * w.phi_lo * w.lo;
        if (s <= w.hi) {
            return below + detail::base_psi(k, s, tol) - w.psi_lo;
        }
        const double ds = s - w.hi;
        return below + (w.psi_hi - w.psi_lo) + w.phi_hi * ds + 0.5 * w.slope_hi * ds * ds;
    }
    return detail::base_psi(k, s, tol);
}

/// int_0^r beta, used by the concentration form of the degeneracy condition.
inline double beta_integral(const IsothermModel& model, double r)
{
    detail::require_nonnegative(r, "concentration sum r");
    if (model.regularization_eps()) {
        // r*beta(r) - int beta = Psi(beta(r)) (Legendre identity) gives int beta directly.
        const double s = beta(model, r);
        return r * s - psi(model, s);
    }
    return detail::base_beta_integral(model.kind(), r);
}

/// s*Phi'(s)/Phi(s) in a cancellation-free form; at s = 0 the limit value.
inline double elasticity(const IsothermModel& model, double s)
{
    detail::require_nonnegative(s, "density sum s");
    const auto& k = model.kind();
    if (model.regularization_eps() || model.phi_table()) {
        if (s == 0.0) {
            return 1.0;
        }
        return s * phi_prime(model, s) / phi(model, s);
    }
    if (const auto* f = std::get_if<Freundlich>(&k)) {
        if (s == 0.0) {
            return 1.0 / f->p;
        }
        const double r = detail::invert_freundlich(*f, s, model.inversion_tol());
        const double x = f->phi * std::pow(r, 1.0 - f->p);
        return (x + (1.0 - f->phi)) / (x + (1.0 - f->phi) * f->p);
    }
    if (const auto* pl = std::get_if<PowerLaw>(&k)) {
        return pl->m;
    }
    return 1.0;
}

/// s*Phi''(s)/Phi'(s) in a cancellation-free form.
inline double convexity_index(const IsothermModel& model, double s)
{
    detail::require_nonnegative(s, "density sum s");
    const auto& k = model.kind();
    if (model.regularization_eps() || model.phi_table()) {
        const double d1 = phi_prime(model, s);
        return d1 == 0.0 ? 0.0 : s * phi_second(model, s) / d1;
    }
    if (const auto* f = std::get_if<Freundlich>(&k)) {
        if (s == 0.0) {
            return 1.0 / f->p - 1.0;
        }
        const double r  = detail::invert_freundlich(*f, s, model.inversion_tol());
        const double x  = f->phi * std::pow(r, 1.0 - f->p);
        const double d  = x + (1.0 - f->phi) * f->p;
        return (1.0 - f->phi) * f->p * (1.0 - f->p) * (x + (1.0 - f->phi)) / (d * d);
    }
    if (const auto* pl = std::get_if<PowerLaw>(&k)) {
        return pl->m - 1.0;
    }
    return 0.0;
}

/// True when Phi'(0) = 0 (slow diffusion, finite propagation speed).
inline bool is_degenerate(const IsothermModel& model) { return phi_prime(model, 0.0) == 0.0; }

/// Sampled sup of Phi' on [0, bound]; every supported model has convex Phi so the endpoint
/// dominates, the interior samples guard against future non-convex additions.
inline double lipschitz_bound(const IsothermModel& model, double bound)
{
    detail::require_nonnegative(bound, "bound");
    double sup = std::max(phi_prime(model, 0.0), phi_prime(model, bound));
    constexpr int samples = 32;
    for (int k = 1; k < samples; ++k) {
        sup = std::max(sup, phi_prime(model, bound * k / samples));
    }
    return sup;
}

/// b(z) = B(|z|_1) z for a nonnegative concentration vector.
inline std::vector<double> map_b(const IsothermModel& model, std::span<const double> z)
{
    double norm = 0.0;
    for (double zi : z) {
        detail::require_nonnegative(zi, "concentration component");
        norm += zi;
    }
    std::vector<double> out(z.size(), 0.0);
    if (norm == 0.0) {
        return out;
    }
    const double scale = beta(model, norm) / norm;
    for (std::size_t i = 0; i < z.size(); ++i) {
        out[i] = scale * z[i];
    }
    return out;
}

/// z = Phi(|u|_1)/|u|_1 u, the concentrations carried by nonnegative densities u.
inline std::vector<double> map_b_inverse(const IsothermModel& model, std::span<const double> u)
{
    double norm = 0.0;
    for (double ui : u) {
        detail::require_nonnegative(ui, "density component");
        norm += ui;
    }
    std::vector<double> out(u.size(), 0.0);
    if (norm == 0.0) {
        return out;
    }
    const double scale = rho(model, norm);
    for (std::size_t i = 0; i < u.size(); ++i) {
        out[i] = scale * u[i];
    }
    return out;
}

inline std::string IsothermModel::describe() const
{
    std::ostringstream os;
    os.precision(17);
    if (const auto* f = std::get_if<Freundlich>(&kind_)) {
        os << "freundlich p=" << f->p << " phi=" << f->phi;
    }
    else if (const auto* pl = std::get_if<PowerLaw>(&kind_)) {
        os << "powerlaw m=" << pl->m;
    }
    else {
        os << "linear";
    }
    return os.str();
}

inline PhiTable::PhiTable(const IsothermModel& model, double s_min, double s_max, std::size_t nodes)
    : s_min_(s_min), s_max_(s_max)
{
    if (!(s_min > 0.0 && s_max > s_min) || nodes < 4) {
        throw DomainError("PhiTable needs 0 < s_min < s_max and at least 4 nodes");
    }
    log_min_ = std::log(s_min);
    dlog_    = (std::log(s_max) - log_min_) / static_cast<double>(nodes - 1);
    s_.resize(nodes);
    value_.resize(nodes);
    slope_.resize(nodes);
    for (std::size_t k = 0; k < nodes; ++k) {
        s_[k]     = k + 1 == nodes ? s_max : std::exp(log_min_ + dlog_ * static_cast<double>(k));
        value_[k] = detail::base_phi(model.kind(), s_[k], model.inversion_tol());
        slope_[k] = detail::base_phi_prime(model.kind(), s_[k], model.inversion_tol());
    }
    // Fritsch-Carlson limiter keeps the interpolant monotone.
    for (std::size_t k = 0; k + 1 < nodes; ++k) {
        const double secant = (value_[k + 1] - value_[k]) / (s_[k + 1] - s_[k]);
        if (secant == 0.0) {
            slope_[k] = slope_[k + 1] = 0.0;
            continue;
        }
        const double a   = slope_[k] / secant;
        const double b   = slope_[k + 1] / secant;
        const double mag = a * a + b * b;
        if (mag > 9.0) {
            const double tau = 3.0 / std::sqrt(mag);
            slope_[k]        = tau * a * secant;
            slope_[k + 1]    = tau * b * secant;
        }
    }
}

inline double PhiTable::operator()(double s) const noexcept
{
    const auto last = s_.size() - 1;
    auto k = static_cast<std::size_t>(std::max(0.0, std::floor((std::log(s) - log_min_) / dlog_)));
    k = std::min(k, last - 1);
    // the rounded index can be one off at node boundaries
    if (s < s_[k] && k > 0) {
        --k;
    }
    else if (s > s_[k + 1] && k + 1 < last) {
        ++k;
    }
    const double h  = s_[k + 1] - s_[k];
    const double t  = (s - s_[k]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * value_[k] + h10 * h * slope_[k] + h01 * value_[k + 1] + h11 * h * slope_[k + 1];
}

} // namespace gpme
