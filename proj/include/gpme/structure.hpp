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

/// @file structure.hpp
/// Sampled verification of the structural hypotheses on a declared range:
/// monotonicity of beta (H1), the elasticity sandwich 1 <= s Phi'/Phi <= 1/a (H2),
/// the convexity bound s Phi''/Phi' >= -1/a (H3), and the slow-diffusion condition in its
/// concentration form f(r) = r beta(r) - int_0^r beta >= c r^{(m+1)/m}.
/// Every number in the report is an extremum over the samples only.

#include "gpme/isotherm.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace gpme {

struct StructureReport {
    double s_min = 0.0;
    double s_max = 0.0;
    std::size_t samples = 0;

    double beta_prime_min = 0.0; ///< inf beta'(Phi(s))
    bool h1_ok = false;

    double elasticity_min = 0.0; ///< inf s Phi'/Phi
    double elasticity_max = 0.0; ///< sup s Phi'/Phi
    double a_lower = 0.0;        ///< inf Phi/(s Phi') = 1/elasticity_max
    bool a_h2_ok = false;

    double h3_min = 0.0; ///< inf s Phi''/Phi'
    bool h3_ok = false;

    double m_used = 1.0;
    double sm_constant = 0.0; ///< inf f(r)/r^{(m+1)/m}, r = Phi(s)
    bool sm_ok = false;

    bool all_ok() const noexcept { return h1_ok && a_h2_ok && h3_ok && sm_ok; }
};

/// Exponent m of the slow-diffusion condition a model is naturally checked against.
inline double natural_degeneracy_exponent(const IsothermModel& model)
{
    const auto& k = model.kind();
    if (const auto* f = std::get_if<Freundlich>(&k)) {
        return 1.0 / f->p;
    }
    if (const auto* pl = std::get_if<PowerLaw>(&k)) {
        return pl->m;
    }
    return 1.0;
}

inline StructureReport check_structure(const IsothermModel& model, double s_min, double s_max,
                                       std::size_t n_samples, std::optional<double> m = std::nullopt)
{
    if (!(s_min > 0.0 && s_max > s_min && std::isfinite(s_max))) {
        throw DomainError("check_structure needs 0 < s_min < s_max");
    }
    if (n_samples < 2) {
        throw DomainError("check_structure needs at least 2 samples");
    }
    constexpr double inf   = std::numeric_limits<double>::infinity();
    constexpr double slack = 1e-12;

    StructureReport rep;
    rep.s_min          = s_min;
    rep.s_max          = s_max;
    rep.samples        = n_samples;
    rep.m_used         = m.value_or(natural_degeneracy_exponent(model));
    rep.beta_prime_min = inf;
    rep.elasticity_min = inf;
    rep.elasticity_max = -inf;
    rep.h3_min         = inf;
    rep.sm_constant    = inf;

    const double exponent = (rep.m_used + 1.0) / rep.m_used;
    const double log_lo   = std::log(s_min);
    const double dlog     = (std::log(s_max) - log_lo) / static_cast<double>(n_samples - 1);
    bool increasing       = true;
    double prev_beta      = -inf;

    for (std::size_t k = 0; k < n_samples; ++k) {
        const double s = k + 1 == n_samples ? s_max : std::exp(log_lo + dlog * static_cast<double>(k));
        const double r = phi(model, s);

        const double b = beta(model, r);
        increasing     = increasing && b > prev_beta;
        prev_beta      = b;
        rep.beta_prime_min = std::min(rep.beta_prime_min, beta_prime(model, r));

        const double e     = elasticity(model, s);
        rep.elasticity_min = std::min(rep.elasticity_min, e);
        rep.elasticity_max = std::max(rep.elasticity_max, e);

        rep.h3_min = std::min(rep.h3_min, convexity_index(model, s));

        const double f = r * b - beta_integral(model, r);
        rep.sm_constant = std::min(rep.sm_constant, f / std::pow(r, exponent));
    }

    rep.h1_ok   = increasing && rep.beta_prime_min > 0.0;
    rep.a_lower = 1.0 / rep.elasticity_max;
    rep.a_h2_ok = rep.elasticity_min >= 1.0 - slack && rep.a_lower > 0.0 && rep.a_lower <= 1.0;
    rep.h3_ok   = rep.a_h2_ok && rep.h3_min >= -1.0 / rep.a_lower - slack;
    rep.sm_ok   = rep.m_used > 1.0 && std::isfinite(rep.sm_constant) && rep.sm_constant > 0.0;
    return rep;
}

/// CSV rendering with columns property, range_lo, range_hi, value, pass.
inline std::string structure_report_csv(const StructureReport& rep)
{
    std::ostringstream os;
    os.precision(17);
    const auto row = [&](const char* name, double value, bool pass) {
        os << name << ',' << rep.s_min << ',' << rep.s_max << ',' << value << ',' << (pass ? "true" : "false")
           << '\n';
    };
    os << "property,range_lo,range_hi,value,pass\n";
    row("H1_beta_prime_min", rep.beta_prime_min, rep.h1_ok);
    row("H2_elasticity_min", rep.elasticity_min, rep.a_h2_ok);
    row("H2_elasticity_max", rep.elasticity_max, rep.a_h2_ok);
    row("H2_a_lower", rep.a_lower, rep.a_h2_ok);
    row("H3_min", rep.h3_min, rep.h3_ok);
    row("Sm_exponent_m", rep.m_used, rep.m_used > 1.0);
    row("Sm_constant", rep.sm_constant, rep.sm_ok);
    os << "samples," << rep.s_min << ',' << rep.s_max << ',' << rep.samples << ','
       << (rep.all_ok() ? "true" : "false") << '\n';
    return os.str();
}

} // namespace gpme
