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

/// @file output.hpp
/// CSV writers for snapshots, diagnostics and reports. Every number is printed with 17
/// significant digits, so a rerun of the same spec reproduces the files byte for byte.

#include "gpme/grid.hpp"
#include "gpme/isotherm.hpp"
#include "gpme/trajectory.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gpme {

inline std::string format_number(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Header `# t=.. dim=.. cells=nx[,ny] h=hx[,hy] species=N`, then `i[,j],x[,y],u1..uN,w,rho` per cell.
inline std::string snapshot_csv(const Snapshot& snap, const Grid& g, const IsothermModel& model)
{
    const bool two = g.dim() == 2;
    std::ostringstream os;
    os << "# t=" << format_number(snap.t) << " dim=" << g.dim() << " cells=" << g.nx();
    if (two) {
        os << "," << g.ny();
    }
    os << " h=" << format_number(g.h(0));
    if (two) {
        os << "," << format_number(g.h(1));
    }
    os << " species=" << snap.u.size() << "\n";
    for (std::size_t c = 0; c < g.size(); ++c) {
        const Point x = g.center(c);
        os << g.i_of(c);
        if (two) {
            os << "," << g.j_of(c);
        }
        os << "," << format_number(x[0]);
        if (two) {
            os << "," << format_number(x[1]);
        }
        double w = 0.0;
        for (const auto& u : snap.u) {
            os << "," << format_number(u[c]);
            w += u[c];
        }
        os << "," << format_number(w) << "," << format_number(rho(model, w)) << "\n";
    }
    return os.str();
}

inline std::string diagnostics_csv(const RunTrajectory& traj)
{
    std::ostringstream os;
    os << "t,mass,sup_w,inf_w,energy_Psi,cum_grad_energy,support_radius";
    for (std::size_t i = 1; i <= traj.species; ++i) {
        os << ",mass_" << i << ",sup_" << i << ",grad_energy_rho_u" << i;
    }
    os << "\n";
    for (const auto& r : traj.diagnostics) {
        os << format_number(r.t) << "," << format_number(r.mass) << "," << format_number(r.sup_w) << ","
           << format_number(r.inf_w) << "," << format_number(r.energy_psi) << "," << format_number(r.cum_grad_energy)
           << "," << format_number(r.support_radius);
        for (const auto& s : r.species) {
            os << "," << format_number(s.mass) << "," << format_number(s.sup) << ","
               << format_number(s.grad_energy_rho_u);
        }
        os << "\n";
    }
    return os.str();
}

/// A report file: `# report=<name> params=k=v;k=v`, a header row, then data rows.
class ReportTable {
public:
    ReportTable(std::string name, std::vector<std::string> columns)
        : name_(std::move(name)), columns_(std::move(columns))
    {
    }

    ReportTable& param(const std::string& key, const std::string& value)
    {
        params_.emplace_back(key, value);
        return *this;
    }
    ReportTable& param(const std::string& key, double value) { return param(key, format_number(value)); }

    ReportTable& row(std::vector<std::string> cells)
    {
        rows_.push_back(std::move(cells));
        return *this;
    }

    const std::string& name() const noexcept { return name_; }

    std::string str() const
    {
        std::ostringstream os;
        os << "# report=" << name_ << " params=";
        for (std::size_t k = 0; k < params_.size(); ++k) {
            os << (k ? ";" : "") << params_[k].first << "=" << params_[k].second;
        }
        os << "\n";
        join(os, columns_);
        for (const auto& r : rows_) {
            join(os, r);
        }
        return os.str();
    }

private:
    static void join(std::ostringstream& os, const std::vector<std::string>& cells)
    {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            os << (k ? "," : "") << cells[k];
        }
        os << "\n";
    }

    std::string name_;
    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, std::string>> params_;
    std::vector<std::vector<std::string>> rows_;
};

/// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a_hex(std::string_view data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace gpme
