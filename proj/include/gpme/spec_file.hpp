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

/// @file spec_file.hpp
/// Line-oriented problem-spec files:
///
///     # comment
///     [section]
///     key = value
///
/// Sections and keys:
///   [domain]    dim, extent, cells, origin, T
///   [isotherm]  isotherm = freundlich p=<p> phi=<phi> | powerlaw m=<m> | linear;  inversion_tol
///   [species]   count, split (species in the first divide-rule block)
///   [initial]   u<i> = <term> [+ <term> ...]
///               term: bump center=<x[,y]> radius=<r> height=<h> [profile=cosine|indicator]
///                     constant <value>
///                     barenblatt [t0=<t>] [c=<C>] [center=<x[,y]>]   (powerlaw only)
///   [boundary]  kind = vacuum | dirichlet;  z<i> = <concentration> [ramp=<time>]
///   [forcing]   f<i> = <term> [window=<t_on>,<t_off>] [+ ...], term is bump or constant
///   [solver]    mode, safety, eps_supp, n_snapshots, M, phi_table, regularize_eps, center, collar_cells
///   [output]    dir, snapshots
///
/// Coordinates are comma separated, one per dimension. Species are numbered from 1.

#include "gpme/barenblatt.hpp"
#include "gpme/errors.hpp"
#include "gpme/grid.hpp"
#include "gpme/isotherm.hpp"
#include "gpme/problem.hpp"
#include "gpme/system_solver.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace gpme {

enum class BumpProfile { Cosine, Indicator };

struct BumpTerm {
    Point center{0.0, 0.0};
    double radius = 1.0;
    double height = 1.0;
    BumpProfile profile = BumpProfile::Cosine;

    double operator()(const Grid& g, const Point& x) const
    {
        const double d = g.distance(x, center);
        if (d >= radius) {
            return 0.0;
        }
        return profile == BumpProfile::Indicator ? height : 0.5 * height * (1.0 + std::cos(M_PI * d / radius));
    }
    bool operator==(const BumpTerm&) const = default;
};

struct ConstantTerm {
    double value = 0.0;
    bool operator==(const ConstantTerm&) const = default;
};

struct BarenblattTerm {
    double t0 = 1.0;
    double c  = 1.0;
    Point center{0.0, 0.0};
    bool operator==(const BarenblattTerm&) const = default;
};

using InitialTerm = std::variant<BumpTerm, ConstantTerm, BarenblattTerm>;

struct ForcingSpec {
    std::variant<BumpTerm, ConstantTerm> shape;
    double t_on  = 0.0;
    double t_off = std::numeric_limits<double>::infinity();
    bool operator==(const ForcingSpec&) const = default;
};

struct SolverSpec {
    SolverMode mode = SolverMode::Coupled;
    double safety = 0.5;
    double eps_supp = 1e-8;
    std::size_t n_snapshots = 50;
    std::optional<double> declared_m;
    bool phi_table = false;
    double regularize_eps = 0.0;
    std::optional<Point> center;
    int collar_cells = 3;
    bool operator==(const SolverSpec&) const = default;
};

struct ProblemSpec {
    int dim = 1;
    Point extent{1.0, 1.0};
    std::array<int, 2> cells{0, 1};
    Point origin{0.0, 0.0};
    double T = 1.0;
    IsothermModel isotherm = IsothermModel::linear();
    std::size_t species = 1;
    std::optional<std::size_t> split;
    std::vector<std::vector<InitialTerm>> initial;
    BoundaryKind boundary = BoundaryKind::Vacuum;
    std::vector<BoundaryValue> z;
    std::vector<std::vector<ForcingSpec>> forcing;
    SolverSpec solver;
    std::string out_dir = "out";
    bool write_snapshots = true;

    bool operator==(const ProblemSpec&) const = default;
};

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_on(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t k = 0; k <= s.size(); ++k) {
        if (k == s.size() || s[k] == sep) {
            out.push_back(trim(s.substr(start, k - start)));
            start = k + 1;
        }
    }
    return out;
}

inline std::vector<std::string> words(std::string_view s)
{
    std::vector<std::string> out;
    std::istringstream is{std::string(s)};
    for (std::string w; is >> w;) {
        out.push_back(w);
    }
    return out;
}

inline std::string fmt(double v)
{
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Parser state for one document; every error carries the offending line.
class SpecReader {
public:
    explicit SpecReader(std::string_view text) : text_(text) {}

    ProblemSpec read()
    {
        scan();
        ProblemSpec s;
        read_domain(s);
        read_isotherm(s);
        read_species(s);
        read_initial(s);
        read_boundary(s);
        read_forcing(s);
        read_solver(s);
        read_output(s);
        for (const auto& [key, entry] : entries_) {
            if (!entry.used) {
                throw ParseError("unknown key '" + key.second + "' in section [" + key.first + "]", entry.line);
            }
        }
        return s;
    }

    int line_of(const std::string& section, const std::string& key) const
    {
        const auto it = entries_.find({section, key});
        return it == entries_.end() ? 0 : it->second.line;
    }

private:
    struct Entry {
        std::string value;
        int line = 0;
        bool used = false;
    };
    using Key = std::pair<std::string, std::string>;

    void scan()
    {
        static const std::vector<std::string> sections{"domain", "isotherm", "species", "initial",
                                                       "boundary", "forcing", "solver", "output"};
        std::string section;
        int line_no = 0;
        std::istringstream is{std::string(text_)};
        for (std::string raw; std::getline(is, raw);) {
            ++line_no;
            const auto hash = raw.find('#');
            const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (line.empty()) {
                continue;
            }
            if (line.front() == '[') {
                if (line.back() != ']') {
                    throw ParseError("malformed section header '" + line + "'", line_no);
                }
                section = trim(std::string_view(line).substr(1, line.size() - 2));
                if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
                    throw ParseError("unknown section [" + section + "]", line_no);
                }
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ParseError("expected 'key = value', got '" + line + "'", line_no);
            }
            if (section.empty()) {
                throw ParseError("key outside of any section", line_no);
            }
            const std::string key = trim(std::string_view(line).substr(0, eq));
            const std::string val = trim(std::string_view(line).substr(eq + 1));
            if (key.empty()) {
                throw ParseError("empty key", line_no);
            }
            if (val.empty()) {
                throw ParseError("missing value for '" + key + "'", line_no);
            }
            if (!entries_.emplace(Key{section, key}, Entry{val, line_no, false}).second) {
                throw ParseError("duplicate key '" + key + "' in section [" + section + "]", line_no);
            }
        }
    }

    const Entry* get(const std::string& section, const std::string& key)
    {
        const auto it = entries_.find({section, key});
        if (it == entries_.end()) {
            return nullptr;
        }
        it->second.used = true;
        return &it->second;
    }

    const Entry& require(const std::string& section, const std::string& key)
    {
        const Entry* e = get(section, key);
        if (!e) {
            throw ParseError("missing required key '" + key + "' in section [" + section + "]");
        }
        return *e;
    }

    static double number(const std::string& s, int line)
    {
        double v = 0.0;
        const char* first = s.data();
        const char* last  = s.data() + s.size();
        if (!s.empty() && *first == '+') {
            ++first;
        }
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) {
            throw ParseError("expected a number, got '" + s + "'", line);
        }
        if (std::isnan(v)) {
            throw ParseError("NaN is not allowed", line);
        }
        return v;
    }

    static long integer(const std::string& s, int line)
    {
        long v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw ParseError("expected an integer, got '" + s + "'", line);
        }
        return v;
    }

    static bool boolean(const std::string& s, int line)
    {
        if (s == "true" || s == "yes" || s == "1") {
            return true;
        }
        if (s == "false" || s == "no" || s == "0") {
            return false;
        }
        throw ParseError("expected true or false, got '" + s + "'", line);
    }

    Point coords(const std::string& s, int line, int dim) const
    {
        const auto parts = split_on(s, ',');
        if (static_cast<int>(parts.size()) != dim) {
            throw ParseError("expected " + std::to_string(dim) + " coordinate(s), got '" + s + "'", line);
        }
        Point p{0.0, 0.0};
        for (int a = 0; a < dim; ++a) {
            p[a] = number(parts[a], line);
        }
        return p;
    }

    static std::map<std::string, std::string> options(const std::vector<std::string>& w, std::size_t from, int line)
    {
        std::map<std::string, std::string> out;
        for (std::size_t k = from; k < w.size(); ++k) {
            const auto eq = w[k].find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == w[k].size()) {
                throw ParseError("expected name=value, got '" + w[k] + "'", line);
            }
            if (!out.emplace(w[k].substr(0, eq), w[k].substr(eq + 1)).second) {
                throw ParseError("option '" + w[k].substr(0, eq) + "' given twice", line);
            }
        }
        return out;
    }

    static void no_leftovers(const std::map<std::string, std::string>& opts, int line)
    {
        if (!opts.empty()) {
            throw ParseError("unknown option '" + opts.begin()->first + "'", line);
        }
    }

    static std::string take(std::map<std::string, std::string>& opts, const std::string& key, int line,
                            const char* what)
    {
        const auto it = opts.find(key);
        if (it == opts.end()) {
            throw ParseError(std::string(what) + " needs " + key + "=", line);
        }
        std::string v = it->second;
        opts.erase(it);
        return v;
    }

    void read_domain(ProblemSpec& s)
    {
        if (const Entry* e = get("domain", "dim")) {
            const long d = integer(e->value, e->line);
            if (d != 1 && d != 2) {
                throw ParseError("dim must be 1 or 2", e->line);
            }
            s.dim = static_cast<int>(d);
        }
        const Entry& ext = require("domain", "extent");
        s.extent = {1.0, 1.0};
        const Point ep = coords(ext.value, ext.line, s.dim);
        for (int a = 0; a < s.dim; ++a) {
            if (!(ep[a] > 0.0) || !std::isfinite(ep[a])) {
                throw ParseError("extent must be positive and finite", ext.line);
            }
            s.extent[a] = ep[a];
        }
        const Entry& cel = require("domain", "cells");
        const auto parts = split_on(cel.value, ',');
        if (static_cast<int>(parts.size()) != s.dim) {
            throw ParseError("cells needs one count per dimension", cel.line);
        }
        s.cells = {1, 1};
        for (int a = 0; a < s.dim; ++a) {
            const long n = integer(parts[a], cel.line);
            if (n < 3 || n > 1'000'000) {
                throw ParseError("cells must be at least 3 per axis", cel.line);
            }
            s.cells[a] = static_cast<int>(n);
        }
        s.origin = {0.0, 0.0};
        if (const Entry* e = get("domain", "origin")) {
            s.origin = coords(e->value, e->line, s.dim);
        }
        else {
            for (int a = 0; a < s.dim; ++a) {
                s.origin[a] = -0.5 * s.extent[a];
            }
        }
        const Entry& t = require("domain", "T");
        s.T = number(t.value, t.line);
        if (!(s.T > 0.0) || !std::isfinite(s.T)) {
            throw ParseError("T must be positive and finite", t.line);
        }
    }

    void read_isotherm(ProblemSpec& s)
    {
        const Entry& e = require("isotherm", "isotherm");
        double tol     = IsothermModel::default_inversion_tol;
        int tol_line   = e.line;
        if (const Entry* t = get("isotherm", "inversion_tol")) {
            tol      = number(t->value, t->line);
            tol_line = t->line;
        }
        const auto w = words(e.value);
        auto opts    = options(w, 1, e.line);
        IsothermKind kind = Linear{};
        if (w[0] == "freundlich") {
            const double p   = number(take(opts, "p", e.line, "freundlich"), e.line);
            const double phi = number(take(opts, "phi", e.line, "freundlich"), e.line);
            kind             = Freundlich{p, phi};
        }
        else if (w[0] == "powerlaw") {
            kind = PowerLaw{number(take(opts, "m", e.line, "powerlaw"), e.line)};
        }
        else if (w[0] != "linear") {
            throw ParseError("unknown isotherm '" + w[0] + "' (freundlich, powerlaw or linear)", e.line);
        }
        no_leftovers(opts, e.line);
        try {
            s.isotherm = IsothermModel(kind, tol);
        }
        catch (const DomainError& err) {
            const std::string msg = err.what();
            throw ParseError(msg, msg.find("inversion_tol") != std::string::npos ? tol_line : e.line);
        }
    }

    void read_species(ProblemSpec& s)
    {
        if (const Entry* e = get("species", "count")) {
            const long n = integer(e->value, e->line);
            if (n < 1 || n > 1000) {
                throw ParseError("species count must be in [1, 1000]", e->line);
            }
            s.species = static_cast<std::size_t>(n);
        }
        if (const Entry* e = get("species", "split")) {
            const long k = integer(e->value, e->line);
            if (k < 1 || static_cast<std::size_t>(k) >= s.species) {
                throw ParseError("split must leave at least one species in each block", e->line);
            }
            s.split = static_cast<std::size_t>(k);
        }
    }

    /// Entries u1..uN (or z, f) in a section; anything else is left for the unknown-key check.
    std::vector<const Entry*> per_species(ProblemSpec& s, const std::string& section, const std::string& prefix)
    {
        std::vector<const Entry*> out(s.species, nullptr);
        for (auto& [key, entry] : entries_) {
            if (key.first != section || key.second.rfind(prefix, 0) != 0 || key.second.size() == prefix.size()) {
                continue;
            }
            const std::string idx = key.second.substr(prefix.size());
            if (idx.find_first_not_of("0123456789") != std::string::npos) {
                continue;
            }
            const long i = integer(idx, entry.line);
            if (i < 1 || static_cast<std::size_t>(i) > s.species) {
                throw ParseError("species index " + idx + " outside 1.." + std::to_string(s.species), entry.line);
            }
            entry.used = true;
            out[static_cast<std::size_t>(i - 1)] = &entry;
        }
        return out;
    }

    BumpTerm bump(std::map<std::string, std::string>& opts, int line, int dim) const
    {
        BumpTerm b;
        b.center = coords(take(opts, "center", line, "bump"), line, dim);
        b.radius = number(take(opts, "radius", line, "bump"), line);
        b.height = number(take(opts, "height", line, "bump"), line);
        if (auto it = opts.find("profile"); it != opts.end()) {
            if (it->second == "cosine") {
                b.profile = BumpProfile::Cosine;
            }
            else if (it->second == "indicator") {
                b.profile = BumpProfile::Indicator;
            }
            else {
                throw ParseError("profile must be cosine or indicator", line);
            }
            opts.erase(it);
        }
        if (!(b.radius > 0.0) || !std::isfinite(b.radius)) {
            throw ParseError("bump radius must be positive", line);
        }
        if (!(b.height >= 0.0) || !std::isfinite(b.height)) {
            throw ParseError("initial and forcing amplitudes must be finite and nonnegative (0 <= data <= M)", line);
        }
        return b;
    }

    static ConstantTerm constant(const std::vector<std::string>& w, int line)
    {
        if (w.size() < 2) {
            throw ParseError("constant needs a value", line);
        }
        const double v = number(w[1], line);
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ParseError("initial and forcing amplitudes must be finite and nonnegative (0 <= data <= M)", line);
        }
        return ConstantTerm{v};
    }

    void read_initial(ProblemSpec& s)
    {
        const auto lines = per_species(s, "initial", "u");
        s.initial.assign(s.species, {});
        for (std::size_t i = 0; i < s.species; ++i) {
            if (!lines[i]) {
                continue;
            }
            const int line = lines[i]->line;
            for (const auto& part : split_on(lines[i]->value, '+')) {
                const auto w = words(part);
                if (w.empty()) {
                    throw ParseError("empty term in initial data", line);
                }
                if (w[0] == "bump") {
                    auto opts = options(w, 1, line);
                    s.initial[i].push_back(bump(opts, line, s.dim));
                    no_leftovers(opts, line);
                }
                else if (w[0] == "constant") {
                    if (w.size() != 2) {
                        throw ParseError("constant takes exactly one value", line);
                    }
                    s.initial[i].push_back(constant(w, line));
                }
                else if (w[0] == "barenblatt") {
                    const auto* pl = std::get_if<PowerLaw>(&s.isotherm.kind());
                    if (!pl || !(pl->m > 1.0)) {
                        throw ParseError("barenblatt initial data needs a powerlaw isotherm with m > 1", line);
                    }
                    auto opts = options(w, 1, line);
                    BarenblattTerm b;
                    if (opts.count("t0")) {
                        b.t0 = number(take(opts, "t0", line, "barenblatt"), line);
                    }
                    if (opts.count("c")) {
                        b.c = number(take(opts, "c", line, "barenblatt"), line);
                    }
                    if (opts.count("center")) {
                        b.center = coords(take(opts, "center", line, "barenblatt"), line, s.dim);
                    }
                    no_leftovers(opts, line);
                    if (!(b.t0 > 0.0) || !(b.c > 0.0) || !std::isfinite(b.t0) || !std::isfinite(b.c)) {
                        throw ParseError("barenblatt needs t0 > 0 and c > 0", line);
                    }
                    s.initial[i].push_back(b);
                }
                else {
                    throw ParseError("unknown initial term '" + w[0] + "' (bump, constant or barenblatt)", line);
                }
            }
        }
    }

    void read_boundary(ProblemSpec& s)
    {
        if (const Entry* e = get("boundary", "kind")) {
            if (e->value == "vacuum") {
                s.boundary = BoundaryKind::Vacuum;
            }
            else if (e->value == "dirichlet") {
                s.boundary = BoundaryKind::Dirichlet;
            }
            else {
                throw ParseError("boundary kind must be vacuum or dirichlet", e->line);
            }
        }
        const auto lines = per_species(s, "boundary", "z");
        s.z.clear();
        if (s.boundary == BoundaryKind::Vacuum) {
            for (const Entry* e : lines) {
                if (e) {
                    throw ParseError("boundary concentrations need kind = dirichlet", e->line);
                }
            }
            return;
        }
        s.z.assign(s.species, BoundaryValue{});
        for (std::size_t i = 0; i < s.species; ++i) {
            if (!lines[i]) {
                continue;
            }
            const int line = lines[i]->line;
            const auto w   = words(lines[i]->value);
            auto opts      = options(w, 1, line);
            s.z[i].value   = number(w[0], line);
            if (opts.count("ramp")) {
                s.z[i].ramp = number(take(opts, "ramp", line, "boundary"), line);
            }
            no_leftovers(opts, line);
            if (!(s.z[i].value >= 0.0) || !std::isfinite(s.z[i].value)) {
                throw ParseError("boundary concentrations must be finite and nonnegative", line);
            }
            if (!(s.z[i].ramp >= 0.0) || !std::isfinite(s.z[i].ramp)) {
                throw ParseError("boundary ramp time must be nonnegative", line);
            }
        }
    }

    void read_forcing(ProblemSpec& s)
    {
        const auto lines = per_species(s, "forcing", "f");
        s.forcing.assign(s.species, {});
        for (std::size_t i = 0; i < s.species; ++i) {
            if (!lines[i]) {
                continue;
            }
            const int line = lines[i]->line;
            for (const auto& part : split_on(lines[i]->value, '+')) {
                auto w = words(part);
                if (w.empty()) {
                    throw ParseError("empty term in forcing", line);
                }
                ForcingSpec f;
                std::optional<std::string> window;
                for (auto it = w.begin(); it != w.end();) {
                    if (it->rfind("window=", 0) == 0) {
                        window = it->substr(7);
                        it     = w.erase(it);
                    }
                    else {
                        ++it;
                    }
                }
                if (w[0] == "bump") {
                    auto opts = options(w, 1, line);
                    f.shape   = bump(opts, line, s.dim);
                    no_leftovers(opts, line);
                }
                else if (w[0] == "constant") {
                    if (w.size() != 2) {
                        throw ParseError("constant takes exactly one value", line);
                    }
                    f.shape = constant(w, line);
                }
                else {
                    throw ParseError("unknown forcing term '" + w[0] + "' (bump or constant)", line);
                }
                if (window) {
                    const auto tw = split_on(*window, ',');
                    if (tw.size() != 2) {
                        throw ParseError("window needs t_on,t_off", line);
                    }
                    f.t_on  = number(tw[0], line);
                    f.t_off = number(tw[1], line);
                    if (!(f.t_off > f.t_on) || !(f.t_on >= 0.0)) {
                        throw ParseError("forcing window needs 0 <= t_on < t_off", line);
                    }
                }
                s.forcing[i].push_back(f);
            }
        }
    }

    void read_solver(ProblemSpec& s)
    {
        SolverSpec& c = s.solver;
        if (const Entry* e = get("solver", "mode")) {
            if (e->value == "coupled") {
                c.mode = SolverMode::Coupled;
            }
            else if (e->value == "decomposed") {
                c.mode = SolverMode::Decomposed;
            }
            else {
                throw ParseError("mode must be coupled or decomposed", e->line);
            }
        }
        if (const Entry* e = get("solver", "safety")) {
            c.safety = number(e->value, e->line);
            if (!(c.safety > 0.0 && c.safety <= 1.0)) {
                throw ParseError("safety must be in (0,1]", e->line);
            }
        }
        if (const Entry* e = get("solver", "eps_supp")) {
            c.eps_supp = number(e->value, e->line);
            if (!(c.eps_supp > 0.0) || !std::isfinite(c.eps_supp)) {
                throw ParseError("eps_supp must be positive", e->line);
            }
        }
        if (const Entry* e = get("solver", "n_snapshots")) {
            const long n = integer(e->value, e->line);
            if (n < 1) {
                throw ParseError("n_snapshots must be positive", e->line);
            }
            c.n_snapshots = static_cast<std::size_t>(n);
        }
        if (const Entry* e = get("solver", "M")) {
            c.declared_m = number(e->value, e->line);
            if (!(*c.declared_m > 0.0) || !std::isfinite(*c.declared_m)) {
                throw ParseError("declared bound M must be positive", e->line);
            }
        }
        if (const Entry* e = get("solver", "phi_table")) {
            c.phi_table = boolean(e->value, e->line);
        }
        if (const Entry* e = get("solver", "regularize_eps")) {
            c.regularize_eps = number(e->value, e->line);
            if (!(c.regularize_eps >= 0.0 && c.regularize_eps < 1.0)) {
                throw ParseError("regularize_eps must be in [0,1) (0 disables it)", e->line);
            }
        }
        if (const Entry* e = get("solver", "center")) {
            c.center = coords(e->value, e->line, s.dim);
        }
        if (const Entry* e = get("solver", "collar_cells")) {
            const long n = integer(e->value, e->line);
            if (n < 0) {
                throw ParseError("collar_cells must be nonnegative", e->line);
            }
            c.collar_cells = static_cast<int>(n);
        }
    }

    void read_output(ProblemSpec& s)
    {
        if (const Entry* e = get("output", "dir")) {
            s.out_dir = e->value;
        }
        if (const Entry* e = get("output", "snapshots")) {
            s.write_snapshots = boolean(e->value, e->line);
        }
    }

    std::string_view text_;
    std::map<Key, Entry> entries_;
};

} // namespace detail

inline Grid build_grid(const ProblemSpec& s)
{
    if (s.dim == 1) {
        return Grid(s.extent[0], s.cells[0], s.origin[0]);
    }
    return Grid(s.extent, s.cells, s.origin);
}

inline Field initial_field(const ProblemSpec& s, const Grid& g, std::size_t species)
{
    Field u(g);
    for (const auto& term : s.initial.at(species)) {
        std::visit(
            [&](const auto& t) {
                using T = std::decay_t<decltype(t)>;
                if constexpr (std::is_same_v<T, BumpTerm>) {
                    u += Field::sample(g, [&](const Point& x) { return t(g, x); });
                }
                else if constexpr (std::is_same_v<T, ConstantTerm>) {
                    u += Field(g, t.value);
                }
                else {
                    const double m = std::get<PowerLaw>(s.isotherm.kind()).m;
                    u += Barenblatt(m, g.dim(), t.c, t.center).sample(g, t.t0);
                }
            },
            term);
    }
    return u;
}

inline std::vector<ForcingTerm> forcing_terms(const ProblemSpec& s, const Grid& g, std::size_t species)
{
    std::vector<ForcingTerm> out;
    for (const auto& f : s.forcing.at(species)) {
        Field profile = std::visit(
            [&](const auto& t) {
                using T = std::decay_t<decltype(t)>;
                if constexpr (std::is_same_v<T, BumpTerm>) {
                    return Field::sample(g, [&](const Point& x) { return t(g, x); });
                }
                else {
                    return Field(g, t.value);
                }
            },
            f.shape);
        out.push_back(ForcingTerm{std::move(profile), f.t_on, f.t_off});
    }
    return out;
}

inline SystemProblem build_problem(const ProblemSpec& s)
{
    const Grid g = build_grid(s);
    SystemProblem p{g, s.isotherm, {}, {}, s.boundary, s.z, s.T, s.solver.declared_m};
    for (std::size_t i = 0; i < s.species; ++i) {
        p.u0.push_back(initial_field(s, g, i));
        p.forcing.push_back(forcing_terms(s, g, i));
    }
    return p;
}

inline SolverConfig build_config(const ProblemSpec& s)
{
    SolverConfig c;
    c.safety         = s.solver.safety;
    c.eps_supp       = s.solver.eps_supp;
    c.n_snapshots    = s.solver.n_snapshots;
    c.mode           = s.solver.mode;
    c.use_phi_table  = s.solver.phi_table;
    c.regularize_eps = s.solver.regularize_eps;
    c.center         = s.solver.center;
    c.collar_cells   = s.solver.collar_cells;
    return c;
}

/// The two divide-rule blocks: species 1..split and split+1..N.
inline std::pair<SystemProblem, SystemProblem> split_problem(const ProblemSpec& s)
{
    if (!s.split) {
        throw DomainError("divide-rule needs [species] split");
    }
    SystemProblem full = build_problem(s);
    SystemProblem hat  = full;
    SystemProblem chk  = full;
    const auto k       = static_cast<std::ptrdiff_t>(*s.split);
    hat.u0.assign(full.u0.begin(), full.u0.begin() + k);
    hat.forcing.assign(full.forcing.begin(), full.forcing.begin() + k);
    chk.u0.assign(full.u0.begin() + k, full.u0.end());
    chk.forcing.assign(full.forcing.begin() + k, full.forcing.end());
    if (s.boundary == BoundaryKind::Dirichlet) {
        hat.z_d.assign(full.z_d.begin(), full.z_d.begin() + k);
        chk.z_d.assign(full.z_d.begin() + k, full.z_d.end());
    }
    return {std::move(hat), std::move(chk)};
}

/// Parses and validates a spec; the data bound M, when declared, is checked here too.
inline ProblemSpec parse_spec(std::string_view text)
{
    detail::SpecReader reader(text);
    ProblemSpec s = reader.read();
    if (s.solver.declared_m) {
        const SystemProblem p = build_problem(s);
        Field w(p.grid);
        for (const auto& u : p.u0) {
            w += u;
        }
        const int line = reader.line_of("solver", "M");
        if (w.max() > *s.solver.declared_m) {
            throw ParseError("initial data exceed the declared bound M (0 <= u0 <= M)", line);
        }
        for (const auto& terms : p.forcing) {
            for (const auto& t : terms) {
                if (t.profile.max() > *s.solver.declared_m) {
                    throw ParseError("forcing exceeds the declared bound M (0 <= f <= M)", line);
                }
            }
        }
    }
    return s;
}

namespace detail {

inline std::string coords_text(const Point& p, int dim)
{
    return dim == 1 ? fmt(p[0]) : fmt(p[0]) + "," + fmt(p[1]);
}

inline std::string bump_text(const BumpTerm& b, int dim)
{
    return "bump center=" + coords_text(b.center, dim) + " radius=" + fmt(b.radius) + " height=" + fmt(b.height) +
           " profile=" + (b.profile == BumpProfile::Cosine ? "cosine" : "indicator");
}

} // namespace detail

/// Fully resolved spec text; parse_spec(emit_spec(s)) == s.
inline std::string emit_spec(const ProblemSpec& s)
{
    using detail::coords_text;
    using detail::fmt;
    std::ostringstream os;
    os << "# resolved problem specification, every default written out\n\n";
    os << "[domain]\n";
    os << "dim = " << s.dim << "\n";
    os << "extent = " << coords_text(s.extent, s.dim) << "\n";
    os << "cells = " << (s.dim == 1 ? std::to_string(s.cells[0])
                                    : std::to_string(s.cells[0]) + "," + std::to_string(s.cells[1]))
       << "\n";
    os << "origin = " << coords_text(s.origin, s.dim) << "\n";
    os << "T = " << fmt(s.T) << "\n\n";

    os << "[isotherm]\n";
    os << "isotherm = " << s.isotherm.describe() << "\n";
    os << "inversion_tol = " << fmt(s.isotherm.inversion_tol()) << "\n\n";

    os << "[species]\n";
    os << "count = " << s.species << "\n";
    if (s.split) {
        os << "split = " << *s.split << "\n";
    }
    os << "\n[initial]\n";
    for (std::size_t i = 0; i < s.species; ++i) {
        if (s.initial[i].empty()) {
            os << "# u" << i + 1 << " is identically zero\n";
            continue;
        }
        os << "u" << i + 1 << " =";
        for (std::size_t k = 0; k < s.initial[i].size(); ++k) {
            os << (k ? " + " : " ");
            std::visit(
                [&](const auto& t) {
                    using T = std::decay_t<decltype(t)>;
                    if constexpr (std::is_same_v<T, BumpTerm>) {
                        os << detail::bump_text(t, s.dim);
                    }
                    else if constexpr (std::is_same_v<T, ConstantTerm>) {
                        os << "constant " << fmt(t.value);
                    }
                    else {
                        os << "barenblatt t0=" << fmt(t.t0) << " c=" << fmt(t.c)
                           << " center=" << coords_text(t.center, s.dim);
                    }
                },
                s.initial[i][k]);
        }
        os << "\n";
    }

    os << "\n[boundary]\n";
    os << "kind = " << (s.boundary == BoundaryKind::Vacuum ? "vacuum" : "dirichlet") << "\n";
    for (std::size_t i = 0; i < s.z.size(); ++i) {
        os << "z" << i + 1 << " = " << fmt(s.z[i].value) << " ramp=" << fmt(s.z[i].ramp) << "\n";
    }

    os << "\n[forcing]\n";
    for (std::size_t i = 0; i < s.species; ++i) {
        if (s.forcing[i].empty()) {
            continue;
        }
        os << "f" << i + 1 << " =";
        for (std::size_t k = 0; k < s.forcing[i].size(); ++k) {
            const auto& f = s.forcing[i][k];
            os << (k ? " + " : " ");
            if (const auto* b = std::get_if<BumpTerm>(&f.shape)) {
                os << detail::bump_text(*b, s.dim);
            }
            else {
                os << "constant " << fmt(std::get<ConstantTerm>(f.shape).value);
            }
            os << " window=" << fmt(f.t_on) << "," << fmt(f.t_off);
        }
        os << "\n";
    }

    const SolverSpec& c = s.solver;
    os << "\n[solver]\n";
    os << "mode = " << (c.mode == SolverMode::Coupled ? "coupled" : "decomposed") << "\n";
    os << "safety = " << fmt(c.safety) << "\n";
    os << "eps_supp = " << fmt(c.eps_supp) << "\n";
    os << "n_snapshots = " << c.n_snapshots << "\n";
    if (c.declared_m) {
        os << "M = " << fmt(*c.declared_m) << "\n";
    }
    os << "phi_table = " << (c.phi_table ? "true" : "false") << "\n";
    os << "regularize_eps = " << fmt(c.regularize_eps) << "\n";
    if (c.center) {
        os << "center = " << coords_text(*c.center, s.dim) << "\n";
    }
    os << "collar_cells = " << c.collar_cells << "\n";

    os << "\n[output]\n";
    os << "dir = " << s.out_dir << "\n";
    os << "snapshots = " << (s.write_snapshots ? "true" : "false") << "\n";
    return os.str();
}

} // namespace gpme
