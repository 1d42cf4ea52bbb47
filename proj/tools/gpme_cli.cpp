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
// gpme: command-line front end.
//
//   gpme run <spec> [--out DIR]
//   gpme divide-rule <spec> [--out DIR] [--post-window N]
//   gpme persistence <spec> [--out DIR]
//   gpme benchmark --out DIR [--quick]
//   gpme check-isotherm (--p P --phi PHI | --m M | --linear) [--smin S] [--smax S] [--samples N]

#include "gpme/run.hpp"
#include "gpme/structure.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_spec(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw gpme::ParseError("cannot open spec file " + path);
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int report(const gpme::CommandResult& r)
{
    (r.exit_code == gpme::exit_ok ? std::cout : std::cerr) << r.message << "\n";
    if (r.manifest) {
        std::cout << "output: " << r.manifest->output_dir << " (" << r.manifest->files.size() << " files)\n";
    }
    return r.exit_code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-species porous medium system solver"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_dir;
    std::size_t post_window = 50;

    auto* run = app.add_subcommand("run", "Solve the problem in a spec file");
    run->add_option("spec", spec_path, "problem-spec file")->required();
    run->add_option("--out", out_dir, "output directory (overrides [output] dir)");

    auto* divide = app.add_subcommand("divide-rule", "Compare the full system with its two blocks");
    divide->add_option("spec", spec_path, "problem-spec file with [species] split")->required();
    divide->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    divide->add_option("--post-window", post_window, "steps after touch used for the growth ratio");

    auto* persist = app.add_subcommand("persistence", "Check that the support never shrinks");
    persist->add_option("spec", spec_path, "problem-spec file (vacuum boundary)")->required();
    persist->add_option("--out", out_dir, "output directory (overrides [output] dir)");

    bool quick = false;
    auto* bench = app.add_subcommand("benchmark", "Barenblatt refinement and support-growth suite");
    bench->add_option("--out", out_dir, "output directory")->required();
    bench->add_flag("--quick", quick, "short horizons");

    double p = 0.0, phi = 0.0, m = 0.0, smin = 1e-4, smax = 1e3;
    std::size_t samples = 2000;
    bool linear         = false;
    auto* iso = app.add_subcommand("check-isotherm", "Print the structure report of an isotherm as CSV");
    auto* op  = iso->add_option("--p", p, "Freundlich exponent in (0,1)");
    iso->add_option("--phi", phi, "Freundlich linear weight in [0,1)")->needs(op);
    auto* om = iso->add_option("--m", m, "power-law exponent >= 1");
    auto* ol = iso->add_flag("--linear", linear, "linear isotherm");
    op->excludes(om)->excludes(ol);
    om->excludes(ol);
    iso->add_option("--smin", smin, "lower end of the sampled range");
    iso->add_option("--smax", smax, "upper end of the sampled range");
    iso->add_option("--samples", samples, "log-spaced samples");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : gpme::exit_parse;
    }

    const std::optional<std::filesystem::path> out =
        out_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_dir);
    try {
        if (*run) {
            return report(gpme::run_command(read_spec(spec_path), out));
        }
        if (*divide) {
            return report(gpme::divide_rule_command(read_spec(spec_path), out, post_window));
        }
        if (*persist) {
            return report(gpme::persistence_command(read_spec(spec_path), out));
        }
        if (*bench) {
            return report(gpme::benchmark_command(out_dir, {quick}));
        }
        if (*iso) {
            gpme::IsothermKind kind = gpme::Linear{};
            if (*op) {
                kind = gpme::Freundlich{p, phi};
            }
            else if (*om) {
                kind = gpme::PowerLaw{m};
            }
            else if (!linear) {
                std::cerr << "check-isotherm needs --p/--phi, --m or --linear\n";
                return gpme::exit_parse;
            }
            const gpme::IsothermModel model(kind);
            std::cout << gpme::structure_report_csv(gpme::check_structure(model, smin, smax, samples));
            return gpme::exit_ok;
        }
    }
    catch (const gpme::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return gpme::exit_parse;
    }
    catch (const gpme::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return gpme::exit_parse;
    }
    catch (const gpme::InvariantError& e) {
        std::cerr << "invariant violated: " << e.what() << "\n";
        return gpme::exit_invariant;
    }
    catch (const gpme::Error& e) {
        std::cerr << "solver aborted: " << e.what() << "\n";
        return gpme::exit_abort;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return gpme::exit_abort;
    }
    return gpme::exit_ok;
}
