// SPDX-License-Identifier: Apache-2.0
//
// oobrad - spatial out-of-band radiation analysis for multi-antenna transmitters
// Copyright (C) 2026 The oobrad authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Command line front end: one verb per experiment, results go to --out (or output_dir of the config)

#include "oobrad/config.hpp"
#include "oobrad/experiments.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace
{
    struct Options
    {
        std::string config;
        std::optional<std::uint64_t> seed;
        std::optional<std::string> out;
        std::optional<std::size_t> mc_symbols;
        unsigned threads = 0;
    };

    constexpr int exit_ok = 0, exit_other = 1, exit_config = 2, exit_gate = 3;

    oobrad::Config load(const Options &o)
    {
        oobrad::Config cfg = o.config.empty() ? oobrad::Config{} : oobrad::load_config(o.config);
        auto &sc = cfg.scenario;
        if (o.seed)
            sc.seed = *o.seed;
        if (o.out)
            sc.output_dir = *o.out;
        if (o.mc_symbols)
            sc.mc.n_symbols = *o.mc_symbols;
        sc.validate();
        return cfg;
    }

    std::filesystem::path prepare_out(const oobrad::Scenario &sc)
    {
        std::filesystem::path out(sc.output_dir);
        std::error_code ec;
        std::filesystem::create_directories(out, ec);
        if (ec)
            throw oobrad::IoError("cannot create output directory '" + out.string() + "': " + ec.message());
        return out;
    }

    void print_summary(const std::filesystem::path &file)
    {
        std::ifstream in(file);
        std::cout << in.rdbuf();
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"oobrad: spatial out-of-band radiation of multi-antenna transmitters with nonlinear amplifiers"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App *sub)
    {
        sub->add_option("--config", o.config, "scenario file (INI); built-in defaults when omitted")->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "override the scenario seed");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--mc-symbols", o.mc_symbols, "symbols per Monte-Carlo run")->check(CLI::PositiveNumber);
        sub->add_option("--threads", o.threads, "worker threads, 0 = hardware concurrency");
    };

    auto *fig1 = app.add_subcommand("fig1", "PSDs of a Rayleigh multiuser system");
    auto *fig2 = app.add_subcommand("fig2", "adjacent-band radiation pattern in line of sight");
    auto *fig3 = app.add_subcommand("fig3", "eigenvalue CCDFs of the transmit spectral matrix, K users and K = 1");
    auto *validate = app.add_subcommand("validate", "analytical versus Monte-Carlo gates");
    auto *aclr = app.add_subcommand("aclr", "per-antenna, MIMO and SISO ACLR");
    auto *sweep = app.add_subcommand("sweep-c1", "MIMO-ACLR across power allocations and path losses");
    for (auto *sub : {fig1, fig2, fig3, validate, aclr, sweep})
        add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try
    {
        const oobrad::Config cfg = load(o);
        const oobrad::Scenario &sc = cfg.scenario;
        oobrad::set_thread_count(o.threads);
        const auto out = prepare_out(sc);

        if (fig1->parsed())
            oobrad::run_fig1(sc, out);
        else if (fig2->parsed())
            oobrad::run_fig2(sc, out);
        else if (fig3->parsed())
            oobrad::run_fig3(sc, out);
        else if (aclr->parsed())
            oobrad::run_aclr(sc, out);
        else if (sweep->parsed())
            oobrad::run_sweep_c1(sc, cfg.c1, out);
        else if (validate->parsed())
        {
            const auto rep = oobrad::run_validate(sc, out);
            print_summary(out / "validation.txt");
            return rep.passed() ? exit_ok : exit_gate;
        }
        print_summary(out / "summary.txt");
        return exit_ok;
    }
    catch (const oobrad::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_other;
    }
}
