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

#ifndef OOBRAD_EXPERIMENTS_HPP
#define OOBRAD_EXPERIMENTS_HPP

#include "analysis.hpp"
#include "config.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "scenario.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

namespace oobrad
{
    namespace fs = std::filesystem;

    namespace detail
    {
        inline double mean_of(const std::vector<double> &v)
        {
            return v.empty() ? std::numeric_limits<double>::quiet_NaN() : std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
        }

        inline std::string scenario_line(const Scenario &sc)
        {
            return fmt::format("scenario {}: M = {}, K = {}, channel = {}, seed = {}", sc.name, sc.antennas, sc.users,
                               sc.channel == ChannelKind::los ? "los" : "rayleigh", sc.seed);
        }

        // Mean of S over the in-band bins
        inline double in_band_level(const std::vector<double> &psd, const std::vector<double> &freqs, double bandwidth)
        {
            double acc = 0.0;
            int n = 0;
            for (std::size_t j = 0; j < freqs.size(); ++j)
                if (std::abs(freqs[j]) < 0.5 * bandwidth)
                    acc += psd[j], ++n;
            return acc / n;
        }

        inline void write_psd_csv(const fs::path &path, const Scenario &sc, const std::string &what, const std::vector<double> &freqs,
                                  const std::vector<double> &psd, double bandwidth, double ref)
        {
            CsvWriter csv(path);
            csv.comment(what);
            csv.comment(scenario_line(sc) + ", realization 0");
            csv.comment("value_dB: 0 dB = average of S_tx(f) over the allocated band |f| < B/2");
            csv.header({"freq_over_B", "value_dB"});
            for (std::size_t j = 0; j < freqs.size(); ++j)
                csv.row({freqs[j] / bandwidth, to_db(psd[j] / ref)});
        }

        inline PlotSeries series_db(const std::string &label, const std::vector<double> &freqs, const std::vector<double> &psd,
                                    double bandwidth, double ref, const std::string &color)
        {
            PlotSeries s;
            s.label = label;
            s.color = color;
            for (std::size_t j = 0; j < freqs.size(); ++j)
            {
                s.x.push_back(freqs[j] / bandwidth);
                s.y.push_back(to_db(psd[j] / ref));
            }
            return s;
        }
    }

    // ---- power spectral densities of a Rayleigh multiuser system ----

    struct Fig1Result
    {
        int realizations = 0;
        double weakest_gain_db = 0.0;       // mean over realizations
        double weakest_gain_first_db = 0.0;
        double worst_gain_db = 0.0;         // pooled adjacent bands, mean over realizations
        double worst_gain_first_db = 0.0;
        double victim_below_max = 0.0;      // fraction of bins where the victim stays below M S_max
    };

    inline StudyOptions fig_study_options(const Scenario &sc)
    {
        StudyOptions o;
        for (double f : sc.ccdf_freqs_over_b)
            o.eigen_freqs.push_back(f * sc.bandwidth());
        return o;
    }

    inline Fig1Result summarize_fig1(const Study &st)
    {
        if (st.weakest_gain_db.empty() || st.worst_gain_db.empty() || st.first.victim_first.empty())
            throw ParameterError("fig1: study lacks user, eigenvalue or victim spectra");
        Fig1Result r;
        r.realizations = st.realizations;
        r.weakest_gain_db = detail::mean_of(st.weakest_gain_db);
        r.weakest_gain_first_db = st.weakest_gain_db.front();
        r.worst_gain_db = detail::mean_of(st.worst_gain_db);
        r.worst_gain_first_db = st.worst_gain_db.front();
        std::size_t below = 0;
        for (std::size_t j = 0; j < st.freqs.size(); ++j)
            below += st.first.victim_first[j] <= st.antennas * st.first.s_max[j] * (1.0 + 1e-12);
        r.victim_below_max = double(below) / double(st.freqs.size());
        return r;
    }

    inline void write_fig1(const Scenario &sc, const Study &st, const Fig1Result &r, const fs::path &out)
    {
        const auto &f = st.freqs;
        const double b = st.bandwidth;
        const double ref = detail::in_band_level(st.first.s_tx, f, b);
        const auto &users = st.first.user_gain_db;
        const std::size_t weakest = std::size_t(std::min_element(users.begin(), users.end()) - users.begin());
        std::vector<double> smax_m(st.first.s_max);
        for (auto &v : smax_m)
            v *= st.antennas;

        detail::write_psd_csv(out / "psd_tx.csv", sc, "transmitted PSD S_tx(f) = trace S_yy(f)", f, st.first.s_tx, b, ref);
        detail::write_psd_csv(out / "psd_weakest_user.csv", sc, fmt::format("received PSD of the weakest served user (user {})", weakest), f,
                              st.first.user_psd[weakest], b, ref);
        detail::write_psd_csv(out / "psd_random_victim.csv", sc, "received PSD of one random Rayleigh victim", f, st.first.victim_first, b, ref);
        detail::write_psd_csv(out / "psd_max.csv", sc, "maximum PSD E[|h(f)|^2] S_max(f) = M lambda_max(S_yy(f))", f, smax_m, b, ref);

        Plot p;
        p.title = fmt::format("Power spectral densities, M = {}, K = {}", sc.antennas, sc.users);
        p.xlabel = "frequency f / B";
        p.ylabel = "PSD [dB re in-band S_tx]";
        p.xmin = -2.0, p.xmax = 2.0, p.ymin = -70.0, p.ymax = 20.0;
        p.vlines = {-1.5, -0.5, 0.5, 1.5};
        p.series.push_back(detail::series_db("S_tx", f, st.first.s_tx, b, ref, "#000000"));
        p.series.push_back(detail::series_db("weakest user", f, st.first.user_psd[weakest], b, ref, "#d62728"));
        p.series.push_back(detail::series_db("random victim", f, st.first.victim_first, b, ref, "#e6b800"));
        p.series.push_back(detail::series_db("M S_max", f, smax_m, b, ref, "#1f77b4"));
        write_svg(out / "fig1.svg", p);

        write_summary(out / "summary.txt",
                      {{"experiment", "fig1"},
                       {"scenario", sc.name},
                       {"antennas", std::to_string(sc.antennas)},
                       {"users", std::to_string(sc.users)},
                       {"seed", std::to_string(sc.seed)},
                       {"realizations", std::to_string(r.realizations)},
                       {"psd_reference", "0 dB = in-band average of S_tx, realization 0"},
                       {"weakest_user_in_band_gain_db", num(r.weakest_gain_db)},
                       {"weakest_user_in_band_gain_first_db", num(r.weakest_gain_first_db)},
                       {"worst_case_adjacent_gain_db", num(r.worst_gain_db)},
                       {"worst_case_adjacent_gain_first_db", num(r.worst_gain_first_db)},
                       {"victim_below_max_fraction", num(r.victim_below_max)}});
    }

    inline Fig1Result run_fig1(const Scenario &sc, const fs::path &out)
    {
        if (sc.channel != ChannelKind::rayleigh)
            throw ConfigError("fig1: needs a Rayleigh scenario");
        const Study st = run_study(sc, fig_study_options(sc));
        const Fig1Result r = summarize_fig1(st);
        write_fig1(sc, st, r, out);
        return r;
    }

    // ---- adjacent-band radiation pattern in line of sight ----

    struct Fig2Result
    {
        std::vector<PatternResult> patterns; // one per realization
        double peak_gain_db = 0.0;           // means over realizations
        double max_gain_db = 0.0;
        double user_in_band_gain_db = 0.0;
        double worst_user_offset_deg = 0.0;  // over realizations and users
        double worst_peak_offset_deg = 0.0;  // global peak to the nearest user
        double far_gain_db = 0.0;            // max over realizations
    };

    inline Fig2Result compute_fig2(const Scenario &sc)
    {
        Fig2Result r;
        std::vector<double> peak, maxg, ib;
        for (int i = 0; i < sc.realizations; ++i)
        {
            PatternResult p = radiation_pattern(sc, std::uint64_t(i));
            peak.push_back(p.peak_gain_db);
            maxg.push_back(p.max_gain_db);
            ib.push_back(p.user_in_band_gain_db);
            for (double o : p.user_peak_offset_deg)
                r.worst_user_offset_deg = std::max(r.worst_user_offset_deg, o);
            double nearest = std::numeric_limits<double>::infinity();
            for (double u : p.user_angles_deg)
                nearest = std::min(nearest, std::abs(u - p.peak_angle_deg));
            r.worst_peak_offset_deg = std::max(r.worst_peak_offset_deg, nearest);
            r.far_gain_db = i == 0 ? p.far_gain_db : std::max(r.far_gain_db, p.far_gain_db);
            r.patterns.push_back(std::move(p));
        }
        r.peak_gain_db = detail::mean_of(peak);
        r.max_gain_db = detail::mean_of(maxg);
        r.user_in_band_gain_db = detail::mean_of(ib);
        return r;
    }

    inline void write_fig2(const Scenario &sc, const Fig2Result &r, const fs::path &out)
    {
        const PatternResult &p = r.patterns.front();
        {
            CsvWriter csv(out / "pattern.csv");
            csv.comment("band powers received by a line-of-sight probe at each angle, realization 0");
            csv.comment(detail::scenario_line(sc));
            csv.comment("P_ib_dB: 0 dB = in-band power of S_tx; P_ob_dB: 0 dB = adjacent-band power of S_tx (worse side)");
            std::string users;
            for (double u : p.user_angles_deg)
                users += (users.empty() ? "" : " ") + num(u);
            csv.comment("user angles (deg): " + users);
            csv.header({"angle_deg", "P_ib_dB", "P_ob_dB"});
            for (std::size_t i = 0; i < p.angles_deg.size(); ++i)
                csv.row({p.angles_deg[i], to_db(p.powers[i].in_band / (sc.victim_pathloss * p.tx.in_band)),
                         to_db(p.powers[i].adjacent / (sc.victim_pathloss * p.tx.adjacent))});
        }

        Plot plot;
        plot.title = fmt::format("Adjacent-band power versus direction, M = {}, K = {} (LOS)", sc.antennas, sc.users);
        plot.xlabel = "angle [deg]";
        plot.ylabel = "P_ob [dB re transmitted adjacent-band power]";
        plot.xmin = -90.0, plot.xmax = 90.0, plot.ymin = -30.0, plot.ymax = 10.0;
        plot.vlines = p.user_angles_deg;
        PlotSeries ob{"P_ob(theta)", {}, {}, "#1f77b4"};
        PlotSeries ref{"P_ob of S_tx", {-90.0, 90.0}, {0.0, 0.0}, "#000000", true};
        PlotSeries mx{"M P_ob,max", {-90.0, 90.0}, {p.max_gain_db, p.max_gain_db}, "#d62728", true};
        for (std::size_t i = 0; i < p.angles_deg.size(); ++i)
        {
            ob.x.push_back(p.angles_deg[i]);
            ob.y.push_back(to_db(p.powers[i].adjacent / (sc.victim_pathloss * p.tx.adjacent)));
        }
        plot.series = {ob, ref, mx};
        write_svg(out / "fig2.svg", plot);

        write_summary(out / "summary.txt",
                      {{"experiment", "fig2"},
                       {"scenario", sc.name},
                       {"antennas", std::to_string(sc.antennas)},
                       {"users", std::to_string(sc.users)},
                       {"seed", std::to_string(sc.seed)},
                       {"realizations", std::to_string(r.patterns.size())},
                       {"angle_step_deg", num(sc.pattern_step_deg)},
                       {"peak_ob_gain_db", num(r.peak_gain_db)},
                       {"peak_ob_gain_first_db", num(p.peak_gain_db)},
                       {"peak_angle_first_deg", num(p.peak_angle_deg)},
                       {"max_ob_gain_db", num(r.max_gain_db)},
                       {"max_ob_gain_first_db", num(p.max_gain_db)},
                       {"user_in_band_gain_db", num(r.user_in_band_gain_db)},
                       {"worst_user_peak_offset_deg", num(r.worst_user_offset_deg)},
                       {"worst_global_peak_offset_deg", num(r.worst_peak_offset_deg)},
                       {"far_from_users_max_ob_gain_db", num(r.far_gain_db)},
                       {"far_from_users_exclusion_deg", num(p.far_deg)}});
    }

    inline Fig2Result run_fig2(const Scenario &sc, const fs::path &out)
    {
        if (sc.channel != ChannelKind::los)
            throw ConfigError("fig2: needs a line-of-sight scenario");
        Fig2Result r = compute_fig2(sc);
        write_fig2(sc, r, out);
        return r;
    }

    // ---- eigenvalue distributions of S_yy(f) ----

    // Per realization, eigenvalues at the study's eigen frequencies
    struct EigenStats
    {
        double top_count = 0.0;      // eigenvalues more than 10 dB above the median, mean over realizations
        double step_gap_db = 0.0;    // 10 log10(lambda_K / lambda_{K+1}), mean
        double median_gap_db = 0.0;  // median of the top K over median of the rest, mean
        bool exact_count = true;     // top_count == K in every realization
    };

    inline EigenStats eigen_gap_stats(const Study &st, std::size_t freq_index, int users)
    {
        EigenStats s;
        const std::size_t k = std::size_t(users);
        for (const auto &per_freq : st.eigen)
        {
            const auto &ev = per_freq.at(freq_index);
            if (ev.size() <= k)
                throw ParameterError("eigen statistics: need more antennas than users");
            const double median = ev[ev.size() / 2];
            std::size_t count = 0;
            for (double v : ev)
                count += v > 10.0 * median;
            s.top_count += double(count);
            s.exact_count = s.exact_count && count == k;
            s.step_gap_db += 10.0 * std::log10(ev[k - 1] / ev[k]);
            s.median_gap_db += 10.0 * std::log10(ev[(k - 1) / 2] / ev[k + (ev.size() - k) / 2]);
        }
        const double n = double(st.eigen.size());
        s.top_count /= n;
        s.step_gap_db /= n;
        s.median_gap_db /= n;
        return s;
    }

    // Mean over realizations of the fraction of eigenvalues at least level_db above their mean
    inline double ccdf_fraction(const Study &st, std::size_t freq_index, double level_db)
    {
        double acc = 0.0;
        for (const auto &per_freq : st.eigen)
        {
            const auto &ev = per_freq.at(freq_index);
            const double mean = std::accumulate(ev.begin(), ev.end(), 0.0) / double(ev.size());
            std::size_t count = 0;
            for (double v : ev)
                count += 10.0 * std::log10(v / mean) >= level_db;
            acc += double(count) / double(ev.size());
        }
        return acc / double(st.eigen.size());
    }

    // Largest eigenvalue in dB above the mean, maximum over realizations
    inline double top_eigen_db(const Study &st, std::size_t freq_index)
    {
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto &per_freq : st.eigen)
        {
            const auto &ev = per_freq.at(freq_index);
            const double mean = std::accumulate(ev.begin(), ev.end(), 0.0) / double(ev.size());
            worst = std::max(worst, 10.0 * std::log10(ev.front() / mean));
        }
        return worst;
    }

    struct Fig3Result
    {
        int users_multi = 0;
        EigenStats in_band;                 // multiuser, f = 0
        double single_ccdf_2db_half_b = 0.0; // single user, f = B/2, fraction >= +2 dB
        double single_worst_gain_db = 0.0;   // single user, pooled adjacent bands M S_max / S_tx
        double multi_worst_gain_db = 0.0;
        std::vector<double> multi_top_db;    // per CCDF frequency
        std::vector<double> single_top_db;
    };

    inline std::size_t freq_slot(const Scenario &sc, double f_over_b)
    {
        for (std::size_t i = 0; i < sc.ccdf_freqs_over_b.size(); ++i)
            if (std::abs(sc.ccdf_freqs_over_b[i] - f_over_b) < 1e-12)
                return i;
        throw ConfigError(fmt::format("fig3: ccdf_freqs_over_b must contain {}", f_over_b));
    }

    inline Scenario single_user(const Scenario &sc)
    {
        Scenario s = sc;
        s.users = 1;
        s.allocation.clear();
        s.pathloss.clear();
        s.user_angles_deg.clear();
        return s;
    }

    inline Fig3Result summarize_fig3(const Scenario &sc, const Study &multi, const Study &single)
    {
        Fig3Result r;
        r.users_multi = sc.users;
        r.in_band = eigen_gap_stats(multi, freq_slot(sc, 0.0), sc.users);
        r.single_ccdf_2db_half_b = ccdf_fraction(single, freq_slot(sc, 0.5), 2.0);
        r.single_worst_gain_db = detail::mean_of(single.worst_gain_db);
        r.multi_worst_gain_db = detail::mean_of(multi.worst_gain_db);
        for (std::size_t i = 0; i < sc.ccdf_freqs_over_b.size(); ++i)
        {
            r.multi_top_db.push_back(top_eigen_db(multi, i));
            r.single_top_db.push_back(top_eigen_db(single, i));
        }
        return r;
    }

    inline void write_fig3(const Scenario &sc, const Study &multi, const Study &single, const Fig3Result &r, const fs::path &out)
    {
        const char *colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
        Plot plot;
        plot.title = fmt::format("Eigenvalue CCDF of S_yy(f), M = {}, K = {} (solid) and K = 1 (dashed)", sc.antennas, sc.users);
        plot.xlabel = "eigenvalue [dB re mean eigenvalue S_tx(f)/M]";
        plot.ylabel = "fraction of eigenvalues >= level";
        plot.xmin = -30.0, plot.xmax = 25.0, plot.ymin = 0.0, plot.ymax = 1.0;

        auto emit = [&](const Study &st, int users, bool dashed)
        {
            CsvWriter csv(out / fmt::format("ccdf_K{}.csv", users));
            csv.comment(fmt::format("eigenvalue CCDF of S_yy(f), realization 0, K = {}", users));
            csv.comment(detail::scenario_line(sc));
            csv.comment("level_dB: 0 dB = mean eigenvalue S_tx(f)/M at that frequency; fraction = share of eigenvalues >= level");
            csv.header({"freq_over_B", "level_dB", "fraction"});
            PlotSeries dots{fmt::format("mean, K = {}", users), {}, {}, "#000000", false, true};
            for (std::size_t i = 0; i < sc.ccdf_freqs_over_b.size(); ++i)
            {
                const auto &ev = st.eigen.front().at(i);
                const double mean = std::accumulate(ev.begin(), ev.end(), 0.0) / double(ev.size());
                PlotSeries s{fmt::format("f = {}B, K = {}", sc.ccdf_freqs_over_b[i], users), {}, {}, colors[i % 6], dashed};
                std::size_t above_mean = 0;
                for (std::size_t n = 0; n < ev.size(); ++n)
                {
                    const double level = to_db(ev[n] / mean), frac = double(n + 1) / double(ev.size());
                    csv.row({sc.ccdf_freqs_over_b[i], level, frac});
                    // staircase
                    s.x.push_back(level);
                    s.y.push_back(double(n) / double(ev.size()));
                    s.x.push_back(level);
                    s.y.push_back(frac);
                    above_mean += ev[n] >= mean;
                }
                dots.x.push_back(0.0);
                dots.y.push_back(double(above_mean) / double(ev.size()));
                plot.series.push_back(std::move(s));
            }
            plot.series.push_back(std::move(dots));
        };
        emit(multi, sc.users, false);
        emit(single, 1, true);
        write_svg(out / "fig3.svg", plot);

        std::vector<std::pair<std::string, std::string>> sum{
            {"experiment", "fig3"},
            {"scenario", sc.name},
            {"antennas", std::to_string(sc.antennas)},
            {"users", std::to_string(sc.users)},
            {"seed", std::to_string(sc.seed)},
            {"realizations", std::to_string(multi.realizations)},
            {"ccdf_reference", "dB re mean eigenvalue S_tx(f)/M"},
            {"in_band_top_count", num(r.in_band.top_count)},
            {"in_band_top_count_exact", r.in_band.exact_count ? "true" : "false"},
            {"in_band_step_gap_db", num(r.in_band.step_gap_db)},
            {"in_band_median_gap_db", num(r.in_band.median_gap_db)},
            {"single_user_ccdf_plus2db_at_half_b", num(r.single_ccdf_2db_half_b)},
            {"single_user_worst_case_adjacent_gain_db", num(r.single_worst_gain_db)},
            {"multi_user_worst_case_adjacent_gain_db", num(r.multi_worst_gain_db)}};
        for (std::size_t i = 0; i < sc.ccdf_freqs_over_b.size(); ++i)
        {
            sum.emplace_back(fmt::format("multi_top_eigen_db_f{}B", sc.ccdf_freqs_over_b[i]), num(r.multi_top_db[i]));
            sum.emplace_back(fmt::format("single_top_eigen_db_f{}B", sc.ccdf_freqs_over_b[i]), num(r.single_top_db[i]));
        }
        write_summary(out / "summary.txt", sum);
    }

    inline Fig3Result run_fig3(const Scenario &sc, const fs::path &out)
    {
        if (sc.channel != ChannelKind::rayleigh)
            throw ConfigError("fig3: needs a Rayleigh scenario");
        freq_slot(sc, 0.0);
        freq_slot(sc, 0.5);
        StudyOptions o = fig_study_options(sc);
        o.victims = false;
        o.users = false;
        const Study multi = run_study(sc, o);
        const Study single = run_study(single_user(sc), o);
        const Fig3Result r = summarize_fig3(sc, multi, single);
        write_fig3(sc, multi, single, r, out);
        return r;
    }

    // ---- ACLR family ----

    inline void write_aclr(const Scenario &sc, const AclrReport &rep, const fs::path &out)
    {
        {
            CsvWriter csv(out / "aclr_per_antenna.csv");
            csv.comment("per-antenna ACLR_m from realization-averaged per-antenna spectra");
            csv.comment(detail::scenario_line(sc));
            csv.comment("aclr_dB: 10 log10(worse adjacent-band power / in-band power), no further reference");
            csv.header({"antenna", "aclr_dB"});
            for (std::size_t m = 0; m < rep.per_antenna_db.size(); ++m)
                csv.row({double(m), rep.per_antenna_db[m]});
        }
        write_summary(out / "summary.txt",
                      {{"experiment", "aclr"},
                       {"scenario", sc.name},
                       {"antennas", std::to_string(sc.antennas)},
                       {"users", std::to_string(sc.users)},
                       {"seed", std::to_string(sc.seed)},
                       {"realizations", std::to_string(rep.n_realizations)},
                       {"victims_per_realization", std::to_string(rep.n_victims)},
                       {"mimo_aclr_victim_db", num(rep.mimo_victim_db)},
                       {"mimo_aclr_closed_form_db", num(rep.mimo_closed_form_db)},
                       {"mean_per_antenna_aclr_db", num(rep.mean_per_antenna_db)},
                       {"siso_aclr_db", num(rep.siso_db)}});
    }

    inline AclrReport run_aclr(const Scenario &sc, const fs::path &out)
    {
        const AclrReport rep = mimo_aclr(sc);
        write_aclr(sc, rep, out);
        return rep;
    }

    // Default C1 configurations: equal, one dominant user, its mirror; equal and spread path losses
    inline SweepConfig default_c1_sweep(int users)
    {
        SweepConfig c;
        c.allocations.push_back(std::vector<double>(std::size_t(users), 1.0 / users));
        if (users > 1)
        {
            std::vector<double> skew(std::size_t(users), 0.5 / (users - 1));
            skew.front() = 0.5;
            c.allocations.push_back(skew);
            std::reverse(skew.begin(), skew.end());
            c.allocations.push_back(skew);
        }
        c.pathlosses.push_back(std::vector<double>(std::size_t(users), 1.0));
        std::vector<double> spread;
        for (int k = 0; k < users; ++k)
            spread.push_back(std::pow(10.0, -2.0 * k / std::max(1, users - 1))); // 0 .. -20 dB
        c.pathlosses.push_back(spread);
        return c;
    }

    inline C1Result run_sweep_c1(const Scenario &sc, SweepConfig sweep, const fs::path &out)
    {
        const SweepConfig d = default_c1_sweep(sc.users);
        if (sweep.allocations.empty())
            sweep.allocations = d.allocations;
        if (sweep.pathlosses.empty())
            sweep.pathlosses = d.pathlosses;
        const C1Result res = c1_sweep(sc, sweep.allocations, sweep.pathlosses);
        {
            CsvWriter csv(out / "c1_sweep.csv");
            csv.comment("MIMO-ACLR (closed-form route, realization average) per power allocation and path-loss set");
            csv.comment(detail::scenario_line(sc));
            csv.comment("mimo_aclr_dB: 10 log10(worse adjacent-band / in-band power of E[S_tx]); xi_k and beta_k follow");
            std::vector<std::string> cols{"config", "mimo_aclr_dB"};
            for (int k = 0; k < sc.users; ++k)
                cols.push_back(fmt::format("xi_{}", k));
            for (int k = 0; k < sc.users; ++k)
                cols.push_back(fmt::format("beta_{}", k));
            csv.header(cols);
            for (std::size_t i = 0; i < res.rows.size(); ++i)
            {
                std::vector<double> row{double(i), res.rows[i].mimo_aclr_db};
                row.insert(row.end(), res.rows[i].allocation.begin(), res.rows[i].allocation.end());
                row.insert(row.end(), res.rows[i].pathloss.begin(), res.rows[i].pathloss.end());
                csv.row(row);
            }
        }
        write_summary(out / "summary.txt",
                      {{"experiment", "sweep-c1"},
                       {"scenario", sc.name},
                       {"configurations", std::to_string(res.rows.size())},
                       {"realizations", std::to_string(sc.realizations)},
                       {"spread_db", num(res.spread_db)}});
        return res;
    }

    // ---- analytical versus simulated gates ----

    struct Gate
    {
        std::string name;
        bool pass = false;
        double value = 0.0;
        double limit = 0.0;
        std::string detail;
    };

    struct ValidationReport
    {
        std::vector<Gate> gates;
        bool passed() const
        {
            return std::all_of(gates.begin(), gates.end(), [](const Gate &g)
                               { return g.pass; });
        }
    };

    // Largest relative error of the moment closed forms against sampling, at the given sample count
    inline double moment_gate_error(std::size_t samples, std::uint64_t seed)
    {
        struct Case
        {
            cd r;
            double va, vb;
            int p, pp;
        };
        const Case cases[] = {{{0.5, 0.3}, 1.3, 0.7, 1, 1}, {{0.5, 0.3}, 1.3, 0.7, 1, 2}, {{0.5, 0.3}, 1.3, 0.7, 2, 1},
                              {{0.5, 0.3}, 1.3, 0.7, 2, 2}, {1.0, 1.0, 1.0, 2, 2}};
        double worst = 0.0;
        std::uint64_t s = seed;
        for (const auto &c : cases)
        {
            const cd est = moment_oracle(c.r, c.va, c.vb, c.p, c.pp, samples, s++);
            const cd ref = gaussian_moment(c.r, c.va, c.vb, c.p, c.pp);
            worst = std::max(worst, std::abs(est - ref) / std::abs(ref));
        }
        return worst;
    }

    inline PAModel flipped_cubic(const PAModel &pa)
    {
        PAModel bad = pa;
        for (auto &antenna : bad.branches)
            if (antenna.size() > 1)
                for (auto &t : antenna[1])
                    t = -t;
        return bad;
    }

    inline ValidationReport run_validate(const Scenario &sc, const fs::path &out)
    {
        ValidationReport rep;
        const Setup su = make_setup(sc);

        const double mom = moment_gate_error(1000000, sc.mc.seed);
        rep.gates.push_back({"moment_closed_forms", mom <= 0.01, mom, 0.01, "max relative error over (1,1), (1,2), (2,1), (2,2), sixth moment"});

        McConfig toy = sc.mc;
        toy.n_symbols = 200000; // 1e6 samples at kappa = 5
        const auto corr = compare_toy_corr(su.pa, su.pa, toy);
        rep.gates.push_back({"toy_corr_equivalence", corr.max_rel_error <= 0.01, corr.max_rel_error, 0.01,
                             "M=2 toy, |R_mc - R_model| / sqrt(R_mm(0) R_m'm'(0)), lags within 2 symbols"});
        const auto neg = compare_toy_corr(su.pa, flipped_cubic(su.pa), toy);
        rep.gates.push_back({"negative_control_detected", neg.max_rel_error > 0.01, neg.max_rel_error, 0.01,
                             "model with the cubic coefficient negated must miss the simulation"});

        const auto trace = compare_trace_psd(sc, sc.mc);
        rep.gates.push_back({"trace_psd_equivalence", trace.max_abs_db <= 0.5, trace.max_abs_db, 0.5,
                             fmt::format("max |Welch - analytic| in dB over {} bins of [-3B/2, 3B/2], band-edge bins excluded", trace.compared)});

        Scenario lin = sc;
        lin.pa_coeffs = {sc.pa_coeffs.front(), cd{}};
        lin.operating = OperatingTarget::explicit_power;
        // same drive level as the compressive reference amplifier at its 1 dB point
        lin.input_power = compression_point_1db(reference_pa().coeff(0, 1), reference_pa().coeff(0, 2));
        const double lin_aclr = std::max(mimo_aclr_closed_form(lin, 1), siso_aclr_db(lin));
        rep.gates.push_back({"linear_baseline_aclr", lin_aclr < -50.0, lin_aclr, -50.0, "b2 = 0, worse of MIMO and SISO ACLR in dB"});

        StudyOptions o;
        o.victims = false;
        o.users = false;
        o.bound_victims = 100;
        o.realizations = 1;
        const Study st = run_study(sc, o);
        rep.gates.push_back({"spectral_matrix_invariants", st.audit.ok(), std::max(st.audit.hermitian_defect, -st.audit.psd_floor), 1e-8,
                             "max of Hermitian defect and -lambda_min over the bin scale (trace, at least 1e-4 of the peak trace)"});
        rep.gates.push_back({"worst_case_bound", st.first.bound_excess <= 1e-9, st.first.bound_excess, 1e-9,
                             "max (b^H S b - |b|^2 S_max) / (|b|^2 S_max), 100 random vectors per bin"});

        auto file = open_output(out / "validation.txt");
        for (const auto &g : rep.gates)
            file << g.name << " = " << (g.pass ? "PASS" : "FAIL") << " value " << num(g.value) << " limit " << num(g.limit) << " (" << g.detail << ")\n";
        file << "overall = " << (rep.passed() ? "PASS" : "FAIL") << '\n';
        return rep;
    }
}

#endif
