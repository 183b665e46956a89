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

#ifndef OOBRAD_ANALYSIS_HPP
#define OOBRAD_ANALYSIS_HPP

#include "channel.hpp"
#include "error.hpp"
#include "mc.hpp"
#include "metrics.hpp"
#include "scenario.hpp"
#include "spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace oobrad
{
    // Running record of the Hermitian and PSD checks over every spectral matrix produced
    struct SpectrumAudit
    {
        std::size_t matrices = 0;
        double hermitian_defect = 0.0; // largest |S - S^H|_F / |S|_F
        double psd_floor = 0.0;        // smallest lambda_min / bin scale

        void add(const SpectralMatrix &s, const BinExtremes &e)
        {
            ++matrices;
            hermitian_defect = std::max(hermitian_defect, oobrad::hermitian_defect(s));
            for (double v : e.min_over_trace)
                psd_floor = std::min(psd_floor, v);
        }
        void merge(const SpectrumAudit &o)
        {
            matrices += o.matrices;
            hermitian_defect = std::max(hermitian_defect, o.hermitian_defect);
            psd_floor = std::min(psd_floor, o.psd_floor);
        }
        bool ok() const { return hermitian_defect <= 1e-10 && psd_floor >= -1e-8; }
    };

    // 10 log10(M int S_max / int S_tx), both adjacent bands pooled
    inline double adjacent_worst_gain_db(const std::vector<double> &smax, const std::vector<double> &stx,
                                         const std::vector<double> &freqs, double bandwidth, int antennas)
    {
        const BandPowers a = band_powers(smax, freqs, bandwidth);
        const BandPowers t = band_powers(stx, freqs, bandwidth);
        if (!(t.left + t.right > 0.0))
            throw NumericalError("worst-case gain: no adjacent-band power");
        return 10.0 * std::log10(antennas * (a.left + a.right) / (t.left + t.right));
    }

    struct StudyOptions
    {
        bool eigen = true;               // S_max per bin plus the PSD audit
        bool victims = true;             // random-victim route
        bool users = true;               // received spectra of the served users
        int bound_victims = 0;           // random vectors per bin for the worst-case bound, first realization
        std::vector<double> eigen_freqs; // full eigenvalue lists kept at these frequencies
        int realizations = 0;            // 0: scenario value
    };

    struct RealizationResult
    {
        std::vector<double> s_tx;
        std::vector<double> s_max;                  // empty without eigen
        std::vector<std::vector<double>> antenna;   // S_{y_m y_m}(f)
        std::vector<double> victim_mean;            // mean over victims of S_theta(f)
        std::vector<double> victim_first;           // one victim
        std::vector<std::vector<double>> user_psd;  // S_theta_k(f)
        std::vector<std::vector<double>> eigen;     // per eigen frequency, descending
        std::vector<double> user_gain_db;           // P_ib(theta_k) / P_ib of S_tx
        double bound_excess = -std::numeric_limits<double>::infinity();
        SpectrumAudit audit;
    };

    namespace detail
    {
        // Max over bins and random vectors of (b^H S b - |b|^2 lambda_max) / (|b|^2 lambda_max)
        inline double worst_case_bound_excess(const SpectralMatrix &s, const std::vector<double> &smax, int count, Rng &rng)
        {
            double worst = -std::numeric_limits<double>::infinity();
            Eigen::MatrixXcd b(s.dim(), count);
            for (std::size_t j = 0; j < s.size(); ++j)
            {
                for (Eigen::Index c = 0; c < b.cols(); ++c)
                    for (Eigen::Index m = 0; m < b.rows(); ++m)
                        b(m, c) = complex_normal(rng);
                const Eigen::MatrixXcd q = s.bins[j] * b;
                for (Eigen::Index c = 0; c < b.cols(); ++c)
                {
                    const double bound = b.col(c).squaredNorm() * smax[j];
                    const double got = b.col(c).dot(q.col(c)).real();
                    const double scale = std::max(bound, 1e-300);
                    worst = std::max(worst, (got - bound) / scale);
                }
            }
            return worst;
        }
    }

    // Every spectrum-level quantity of one realization; the M x M matrices are dropped on return
    inline RealizationResult analyze_realization(const Scenario &sc, const Setup &su, const Realization &r, std::uint64_t index,
                                                 const StudyOptions &opt)
    {
        RealizationResult out;
        const SpectralMatrix s = analytic_spectrum(sc, su, r);
        out.s_tx = s_tx(s);
        out.antenna.assign(std::size_t(s.dim()), std::vector<double>(s.size()));
        for (std::size_t j = 0; j < s.size(); ++j)
            for (int m = 0; m < s.dim(); ++m)
                out.antenna[std::size_t(m)][j] = s.bins[j](m, m).real();

        if (opt.eigen)
        {
            const BinExtremes e = eigen_extremes(s);
            out.s_max = e.max;
            out.audit.add(s, e);
            if (opt.bound_victims > 0)
            {
                Rng rng = make_rng(sc.seed, Stream::test, index);
                out.bound_excess = detail::worst_case_bound_excess(s, out.s_max, opt.bound_victims, rng);
            }
        }
        for (double f : opt.eigen_freqs)
            out.eigen.push_back(eigen_spectrum(s, f));

        if (opt.users)
        {
            const auto hk = freq_response_grid(r.channel, sc.nfft);
            std::vector<Eigen::MatrixXcd> cols(s.size());
            for (std::size_t j = 0; j < s.size(); ++j)
                cols[j] = hk[j].transpose();
            auto psd = received_psd_batch(s, cols);
            const double tx_ib = band_powers(out.s_tx, s.freqs, su.bandwidth).in_band;
            for (std::size_t k = 0; k < psd.size(); ++k)
            {
                const double beta = r.channel.pathloss.empty() ? 1.0 : r.channel.pathloss[k];
                for (auto &v : psd[k])
                    v *= beta;
                out.user_gain_db.push_back(10.0 * std::log10(band_powers(psd[k], s.freqs, su.bandwidth).in_band / tx_ib));
            }
            out.user_psd = std::move(psd);
        }

        if (opt.victims)
        {
            const VictimSpec spec = victim_spec(sc);
            out.victim_mean.assign(s.size(), 0.0);
            const int chunk = 10;
            for (int v0 = 0; v0 < sc.victims; v0 += chunk)
            {
                const int n = std::min(chunk, sc.victims - v0);
                std::vector<Eigen::MatrixXcd> h(s.size(), Eigen::MatrixXcd(s.dim(), n));
                for (int v = 0; v < n; ++v)
                {
                    const auto ch = gen_victim(spec, sc.seed, index * std::uint64_t(sc.victims) + std::uint64_t(v0 + v));
                    const auto resp = freq_response_grid(ch, sc.nfft);
                    for (std::size_t j = 0; j < s.size(); ++j)
                        h[j].col(v) = resp[j].row(0).transpose();
                }
                const auto psd = received_psd_batch(s, h, spec.pathloss);
                for (int v = 0; v < n; ++v)
                    for (std::size_t j = 0; j < s.size(); ++j)
                        out.victim_mean[j] += psd[std::size_t(v)][j];
                if (v0 == 0)
                    out.victim_first = psd.front();
            }
            for (auto &v : out.victim_mean)
                v /= double(sc.victims);
        }
        return out;
    }

    // Realization sweep over the scenario with realization-averaged spectra
    struct Study
    {
        std::vector<double> freqs;
        double bandwidth = 0.0;
        int antennas = 0;
        int realizations = 0;
        RealizationResult first;
        std::vector<double> mean_tx, mean_victim;
        std::vector<std::vector<double>> mean_antenna;
        std::vector<double> weakest_gain_db; // per realization
        std::vector<double> worst_gain_db;   // per realization, needs eigen
        std::vector<std::vector<std::vector<double>>> eigen; // [realization][frequency]
        SpectrumAudit audit;
    };

    inline Study run_study(const Scenario &sc, const StudyOptions &opt)
    {
        const Setup su = make_setup(sc);
        Study st;
        st.bandwidth = su.bandwidth;
        st.antennas = sc.antennas;
        st.freqs = frequency_grid(sc.nfft, su.pulse.sample_period());
        st.realizations = opt.realizations > 0 ? opt.realizations : sc.realizations;
        st.mean_tx.assign(sc.nfft, 0.0);
        st.mean_antenna.assign(std::size_t(sc.antennas), std::vector<double>(sc.nfft, 0.0));
        if (opt.victims)
            st.mean_victim.assign(sc.nfft, 0.0);

        for (int i = 0; i < st.realizations; ++i)
        {
            StudyOptions o = opt;
            if (i > 0)
                o.bound_victims = 0;
            const Realization r = draw_realization(sc, su, std::uint64_t(i));
            RealizationResult res = analyze_realization(sc, su, r, std::uint64_t(i), o);
            for (std::size_t j = 0; j < sc.nfft; ++j)
            {
                st.mean_tx[j] += res.s_tx[j];
                if (opt.victims)
                    st.mean_victim[j] += res.victim_mean[j];
                for (int m = 0; m < sc.antennas; ++m)
                    st.mean_antenna[std::size_t(m)][j] += res.antenna[std::size_t(m)][j];
            }
            if (!res.user_gain_db.empty())
                st.weakest_gain_db.push_back(*std::min_element(res.user_gain_db.begin(), res.user_gain_db.end()));
            if (opt.eigen)
                st.worst_gain_db.push_back(adjacent_worst_gain_db(res.s_max, res.s_tx, st.freqs, st.bandwidth, sc.antennas));
            st.eigen.push_back(res.eigen);
            st.audit.merge(res.audit);
            if (i == 0)
                st.first = std::move(res);
        }
        const double n = st.realizations;
        for (auto &v : st.mean_tx)
            v /= n;
        for (auto &v : st.mean_victim)
            v /= n;
        for (auto &a : st.mean_antenna)
            for (auto &v : a)
                v /= n;
        return st;
    }

    struct AclrReport
    {
        std::vector<double> per_antenna_db;
        double mean_per_antenna_db = 0.0;
        double mimo_victim_db = 0.0;      // route (a): victim-averaged received spectrum
        double mimo_closed_form_db = 0.0; // route (b): E[S_theta] = beta E[S_tx]
        double siso_db = 0.0;
        int n_realizations = 0;
        int n_victims = 0; // per realization
    };

    // Single-antenna reference: one user, flat unit channel, same operating rule
    inline double siso_aclr_db(const Scenario &sc)
    {
        Scenario s1 = sc;
        s1.antennas = 1;
        s1.users = 1;
        s1.allocation.clear();
        s1.pathloss.clear();
        s1.user_angles_deg.clear();
        const Setup su = make_setup(s1);
        const Realization r = siso_realization(s1, su);
        const DiagonalSpectrum d = analytic_diagonal(s1, su, r);
        return aclr_db(d.antennas.front(), d.freqs, su.bandwidth);
    }

    inline AclrReport aclr_report(const Scenario &sc, const Study &st, double siso_db)
    {
        AclrReport rep;
        rep.n_realizations = st.realizations;
        rep.n_victims = st.mean_victim.empty() ? 0 : sc.victims;
        for (const auto &a : st.mean_antenna)
            rep.per_antenna_db.push_back(aclr_db(a, st.freqs, st.bandwidth));
        rep.mean_per_antenna_db = std::accumulate(rep.per_antenna_db.begin(), rep.per_antenna_db.end(), 0.0) / double(rep.per_antenna_db.size());
        rep.mimo_closed_form_db = aclr_db(st.mean_tx, st.freqs, st.bandwidth);
        rep.mimo_victim_db = st.mean_victim.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                    : aclr_db(st.mean_victim, st.freqs, st.bandwidth);
        rep.siso_db = siso_db;
        return rep;
    }

    // MIMO-ACLR by both routes, per-antenna ACLR and the SISO baseline
    inline AclrReport mimo_aclr(const Scenario &sc, int realizations = 0)
    {
        StudyOptions opt;
        opt.eigen = false;
        opt.users = false;
        opt.realizations = realizations;
        const Study st = run_study(sc, opt);
        return aclr_report(sc, st, siso_aclr_db(sc));
    }

    // Closed-form route only, from the per-antenna spectra; cheap enough for parameter sweeps
    inline double mimo_aclr_closed_form(const Scenario &sc, int realizations = 0)
    {
        const Setup su = make_setup(sc);
        const int n = realizations > 0 ? realizations : sc.realizations;
        std::vector<double> tx(sc.nfft, 0.0), freqs;
        for (int i = 0; i < n; ++i)
        {
            const Realization r = draw_realization(sc, su, std::uint64_t(i));
            const DiagonalSpectrum d = amplified_psd_diagonal(r.rxx_sym, su.g, sc.oversampling, su.pa, r.op, sc.nfft);
            const auto t = s_tx(d);
            for (std::size_t j = 0; j < tx.size(); ++j)
                tx[j] += t[j];
            freqs = d.freqs;
        }
        return aclr_db(tx, freqs, su.bandwidth);
    }

    struct C1Row
    {
        std::vector<double> allocation;
        std::vector<double> pathloss;
        double mimo_aclr_db = 0.0;
    };

    struct C1Result
    {
        std::vector<C1Row> rows;
        double spread_db = 0.0; // max - min
    };

    // MIMO-ACLR over power allocations x path losses; empty vectors stand for the scenario defaults.
    // The same channel draws are reused for every configuration.
    inline C1Result c1_sweep(const Scenario &sc, std::vector<std::vector<double>> allocations,
                             std::vector<std::vector<double>> pathlosses, int realizations = 0)
    {
        if (allocations.empty())
            allocations.push_back(sc.allocation);
        if (pathlosses.empty())
            pathlosses.push_back(sc.pathloss);
        C1Result res;
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto &xi : allocations)
            for (const auto &beta : pathlosses)
            {
                Scenario s = sc;
                s.allocation = xi;
                s.pathloss = beta;
                C1Row row{normalize_allocation(xi, sc.users), beta.empty() ? std::vector<double>(std::size_t(sc.users), 1.0) : beta,
                          mimo_aclr_closed_form(s, realizations)};
                lo = std::min(lo, row.mimo_aclr_db);
                hi = std::max(hi, row.mimo_aclr_db);
                res.rows.push_back(std::move(row));
            }
        res.spread_db = hi - lo;
        return res;
    }

    // Adjacent-band radiation pattern of a line-of-sight scenario
    struct PatternResult
    {
        std::vector<double> angles_deg;
        std::vector<BandPowers> powers; // received by a LOS probe at each angle
        std::vector<double> user_angles_deg;
        BandPowers tx;                  // band powers of S_tx, the isotropic reference
        double p_ob_max = 0.0;
        double peak_gain_db = 0.0;      // max P_ob(theta) / P_ob of S_tx
        double peak_angle_deg = 0.0;
        double max_gain_db = 0.0;       // M P_ob,max / P_ob of S_tx
        std::vector<double> user_peak_offset_deg; // distance to the nearest local maximum of P_ob
        double user_in_band_gain_db = 0.0;        // mean over users of P_ib(theta_k) / P_ib of S_tx
        double far_gain_db = 0.0;                 // max P_ob gain farther than far_deg from every user
        double far_deg = 3.0;
        std::vector<double> s_tx;                 // for plotting
        std::vector<double> freqs;
        SpectrumAudit audit;
    };

    inline PatternResult radiation_pattern(const Scenario &sc, std::uint64_t index = 0)
    {
        if (sc.channel != ChannelKind::los)
            throw ConfigError("radiation pattern: needs a line-of-sight scenario");
        const Setup su = make_setup(sc);
        const Realization r = draw_realization(sc, su, index);
        const SpectralMatrix s = analytic_spectrum(sc, su, r);
        const BinExtremes e = eigen_extremes(s);

        PatternResult p;
        p.audit.add(s, e);
        p.freqs = s.freqs;
        p.s_tx = s_tx(s);
        p.tx = band_powers(p.s_tx, s.freqs, su.bandwidth);
        p.p_ob_max = p_ob_max(e.max, s.freqs, su.bandwidth);
        p.max_gain_db = 10.0 * std::log10(sc.antennas * p.p_ob_max / p.tx.adjacent);
        for (double a : r.channel.angles)
            p.user_angles_deg.push_back(rad2deg(a));

        const int steps = int(std::lround(180.0 / sc.pattern_step_deg));
        std::vector<double> rad;
        for (int i = 0; i <= steps; ++i)
        {
            p.angles_deg.push_back(-90.0 + i * sc.pattern_step_deg);
            rad.push_back(deg2rad(p.angles_deg.back()));
        }
        p.powers = pattern_band_powers(s, su.bandwidth, rad, sc.spacing_over_wavelength, sc.victim_pathloss);

        std::vector<double> gain(p.powers.size());
        for (std::size_t i = 0; i < gain.size(); ++i)
            gain[i] = 10.0 * std::log10(p.powers[i].adjacent / (sc.victim_pathloss * p.tx.adjacent));
        const auto peak = std::max_element(gain.begin(), gain.end());
        p.peak_gain_db = *peak;
        p.peak_angle_deg = p.angles_deg[std::size_t(peak - gain.begin())];

        std::vector<double> maxima;
        for (std::size_t i = 0; i < gain.size(); ++i)
        {
            const bool left = i == 0 || gain[i] >= gain[i - 1];
            const bool right = i + 1 == gain.size() || gain[i] >= gain[i + 1];
            if (left && right)
                maxima.push_back(p.angles_deg[i]);
        }
        double far = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < gain.size(); ++i)
        {
            bool is_far = true;
            for (double u : p.user_angles_deg)
                is_far = is_far && std::abs(p.angles_deg[i] - u) > p.far_deg;
            if (is_far)
                far = std::max(far, gain[i]);
        }
        p.far_gain_db = far;

        const auto users = pattern_band_powers(s, su.bandwidth, r.channel.angles, sc.spacing_over_wavelength, 1.0);
        double acc = 0.0;
        for (std::size_t k = 0; k < users.size(); ++k)
        {
            double best = std::numeric_limits<double>::infinity();
            for (double a : maxima)
                best = std::min(best, std::abs(a - p.user_angles_deg[k]));
            p.user_peak_offset_deg.push_back(best);
            acc += 10.0 * std::log10(users[k].in_band / p.tx.in_band);
        }
        p.user_in_band_gain_db = acc / double(users.size());
        return p;
    }

    // Analytical trace spectrum against the Welch estimate of a simulated waveform
    struct McComparison
    {
        std::vector<double> freqs, analytic, welch;
        double max_abs_db = 0.0;     // over the compared bins
        std::size_t compared = 0;
    };

    inline McComparison compare_trace_psd(const Scenario &sc, const McConfig &mc, std::uint64_t index = 0)
    {
        const Setup su = make_setup(sc);
        const Realization r = draw_realization(sc, su, index);
        if (mc.welch_segment != sc.nfft)
            throw ConfigError("MC comparison: Welch segment must equal nfft so both grids coincide");
        McComparison c;
        const DiagonalSpectrum d = analytic_diagonal(sc, su, r);
        c.freqs = d.freqs;
        c.analytic = s_tx(d);
        c.welch = simulate_trace_psd(r.precoder, su.pulse, su.pa, r.op, mc);

        const double b = su.bandwidth, df = d.bin_width;
        const std::size_t edge_lo = std::size_t(std::lround((-0.5 * b - d.freqs.front()) / df));
        const std::size_t edge_hi = std::size_t(std::lround((0.5 * b - d.freqs.front()) / df));
        for (std::size_t j = 0; j < c.freqs.size(); ++j)
        {
            const double f = c.freqs[j];
            if (f < -1.5 * b || f > 1.5 * b || j == edge_lo || j == edge_hi)
                continue;
            c.max_abs_db = std::max(c.max_abs_db, std::abs(10.0 * std::log10(c.welch[j] / c.analytic[j])));
            ++c.compared;
        }
        return c;
    }

    // Two-antenna toy: analytical R_yy against the time-average correlation of a simulated waveform.
    // The waveform uses pa_sim, the prediction pa_model; both share the operating point of pa_sim.
    struct CorrComparison
    {
        double max_rel_error = 0.0; // |R_mc - R_model| / sqrt(R_mm(0) R_m'm'(0)) over entries and lags
        int max_lag = 0;
        LagCorrelation model, empirical;
    };

    inline Precoder toy_precoder(std::uint64_t seed)
    {
        Rng rng = make_rng(seed, Stream::test, 7);
        Precoder w;
        w.first_tap = -1;
        w.allocation = {0.5, 0.5};
        for (int l = 0; l < 3; ++l)
        {
            Eigen::MatrixXcd t(2, 2);
            for (Eigen::Index i = 0; i < t.size(); ++i)
                t(i) = complex_normal(rng);
            t.row(1) *= 0.6; // unequal antenna powers
            w.taps.push_back(t);
        }
        const double norm = std::sqrt(2.0 / w.energy());
        for (auto &t : w.taps)
            t *= norm;
        return w;
    }

    inline CorrComparison compare_toy_corr(const PAModel &pa_sim, const PAModel &pa_model, const McConfig &mc, int max_lag = 10)
    {
        const Pulse pulse = make_rrc_pulse();
        const LagKernel g = pulse_autocorr(pulse);
        const Precoder w = toy_precoder(mc.seed);
        const LagCorrelation rxx_sym = tx_corr_symbol_rate(w);
        const OperatingPoint op = calibrate_1db(pa_sim, unamplified_powers(rxx_sym, g, pulse.oversampling));

        CorrComparison c;
        c.max_lag = max_lag;
        c.model = propagate_corr(discrete_to_continuous_corr(rxx_sym, g, pulse.oversampling), pa_model, op);
        c.empirical = empirical_corr(simulate_waveform(w, pulse, pa_sim, op, mc), max_lag);
        for (int lag = -max_lag; lag <= max_lag; ++lag)
            for (int m = 0; m < 2; ++m)
                for (int mp = 0; mp < 2; ++mp)
                {
                    const double ref = std::sqrt(c.empirical.at(0)(m, m).real() * c.empirical.at(0)(mp, mp).real());
                    c.max_rel_error = std::max(c.max_rel_error, std::abs(c.empirical.at(lag)(m, mp) - c.model.at(lag)(m, mp)) / ref);
                }
        return c;
    }
}

#endif
