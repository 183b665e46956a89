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

#ifndef OOBRAD_MC_HPP
#define OOBRAD_MC_HPP

#include "detail/fft.hpp"
#include "detail/parallel.hpp"
#include "error.hpp"
#include "pa.hpp"
#include "precode.hpp"
#include "rng.hpp"
#include "signal.hpp"
#include "spectral.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

namespace oobrad
{
    enum class SymbolKind
    {
        gaussian,
        qam
    };

    struct McConfig
    {
        std::size_t n_symbols = 200000;
        std::size_t welch_segment = 4096;
        double welch_overlap = 0.5;
        SymbolKind symbols = SymbolKind::gaussian;
        int qam_order = 16; // square constellations: 4, 16, 64, 256
        std::uint64_t seed = 1;

        void validate() const
        {
            if (n_symbols < 1)
                throw ParameterError("McConfig: need at least one symbol");
            if (!(welch_overlap >= 0.0 && welch_overlap < 1.0))
                throw ParameterError("McConfig: Welch overlap must lie in [0, 1)");
            if (welch_segment < 16 || welch_segment % 2 != 0)
                throw ParameterError("McConfig: Welch segment must be even and at least 16 samples");
            if (symbols == SymbolKind::qam)
            {
                const int side = int(std::lround(std::sqrt(double(qam_order))));
                if (side * side != qam_order || side < 2)
                    throw ParameterError("McConfig: QAM order must be a square number");
            }
        }
    };

    // K unit-power symbol streams of length n: CN(0, 1) or a unit-energy square QAM alphabet
    inline MultiSequence draw_symbols(int users, std::size_t n, const McConfig &mc, Rng &rng)
    {
        MultiSequence s(static_cast<std::size_t>(users), Sequence(n));
        if (mc.symbols == SymbolKind::gaussian)
        {
            for (auto &row : s)
                for (auto &v : row)
                    v = complex_normal(rng);
            return s;
        }
        const int side = int(std::lround(std::sqrt(double(mc.qam_order))));
        const double norm = std::sqrt(2.0 * (double(mc.qam_order) - 1.0) / 3.0);
        std::uniform_int_distribution<int> level(0, side - 1);
        for (auto &row : s)
            for (auto &v : row)
            {
                const double re = 2.0 * level(rng) - (side - 1);
                const double im = 2.0 * level(rng) - (side - 1);
                v = cd{re, im} / norm;
            }
        return s;
    }

    // Welch estimator with a periodic Hann window on the centered grid f_j = (j - nfft/2)/(nfft dt),
    // scaled so that sum_j S_j df equals the mean sample power
    class WelchEstimator
    {
    public:
        WelchEstimator(std::size_t segment, double overlap, double sample_period)
            : segment_(segment), step_(std::max<std::size_t>(1, std::size_t(std::llround(double(segment) * (1.0 - overlap))))),
              sample_period_(sample_period), window_(segment)
        {
            if (segment < 2)
                throw ParameterError("WelchEstimator: segment too short");
            double energy = 0.0;
            for (std::size_t n = 0; n < segment; ++n)
            {
                window_[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * double(n) / double(segment)));
                energy += window_[n] * window_[n];
            }
            // alternating sign moves f = 0 to the middle of the FFT output
            for (std::size_t n = 1; n < segment; n += 2)
                window_[n] = -window_[n];
            scale_ = sample_period / energy;
        }

        std::size_t segment() const { return segment_; }
        double bin_width() const { return 1.0 / (double(segment_) * sample_period_); }
        std::vector<double> freqs() const { return frequency_grid(segment_, sample_period_); }

        std::size_t segment_count(std::size_t length) const
        {
            return length < segment_ ? 0 : (length - segment_) / step_ + 1;
        }

        // Windowed, transformed segment s of y
        void transform(std::span<const cd> y, std::size_t s, std::span<cd> out) const
        {
            const std::size_t start = s * step_;
            for (std::size_t n = 0; n < segment_; ++n)
                out[n] = y[start + n] * window_[n];
            detail::fft_inplace(out);
        }

        // Auto spectrum of one sequence
        std::vector<double> auto_psd(std::span<const cd> y) const
        {
            const std::size_t count = segment_count(y.size());
            if (count < 2)
                throw ParameterError("welch: signal shorter than two segments");
            std::vector<double> acc(segment_, 0.0);
            Sequence work(segment_);
            for (std::size_t s = 0; s < count; ++s)
            {
                transform(y, s, work);
                for (std::size_t j = 0; j < segment_; ++j)
                    acc[j] += std::norm(work[j]);
            }
            for (auto &v : acc)
                v *= scale_ / double(count);
            return acc;
        }

        double scale() const { return scale_; }

    private:
        std::size_t segment_, step_;
        double sample_period_;
        std::vector<double> window_;
        double scale_;
    };

    // Averaged Hann-windowed cross-periodograms S_mm'(f) = conj(Y_m) Y_m', Hermitian by construction
    inline SpectralMatrix welch_cross_psd(const SampledSignal &y, const McConfig &mc)
    {
        mc.validate();
        const int dim = int(y.antenna_count());
        const WelchEstimator est(mc.welch_segment, mc.welch_overlap, 1.0 / y.sample_rate);
        const std::size_t count = est.segment_count(y.length());
        if (dim < 1 || count < 2)
            throw ParameterError("welch_cross_psd: signal shorter than two segments");

        SpectralMatrix s = detail::empty_spectrum(dim, mc.welch_segment, 1.0 / y.sample_rate);
        Eigen::MatrixXcd spectra(dim, Eigen::Index(mc.welch_segment)); // row m: Y_m
        Sequence work(mc.welch_segment);
        for (std::size_t seg = 0; seg < count; ++seg)
        {
            for (int m = 0; m < dim; ++m)
            {
                est.transform(y.antennas[std::size_t(m)], seg, work);
                for (std::size_t j = 0; j < work.size(); ++j)
                    spectra(m, Eigen::Index(j)) = work[j];
            }
            for (std::size_t j = 0; j < s.size(); ++j)
            {
                const Eigen::VectorXcd col = spectra.col(Eigen::Index(j));
                s.bins[j].noalias() += col.conjugate() * col.transpose();
            }
        }
        const double scale = est.scale() / double(count);
        for (auto &b : s.bins)
        {
            b *= scale;
            b = (0.5 * (b + b.adjoint())).eval();
        }
        return s;
    }

    // Time-average estimate R_mm'[n] = (1/L) sum_t conj(y_m[t]) y_m'[t + n] for 0 <= n <= max_lag,
    // negative lags filled with R[n]^H
    inline LagCorrelation empirical_corr(const SampledSignal &y, int max_lag)
    {
        const int dim = int(y.antenna_count());
        const std::size_t len = y.length();
        if (dim < 1)
            throw DimensionError("empirical_corr: no antennas");
        if (max_lag < 0 || std::size_t(max_lag) >= len)
            throw ParameterError("empirical_corr: max_lag must be below the signal length");

        LagCorrelation r(dim, -max_lag, max_lag, 1.0 / y.sample_rate);
        detail::parallel_for(std::size_t(dim) * std::size_t(dim), [&](std::size_t idx)
                             {
            const int m = int(idx) / dim, mp = int(idx) % dim;
            const auto &a = y.antennas[std::size_t(m)];
            const auto &b = y.antennas[std::size_t(mp)];
            for (int n = 0; n <= max_lag; ++n)
            {
                if (n == 0 && mp < m)
                    continue;
                cd acc{};
                for (std::size_t t = 0; t + std::size_t(n) < len; ++t)
                    acc += std::conj(a[t]) * b[t + std::size_t(n)];
                acc /= double(len);
                if (n == 0 && m == mp)
                    acc = acc.real();
                r.at(n)(m, mp) = acc;
            } });
        for (int m = 0; m < dim; ++m)
            for (int mp = 0; mp < m; ++mp)
                r.at(0)(m, mp) = std::conj(r.at(0)(mp, m));
        for (int n = 1; n <= max_lag; ++n)
            r.at(-n) = r.at(n).adjoint();
        return r;
    }

    // Monte-Carlo estimate of E[a^* |a|^{2(p-1)} b |b|^{2(p'-1)}] for jointly circular Gaussian a, b
    // with E[a^* b] = r
    inline cd moment_oracle(cd r, double var_a, double var_b, int p, int pp, std::size_t n_samples, std::uint64_t seed)
    {
        if (!(var_a > 0.0) || var_b < 0.0 || std::norm(r) > var_a * var_b * (1.0 + 1e-12))
            throw ParameterError("moment_oracle: infeasible correlation");
        if (p < 1 || pp < 1)
            throw ParameterError("moment_oracle: orders start at 1");
        Rng rng = make_rng(seed, Stream::test);
        const cd c = r / var_a;
        const double resid = std::max(0.0, var_b - std::norm(r) / var_a);
        cd acc{};
        for (std::size_t i = 0; i < n_samples; ++i)
        {
            const cd a = complex_normal(rng, var_a);
            const cd b = c * a + complex_normal(rng, resid);
            acc += std::conj(a) * std::pow(std::norm(a), p - 1) * b * std::pow(std::norm(b), pp - 1);
        }
        return acc / double(n_samples);
    }

    namespace detail
    {
        // Samples kept at each end of a simulated waveform: precoder ramp plus pulse tails
        inline std::size_t transient_samples(const Precoder &w, const Pulse &p)
        {
            return (w.taps.size() - 1 + 2 * std::size_t(p.span)) * std::size_t(p.oversampling);
        }
    }

    // Waveform chain for one antenna at a time: i.i.d. symbols -> precoder -> pulse -> operating point
    // scale -> amplifier, with start/end transients removed. visit(m, y_m) sees antennas in order.
    inline void simulate_antennas(const Precoder &w, const Pulse &p, const PAModel &pa, const OperatingPoint &op,
                                  const McConfig &mc, const std::function<void(int, Sequence &&)> &visit)
    {
        mc.validate();
        Rng rng = make_rng(mc.seed, Stream::symbols);
        const MultiSequence symbols = draw_symbols(w.users(), mc.n_symbols, mc, rng);
        const PrecodedStream stream(w, symbols);
        const std::size_t trim = detail::transient_samples(w, p);
        const std::size_t rate = std::size_t(p.oversampling);
        if (mc.n_symbols * rate <= 2 * trim + rate)
            throw ParameterError("simulate_waveform: too few symbols to clear the start-up transients");

        for (int m = 0; m < w.antennas(); ++m)
        {
            SampledSignal x = modulate(MultiSequence{stream.antenna(m)}, p);
            for (auto &v : x.antennas.front())
                v *= op.scale(m);
            PAModel antenna_pa;
            antenna_pa.branches = {pa.antenna(m)};
            SampledSignal y = amplify(x, antenna_pa);
            Sequence &full = y.antennas.front();
            // full covers symbol times first_tap - span .. ; keep the stationary middle
            Sequence kept(full.begin() + std::ptrdiff_t(trim), full.end() - std::ptrdiff_t(trim + rate));
            visit(m, std::move(kept));
        }
    }

    inline SampledSignal simulate_waveform(const Precoder &w, const Pulse &p, const PAModel &pa, const OperatingPoint &op,
                                           const McConfig &mc)
    {
        SampledSignal y{MultiSequence(std::size_t(w.antennas())), double(p.oversampling) / p.symbol_period};
        simulate_antennas(w, p, pa, op, mc, [&](int m, Sequence &&s)
                          { y.antennas[std::size_t(m)] = std::move(s); });
        return y;
    }

    // Welch estimate of S_tx(f) = sum_m S_{y_m y_m}(f) without holding the whole array waveform
    inline std::vector<double> simulate_trace_psd(const Precoder &w, const Pulse &p, const PAModel &pa, const OperatingPoint &op,
                                                  const McConfig &mc, std::vector<std::vector<double>> *per_antenna = nullptr)
    {
        const WelchEstimator est(mc.welch_segment, mc.welch_overlap, p.sample_period());
        std::vector<double> trace(mc.welch_segment, 0.0);
        if (per_antenna)
            per_antenna->assign(std::size_t(w.antennas()), {});
        simulate_antennas(w, p, pa, op, mc, [&](int m, Sequence &&y)
                          {
            auto psd = est.auto_psd(y);
            for (std::size_t j = 0; j < trace.size(); ++j)
                trace[j] += psd[j];
            if (per_antenna)
                (*per_antenna)[std::size_t(m)] = std::move(psd); });
        return trace;
    }
}

#endif
