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

#ifndef OOBRAD_SIGNAL_HPP
#define OOBRAD_SIGNAL_HPP

#include "detail/fft.hpp"
#include "error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace oobrad
{
    // One complex sequence per antenna (or per user), all of equal length
    using MultiSequence = std::vector<Sequence>;

    // Truncated, unit-energy pulse sampled on the grid T/kappa, centered at index span*kappa
    struct Pulse
    {
        Sequence taps;
        double symbol_period = 1.0; // T
        int oversampling = 5;       // kappa
        double rolloff = 0.22;
        int span = 32; // symbols on each side of the center tap

        int center() const { return span * oversampling; }
        double sample_period() const { return symbol_period / oversampling; }
        double bandwidth() const { return (1.0 + rolloff) / symbol_period; } // occupied bandwidth B
    };

    // Real-time kernel sampled on a uniform lag grid: values[i] belongs to lag first_lag + i
    struct LagKernel
    {
        Sequence values;
        int first_lag = 0;
        double lag_spacing = 1.0;

        int last_lag() const { return first_lag + int(values.size()) - 1; }
        cd at(int lag) const
        {
            const int i = lag - first_lag;
            return (i < 0 || i >= int(values.size())) ? cd{} : values[std::size_t(i)];
        }
    };

    // Uniformly sampled multi-antenna baseband waveform
    struct SampledSignal
    {
        MultiSequence antennas;
        double sample_rate = 5.0; // kappa / T

        std::size_t antenna_count() const { return antennas.size(); }
        std::size_t length() const { return antennas.empty() ? 0 : antennas.front().size(); }
    };

    // Matrix-valued correlation R[n] = E[a^*(t) a^T(t + n*spacing)] on a contiguous lag range
    class LagCorrelation
    {
    public:
        LagCorrelation() = default;
        LagCorrelation(int dim, int first_lag, int last_lag, double lag_spacing)
            : dim_(dim), first_lag_(first_lag), lag_spacing_(lag_spacing)
        {
            if (dim < 1 || last_lag < first_lag)
                throw DimensionError("LagCorrelation: empty dimension or lag range");
            matrices_.assign(std::size_t(last_lag - first_lag + 1), Eigen::MatrixXcd::Zero(dim, dim));
        }

        int dim() const { return dim_; }
        int first_lag() const { return first_lag_; }
        int last_lag() const { return first_lag_ + int(matrices_.size()) - 1; }
        std::size_t lag_count() const { return matrices_.size(); }
        double lag_spacing() const { return lag_spacing_; }
        bool contains(int lag) const { return lag >= first_lag_ && lag <= last_lag(); }

        Eigen::MatrixXcd &at(int lag) { return matrices_.at(std::size_t(lag - first_lag_)); }
        const Eigen::MatrixXcd &at(int lag) const { return matrices_.at(std::size_t(lag - first_lag_)); }

        // Entry (m, m') as a sequence over the lag range
        Sequence entry(int m, int mp) const
        {
            Sequence out(matrices_.size());
            for (std::size_t i = 0; i < matrices_.size(); ++i)
                out[i] = matrices_[i](m, mp);
            return out;
        }

        // max over lags of |R(-n) - R(n)^H|, elementwise; lags outside the range count as zero
        double hermitian_defect() const
        {
            double worst = 0.0;
            const int reach = std::max(std::abs(first_lag_), std::abs(last_lag()));
            for (int n = 0; n <= reach; ++n)
            {
                const Eigen::MatrixXcd pos = contains(n) ? at(n) : Eigen::MatrixXcd::Zero(dim_, dim_);
                const Eigen::MatrixXcd neg = contains(-n) ? at(-n) : Eigen::MatrixXcd::Zero(dim_, dim_);
                worst = std::max(worst, (neg - pos.adjoint()).cwiseAbs().maxCoeff());
            }
            return worst;
        }

    private:
        int dim_ = 0;
        int first_lag_ = 0;
        double lag_spacing_ = 1.0;
        std::vector<Eigen::MatrixXcd> matrices_;
    };

    // Truncated root-raised-cosine pulse normalized to unit energy, sum |p|^2 T/kappa = 1.
    // rolloff = 0 gives the sinc pulse.
    inline Pulse make_rrc_pulse(double rolloff = 0.22, int span = 32, int oversampling = 5, double symbol_period = 1.0)
    {
        if (!(rolloff >= 0.0 && rolloff <= 1.0))
            throw ParameterError("make_rrc_pulse: rolloff must lie in [0, 1]");
        if (span < 8)
            throw ParameterError("make_rrc_pulse: span must be at least 8 symbols");
        if (oversampling < 2)
            throw ParameterError("make_rrc_pulse: oversampling must be at least 2");
        if (!(symbol_period > 0.0))
            throw ParameterError("make_rrc_pulse: symbol period must be positive");

        constexpr double pi = std::numbers::pi;
        const double b = rolloff;
        Pulse p{Sequence(std::size_t(2 * span * oversampling + 1)), symbol_period, oversampling, rolloff, span};

        for (std::size_t i = 0; i < p.taps.size(); ++i)
        {
            const double t = (double(i) - double(p.center())) / double(oversampling); // in units of T
            double v;
            if (t == 0.0)
                v = 1.0 - b + 4.0 * b / pi;
            else if (b > 0.0 && std::abs(1.0 - 16.0 * b * b * t * t) < 1e-10)
                // t = +-T/(4 rolloff)
                v = b / std::sqrt(2.0) * ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * b)) + (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * b)));
            else
                v = (std::sin(pi * t * (1.0 - b)) + 4.0 * b * t * std::cos(pi * t * (1.0 + b))) /
                    (pi * t * (1.0 - 16.0 * b * b * t * t));
            p.taps[i] = v;
        }

        double energy = 0.0;
        for (const auto &v : p.taps)
            energy += std::norm(v);
        energy *= p.sample_period();
        const double scale = 1.0 / std::sqrt(energy);
        for (auto &v : p.taps)
            v *= scale;
        return p;
    }

    // g(tau) = (p * p^*(-.))(tau) = int p(t) p^*(t - tau) dt on the grid T/kappa, lags [-2 span kappa, 2 span kappa]
    inline LagKernel pulse_autocorr(const Pulse &p)
    {
        const int n = int(p.taps.size());
        LagKernel g{Sequence(std::size_t(2 * n - 1)), -(n - 1), p.sample_period()};
        for (int lag = -(n - 1); lag <= n - 1; ++lag)
        {
            cd acc{};
            for (int k = std::max(0, lag); k < std::min(n, n + lag); ++k)
                acc += p.taps[std::size_t(k)] * std::conj(p.taps[std::size_t(k - lag)]);
            g.values[std::size_t(lag + n - 1)] = acc * p.sample_period();
        }
        return g;
    }

    // Pulse-amplitude modulation x(t) = sum_n x[n] p(t - nT). Output sample 0 sits at t = -span*T;
    // each antenna yields (N + 2 span) kappa samples.
    inline SampledSignal modulate(const MultiSequence &symbols, const Pulse &p)
    {
        SampledSignal out{{}, double(p.oversampling) / p.symbol_period};
        if (symbols.empty())
            return out;
        const std::size_t n = symbols.front().size();
        for (const auto &row : symbols)
            if (row.size() != n)
                throw DimensionError("modulate: all antennas need the same number of symbols");

        const std::size_t kappa = std::size_t(p.oversampling);
        const std::size_t out_len = (n + 2 * std::size_t(p.span)) * kappa;
        std::optional<detail::FftFilter> filter;
        if (n * p.taps.size() > 65536)
            filter.emplace(p.taps);

        out.antennas.reserve(symbols.size());
        for (const auto &row : symbols)
        {
            Sequence y(out_len, cd{});
            if (n > 0)
            {
                if (filter)
                {
                    Sequence stuffed((n - 1) * kappa + 1, cd{});
                    for (std::size_t k = 0; k < n; ++k)
                        stuffed[k * kappa] = row[k];
                    const Sequence full = filter->apply(stuffed);
                    std::copy(full.begin(), full.end(), y.begin());
                }
                else
                {
                    for (std::size_t k = 0; k < n; ++k)
                        for (std::size_t j = 0; j < p.taps.size(); ++j)
                            y[k * kappa + j] += row[k] * p.taps[j];
                }
            }
            out.antennas.push_back(std::move(y));
        }
        return out;
    }

    namespace detail
    {
        // Maps one entry of a symbol-rate correlation onto the T/kappa lag grid,
        // R(tau_n) = (1/T) sum_nu R[nu] g(tau_n - nu T), through a circular FFT of length nfft.
        // nfft must cover the full output support so the circular result equals the linear one.
        class ContinuousLagMap
        {
        public:
            ContinuousLagMap(const LagKernel &g, int oversampling, double symbol_period, std::size_t nfft)
                : g_(g), kappa_(oversampling), nfft_(nfft), spectrum_(nfft, cd{})
            {
                if (std::size_t(g.values.size()) > nfft)
                    throw ParameterError("ContinuousLagMap: nfft shorter than the pulse autocorrelation");
                for (int lag = g.first_lag; lag <= g.last_lag(); ++lag)
                    spectrum_[wrap(lag)] = g.at(lag) / symbol_period;
                fft_inplace(spectrum_);
            }

            std::size_t nfft() const { return nfft_; }
            std::size_t wrap(long lag) const
            {
                const long n = long(nfft_);
                return std::size_t(((lag % n) + n) % n);
            }

            // Output support for symbol lags [nu0, nu1]
            int first_output_lag(int nu0) const { return nu0 * kappa_ + g_.first_lag; }
            int last_output_lag(int nu1) const { return nu1 * kappa_ + g_.last_lag(); }

            // out (size nfft) receives R(tau_n) at index n mod nfft
            void map(std::span<const cd> r_sym, int nu0, std::span<cd> out) const
            {
                const int nu1 = nu0 + int(r_sym.size()) - 1;
                if (std::size_t(last_output_lag(nu1) - first_output_lag(nu0) + 1) > nfft_)
                    throw ParameterError("ContinuousLagMap: nfft shorter than the lag support");
                std::fill(out.begin(), out.end(), cd{});
                for (std::size_t i = 0; i < r_sym.size(); ++i)
                    out[wrap(long(nu0 + int(i)) * kappa_)] = r_sym[i];
                fft_inplace(out);
                for (std::size_t i = 0; i < nfft_; ++i)
                    out[i] *= spectrum_[i];
                fft_inplace(out, FftDirection::backward);
                const double scale = 1.0 / double(nfft_);
                for (auto &v : out)
                    v *= scale;
            }

            // Zero-lag value by direct summation, (1/T) sum_nu R[nu] g(-nu T)
            cd at_zero(std::span<const cd> r_sym, int nu0, double symbol_period) const
            {
                cd acc{};
                for (std::size_t i = 0; i < r_sym.size(); ++i)
                    acc += r_sym[i] * g_.at(-(nu0 + int(i)) * kappa_);
                return acc / symbol_period;
            }

        private:
            LagKernel g_;
            int kappa_;
            std::size_t nfft_;
            Sequence spectrum_;
        };
    }

    // R(tau) = (1/T) sum_nu R[nu] g(tau - nu T) on the grid T/kappa. Output support is the
    // symbol-rate support stretched by kappa plus the support of g.
    inline LagCorrelation discrete_to_continuous_corr(const LagCorrelation &rd, const LagKernel &g, int oversampling)
    {
        if (oversampling < 2)
            throw ParameterError("discrete_to_continuous_corr: oversampling must be at least 2");
        const double symbol_period = g.lag_spacing * oversampling;
        if (std::abs(rd.lag_spacing() - symbol_period) > 1e-12 * symbol_period)
            throw DimensionError("discrete_to_continuous_corr: correlation spacing does not match the pulse grid");

        const int first = rd.first_lag() * oversampling + g.first_lag;
        const int last = rd.last_lag() * oversampling + g.last_lag();
        const detail::ContinuousLagMap lag_map(g, oversampling, symbol_period, detail::next_pow2(std::size_t(last - first + 1)));

        LagCorrelation out(rd.dim(), first, last, g.lag_spacing);
        Sequence work(lag_map.nfft());
        for (int m = 0; m < rd.dim(); ++m)
            for (int mp = 0; mp < rd.dim(); ++mp)
            {
                const Sequence r = rd.entry(m, mp);
                lag_map.map(r, rd.first_lag(), work);
                for (int lag = first; lag <= last; ++lag)
                    out.at(lag)(m, mp) = work[lag_map.wrap(lag)];
            }
        return out;
    }
}

#endif
