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

#ifndef OOBRAD_CHANNEL_HPP
#define OOBRAD_CHANNEL_HPP

#include "error.hpp"
#include "rng.hpp"
#include "signal.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oobrad
{
    enum class ChannelKind
    {
        los,
        rayleigh
    };

    // Small-scale fading impulse responses from M antennas to K receivers on the grid T/kappa.
    // taps[i] is the K x M matrix at delay i*T/kappa.
    struct ChannelModel
    {
        ChannelKind kind = ChannelKind::rayleigh;
        std::vector<Eigen::MatrixXcd> taps;
        double sample_period = 0.2;
        std::vector<double> pathloss; // beta per receiver
        std::vector<double> angles;   // LOS: receiver azimuths in radians
        int tap_count = 1;            // Rayleigh: L

        int receivers() const { return taps.empty() ? 0 : int(taps.front().rows()); }
        int antennas() const { return taps.empty() ? 0 : int(taps.front().cols()); }
    };

    // Symbol-rate channel H[l], l = first_tap .. first_tap + taps.size() - 1 (K x M each)
    struct DiscreteChannel
    {
        std::vector<Eigen::MatrixXcd> taps;
        int first_tap = 0;
        double symbol_period = 1.0;

        int last_tap() const { return first_tap + int(taps.size()) - 1; }
        int receivers() const { return taps.empty() ? 0 : int(taps.front().rows()); }
        int antennas() const { return taps.empty() ? 0 : int(taps.front().cols()); }
        double energy() const
        {
            double e = 0.0;
            for (const auto &h : taps)
                e += h.squaredNorm();
            return e;
        }
    };

    // Uniform linear array response [sigma]_m = exp(j 2 pi m (Delta/lambda) sin(theta)), m = 0 .. M-1
    inline Eigen::VectorXcd steering_vector(int antennas, double spacing_over_wavelength, double angle)
    {
        Eigen::VectorXcd a(antennas);
        const double phase = 2.0 * std::numbers::pi * spacing_over_wavelength * std::sin(angle);
        for (int m = 0; m < antennas; ++m)
            a(m) = std::polar(1.0, phase * m);
        return a;
    }

    // Line-of-sight channel: one tap per link, exp(j phi_k) sigma_k with phi_k ~ U[0, 2 pi)
    inline ChannelModel gen_los(const std::vector<double> &angles, int antennas, double spacing_over_wavelength,
                                Rng &rng, int oversampling = 5, double symbol_period = 1.0)
    {
        if (antennas < 1)
            throw ParameterError("gen_los: need at least one antenna");
        for (double a : angles)
            if (!(std::abs(a) < std::numbers::pi / 2))
                throw ParameterError("gen_los: angles must lie strictly inside (-pi/2, pi/2)");

        ChannelModel ch;
        ch.kind = ChannelKind::los;
        ch.sample_period = symbol_period / oversampling;
        ch.pathloss.assign(angles.size(), 1.0);
        ch.angles = angles;
        ch.tap_count = 1;
        Eigen::MatrixXcd h(Eigen::Index(angles.size()), antennas);
        for (std::size_t k = 0; k < angles.size(); ++k)
        {
            const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
            h.row(Eigen::Index(k)) = std::polar(1.0, phi) * steering_vector(antennas, spacing_over_wavelength, angles[k]).transpose();
        }
        ch.taps.push_back(std::move(h));
        return ch;
    }

    inline ChannelModel gen_los(const std::vector<double> &angles, int antennas, double spacing_over_wavelength = 0.5,
                                std::uint64_t seed = 1, int oversampling = 5, double symbol_period = 1.0)
    {
        Rng rng = make_rng(seed, Stream::user_phases);
        return gen_los(angles, antennas, spacing_over_wavelength, rng, oversampling, symbol_period);
    }

    // i.i.d. Rayleigh fading: L taps per link on the grid T/kappa, each CN(0, 1/L)
    inline ChannelModel gen_rayleigh(int antennas, int receivers, int taps, Rng &rng, int oversampling = 5,
                                     double symbol_period = 1.0)
    {
        if (antennas < 1 || receivers < 1)
            throw ParameterError("gen_rayleigh: need at least one antenna and one receiver");
        if (taps < 1)
            throw ParameterError("gen_rayleigh: need at least one tap");

        ChannelModel ch;
        ch.kind = ChannelKind::rayleigh;
        ch.sample_period = symbol_period / oversampling;
        ch.pathloss.assign(std::size_t(receivers), 1.0);
        ch.tap_count = taps;
        ch.taps.assign(std::size_t(taps), Eigen::MatrixXcd(receivers, antennas));
        const double var = 1.0 / taps;
        // link-major draw order: all taps of link (k, m) are consecutive
        for (int k = 0; k < receivers; ++k)
            for (int m = 0; m < antennas; ++m)
                for (int i = 0; i < taps; ++i)
                    ch.taps[std::size_t(i)](k, m) = complex_normal(rng, var);
        return ch;
    }

    inline ChannelModel gen_rayleigh(int antennas, int receivers, int taps, int oversampling, std::uint64_t seed,
                                     double symbol_period = 1.0)
    {
        Rng rng = make_rng(seed, Stream::user_channel);
        return gen_rayleigh(antennas, receivers, taps, rng, oversampling, symbol_period);
    }

    struct VictimSpec
    {
        ChannelKind kind = ChannelKind::rayleigh;
        int antennas = 100;
        int taps = 75;                        // Rayleigh
        double angle = 0.0;                   // LOS, radians
        double spacing_over_wavelength = 0.5; // LOS
        double pathloss = 1.0;
        int oversampling = 5;
        double symbol_period = 1.0;
    };

    // Single receiver whose fading is drawn from the victim stream, independent of every user draw
    inline ChannelModel gen_victim(const VictimSpec &spec, std::uint64_t seed, std::uint64_t index = 0)
    {
        Rng rng = make_rng(seed, Stream::victim_channel, index);
        ChannelModel ch = spec.kind == ChannelKind::los
                              ? gen_los({spec.angle}, spec.antennas, spec.spacing_over_wavelength, rng, spec.oversampling, spec.symbol_period)
                              : gen_rayleigh(spec.antennas, 1, spec.taps, rng, spec.oversampling, spec.symbol_period);
        ch.pathloss.assign(1, spec.pathloss);
        return ch;
    }

    // H[l] = (p * H * p^*(-.))(lT) = sum_i sqrt(beta_k) h_i g(lT - i T/kappa).
    // Support: channel span plus the support of g, rounded to whole symbols.
    inline DiscreteChannel discretize(const ChannelModel &ch, const LagKernel &g, int oversampling)
    {
        if (ch.taps.empty())
            throw DimensionError("discretize: channel has no taps");
        if (std::abs(ch.sample_period - g.lag_spacing) > 1e-12 * g.lag_spacing)
            throw DimensionError("discretize: channel and pulse grids differ");

        const int kappa = oversampling;
        auto floor_div = [](int a, int b)
        { return a >= 0 ? a / b : -((-a + b - 1) / b); };
        const int first = -floor_div(-g.first_lag, kappa); // ceil
        const int last = floor_div(g.last_lag() + int(ch.taps.size()) - 1, kappa);

        DiscreteChannel out;
        out.first_tap = first;
        out.symbol_period = ch.sample_period * kappa;
        const Eigen::Index k = ch.receivers(), m = ch.antennas();
        for (int l = first; l <= last; ++l)
        {
            Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(k, m);
            for (int i = 0; i < int(ch.taps.size()); ++i)
            {
                const cd w = g.at(l * kappa - i);
                if (w != cd{})
                    h += w * ch.taps[std::size_t(i)];
            }
            out.taps.push_back(std::move(h));
        }
        for (Eigen::Index r = 0; r < k; ++r)
        {
            const double beta = ch.pathloss.empty() ? 1.0 : ch.pathloss.at(std::size_t(r));
            if (beta != 1.0)
                for (auto &h : out.taps)
                    h.row(r) *= std::sqrt(beta);
        }
        return out;
    }

    // h~(f) = sum_i h_i exp(-j 2 pi f i T/kappa) at arbitrary frequencies in [-kappa/2T, kappa/2T]
    inline std::vector<Eigen::MatrixXcd> freq_response(const ChannelModel &ch, const std::vector<double> &freqs)
    {
        const double nyquist = 0.5 / ch.sample_period;
        std::vector<Eigen::MatrixXcd> out;
        out.reserve(freqs.size());
        for (double f : freqs)
        {
            if (std::abs(f) > nyquist * (1.0 + 1e-12))
                throw ParameterError("freq_response: frequency outside the simulated band");
            Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(ch.receivers(), ch.antennas());
            for (std::size_t i = 0; i < ch.taps.size(); ++i)
                h += std::polar(1.0, -2.0 * std::numbers::pi * f * double(i) * ch.sample_period) * ch.taps[i];
            out.push_back(std::move(h));
        }
        return out;
    }

    // Same as freq_response on the standard grid f_j = (j - nfft/2) kappa/(nfft T), through FFTs
    inline std::vector<Eigen::MatrixXcd> freq_response_grid(const ChannelModel &ch, std::size_t nfft)
    {
        if (ch.taps.size() > nfft)
            throw ParameterError("freq_response_grid: more taps than frequency bins");
        const Eigen::Index k = ch.receivers(), m = ch.antennas();
        std::vector<Eigen::MatrixXcd> out(nfft, Eigen::MatrixXcd(k, m));
        Sequence work(nfft);
        for (Eigen::Index r = 0; r < k; ++r)
            for (Eigen::Index a = 0; a < m; ++a)
            {
                std::fill(work.begin(), work.end(), cd{});
                for (std::size_t i = 0; i < ch.taps.size(); ++i)
                    work[i] = (i % 2 ? -1.0 : 1.0) * ch.taps[i](r, a);
                detail::fft_inplace(work);
                for (std::size_t j = 0; j < nfft; ++j)
                    out[j](r, a) = work[j];
            }
        return out;
    }
}

#endif
