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

#ifndef OOBRAD_PA_HPP
#define OOBRAD_PA_HPP

#include "detail/fft.hpp"
#include "detail/parallel.hpp"
#include "error.hpp"
#include "signal.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

namespace oobrad
{
    // Parallel-Hammerstein amplifier y_m = sum_p b_mp * (x_m |x_m|^{2(p-1)}).
    // branches[m][p-1] holds the FIR taps of branch p on the grid T/kappa; a memoryless branch has
    // one tap. A single antenna entry is shared by all antennas.
    struct PAModel
    {
        std::vector<std::vector<Sequence>> branches;

        int order() const { return branches.empty() ? 0 : int(branches.front().size()); }
        bool shared() const { return branches.size() == 1; }

        bool memoryless() const
        {
            for (const auto &antenna : branches)
                for (const auto &taps : antenna)
                    if (taps.size() > 1)
                        return false;
            return true;
        }

        const std::vector<Sequence> &antenna(int m) const { return branches.at(shared() ? 0 : std::size_t(m)); }

        // Memoryless coefficient b_{m,p}; zero for branches beyond the model order
        cd coeff(int m, int p) const
        {
            const auto &a = antenna(m);
            if (p < 1 || p > int(a.size()) || a[std::size_t(p - 1)].empty())
                return {};
            return a[std::size_t(p - 1)].front();
        }
    };

    // Memoryless polynomial with b_p = coeffs[p-1], identical across antennas
    inline PAModel memoryless_pa(const std::vector<cd> &coeffs)
    {
        if (coeffs.empty() || coeffs.front() == cd{})
            throw ParameterError("memoryless_pa: the linear coefficient b1 must be nonzero");
        PAModel pa;
        pa.branches.emplace_back();
        for (const cd &b : coeffs)
            pa.branches.front().push_back(Sequence{b});
        return pa;
    }

    // Linear gain b1 = 1 and cubic coefficient b2 = -0.03491 + j0.005650, the class-AB amplifier
    // used throughout the reference experiments
    inline PAModel reference_pa() { return memoryless_pa({cd{1.0, 0.0}, cd{-0.03491, 0.005650}}); }

    enum class OperatingTarget
    {
        compression_1db,             // one global scalar, antenna-averaged power at the compression point
        compression_1db_per_antenna, // every antenna individually at its compression point
        explicit_power,              // antenna-averaged power set to a given value
        unscaled
    };

    struct OperatingPoint
    {
        OperatingTarget target = OperatingTarget::unscaled;
        std::vector<double> input_scale{1.0}; // one entry (global) or one per antenna
        double input_power = 0.0;             // targeted per-antenna input power
        double p1db = 0.0;                    // compression point of the amplifier, if known

        double scale(int m) const { return input_scale.size() == 1 ? input_scale.front() : input_scale.at(std::size_t(m)); }
    };

    // Smallest input power p > 0 with |b1 + b2 p|^2 = |b1|^2 10^{-1/10}, the 1-dB compression point of
    // the instantaneous gain of a memoryless third-order polynomial
    inline double compression_point_1db(cd b1, cd b2)
    {
        const double a = std::norm(b2);
        const double b = 2.0 * std::real(std::conj(b1) * b2);
        const double c = std::norm(b1) * (1.0 - std::pow(10.0, -0.1));
        if (a == 0.0 || std::norm(b1) == 0.0)
            throw NumericalError("calibrate_1db: the amplifier is linear and has no compression point");
        if (b >= 0.0)
            throw NumericalError("calibrate_1db: expansive amplifier, the gain never compresses");
        const double disc = b * b - 4.0 * a * c;
        if (disc < 0.0)
            throw NumericalError("calibrate_1db: the gain never drops by 1 dB");
        const double q = -0.5 * (b - std::sqrt(disc)); // > 0
        return c / q;
    }

    // Input scaling that places the amplifier at its 1-dB compression point. input_powers are the
    // unscaled per-antenna powers sigma_m^2. Global mode scales the antenna average to p1dB.
    inline OperatingPoint calibrate_1db(const PAModel &pa, const std::vector<double> &input_powers, bool per_antenna = false)
    {
        if (!pa.memoryless() || pa.order() < 2)
            throw ParameterError("calibrate_1db: needs a memoryless amplifier with a cubic branch");
        if (input_powers.empty())
            throw DimensionError("calibrate_1db: no input powers given");

        const int m_count = int(input_powers.size());
        std::vector<double> p1db(static_cast<std::size_t>(m_count));
        for (int m = 0; m < m_count; ++m)
            p1db[std::size_t(m)] = compression_point_1db(pa.coeff(m, 1), pa.coeff(m, 2));

        OperatingPoint op;
        if (per_antenna)
        {
            op.target = OperatingTarget::compression_1db_per_antenna;
            op.input_scale.resize(std::size_t(m_count));
            for (int m = 0; m < m_count; ++m)
            {
                if (!(input_powers[std::size_t(m)] > 0.0))
                    throw NumericalError("calibrate_1db: antenna without input power");
                op.input_scale[std::size_t(m)] = std::sqrt(p1db[std::size_t(m)] / input_powers[std::size_t(m)]);
            }
            op.p1db = std::accumulate(p1db.begin(), p1db.end(), 0.0) / m_count;
            op.input_power = op.p1db;
            return op;
        }

        const double mean_power = std::accumulate(input_powers.begin(), input_powers.end(), 0.0) / m_count;
        if (!(mean_power > 0.0))
            throw NumericalError("calibrate_1db: zero input power");
        op.target = OperatingTarget::compression_1db;
        op.p1db = std::accumulate(p1db.begin(), p1db.end(), 0.0) / m_count;
        op.input_power = op.p1db;
        op.input_scale = {std::sqrt(op.p1db / mean_power)};
        return op;
    }

    // Global scaling to an explicit antenna-averaged input power
    inline OperatingPoint explicit_operating_point(double target_power, const std::vector<double> &input_powers)
    {
        if (!(target_power > 0.0))
            throw ParameterError("operating point: input power must be positive");
        const double mean_power = std::accumulate(input_powers.begin(), input_powers.end(), 0.0) / double(input_powers.size());
        if (!(mean_power > 0.0))
            throw NumericalError("operating point: zero input power");
        OperatingPoint op;
        op.target = OperatingTarget::explicit_power;
        op.input_power = target_power;
        op.input_scale = {std::sqrt(target_power / mean_power)};
        return op;
    }

    // Waveform-level amplification, per antenna y = sum_p b_p * (x |x|^{2(p-1)}); FIR branches are causal
    // and the output keeps the input length
    inline SampledSignal amplify(const SampledSignal &x, const PAModel &pa)
    {
        if (pa.branches.empty())
            throw ParameterError("amplify: amplifier has no branches");
        if (!pa.shared() && pa.branches.size() != x.antenna_count())
            throw DimensionError("amplify: amplifier count does not match antenna count");

        SampledSignal y{MultiSequence(x.antenna_count()), x.sample_rate};
        detail::parallel_for(x.antenna_count(), [&](std::size_t m)
                             {
            const Sequence &in = x.antennas[m];
            const auto &branches = pa.antenna(int(m));
            Sequence out(in.size(), cd{});
            Sequence term(in.size());
            for (std::size_t p = 0; p < branches.size(); ++p)
            {
                const auto &taps = branches[p];
                if (taps.empty())
                    continue;
                for (std::size_t i = 0; i < in.size(); ++i)
                    term[i] = p == 0 ? in[i] : in[i] * std::pow(std::norm(in[i]), double(p));
                if (taps.size() == 1)
                {
                    for (std::size_t i = 0; i < in.size(); ++i)
                        out[i] += taps.front() * term[i];
                }
                else
                {
                    const Sequence filtered = detail::convolve(term, taps);
                    for (std::size_t i = 0; i < in.size(); ++i)
                        out[i] += filtered[i];
                }
            }
            y.antennas[m] = std::move(out); });
        return y;
    }

    // E[a^* |a|^{2(p-1)} b |b|^{2(p'-1)}] for zero-mean jointly circular Gaussian a, b with
    // E[a^* b] = r, E|a|^2 = var_a, E|b|^2 = var_b (moment theorem). Orders 1 and 2 only.
    inline cd gaussian_moment(cd r, double var_a, double var_b, int p, int pp)
    {
        if (p < 1 || p > 2 || pp < 1 || pp > 2)
            throw ParameterError("gaussian_moment: only orders 1 and 2 are supported");
        if (std::norm(r) > var_a * var_b + 1e-9)
            throw ParameterError("gaussian_moment: |r|^2 exceeds var_a var_b");
        if (p == 1 && pp == 1)
            return r;
        if (p == 1)
            return 2.0 * var_b * r;
        if (pp == 1)
            return 2.0 * var_a * r;
        return 2.0 * r * (2.0 * var_a * var_b + std::norm(r));
    }

    namespace detail
    {
        // R_{y_m y_m'} for the memoryless cubic amplifier, given R = R_{x_m x_m'}(tau) and the input powers
        inline cd amplified_corr(cd r, double var_m, double var_mp, cd b1m, cd b2m, cd b1mp, cd b2mp)
        {
            return std::conj(b1m) * b1mp * r +
                   2.0 * r * (std::conj(b1m) * b2mp * var_mp + std::conj(b2m) * b1mp * var_m +
                              std::conj(b2m) * b2mp * (2.0 * var_m * var_mp + std::norm(r)));
        }

        inline void require_cubic(const PAModel &pa, const char *who)
        {
            if (!pa.memoryless())
                throw ParameterError(std::string(who) + ": amplifiers with memory are only supported in the waveform simulation");
            if (pa.order() < 1 || pa.order() > 2)
                throw ParameterError(std::string(who) + ": analytical propagation supports at most a linear and a cubic branch");
        }
    }

    // R_yy(tau) for Gaussian inputs through the memoryless cubic amplifier. Rxx is on the T/kappa grid
    // and is scaled by the operating point before the moments are formed.
    inline LagCorrelation propagate_corr(const LagCorrelation &rxx, const PAModel &pa, const OperatingPoint &op)
    {
        detail::require_cubic(pa, "propagate_corr");
        if (!rxx.contains(0))
            throw DimensionError("propagate_corr: correlation must contain lag 0");
        const int dim = rxx.dim();
        if (!pa.shared() && int(pa.branches.size()) != dim)
            throw DimensionError("propagate_corr: amplifier count does not match antenna count");

        std::vector<double> scale(static_cast<std::size_t>(dim)), var(static_cast<std::size_t>(dim));
        for (int m = 0; m < dim; ++m)
        {
            scale[std::size_t(m)] = op.scale(m);
            var[std::size_t(m)] = scale[std::size_t(m)] * scale[std::size_t(m)] * rxx.at(0)(m, m).real();
        }

        LagCorrelation ryy(dim, rxx.first_lag(), rxx.last_lag(), rxx.lag_spacing());
        for (int lag = rxx.first_lag(); lag <= rxx.last_lag(); ++lag)
        {
            const auto &in = rxx.at(lag);
            auto &out = ryy.at(lag);
            for (int m = 0; m < dim; ++m)
                for (int mp = 0; mp < dim; ++mp)
                {
                    const cd r = scale[std::size_t(m)] * scale[std::size_t(mp)] * in(m, mp);
                    out(m, mp) = detail::amplified_corr(r, var[std::size_t(m)], var[std::size_t(mp)],
                                                        pa.coeff(m, 1), pa.coeff(m, 2), pa.coeff(mp, 1), pa.coeff(mp, 2));
                }
        }
        return ryy;
    }
}

#endif
