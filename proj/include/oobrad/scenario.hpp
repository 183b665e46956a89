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

#ifndef OOBRAD_SCENARIO_HPP
#define OOBRAD_SCENARIO_HPP

#include "channel.hpp"
#include "error.hpp"
#include "mc.hpp"
#include "pa.hpp"
#include "precode.hpp"
#include "rng.hpp"
#include "signal.hpp"
#include "spectral.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

namespace oobrad
{
    inline double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
    inline double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

    // Complete description of one experiment. Defaults are the reference massive MIMO downlink:
    // 100 antennas, 10 users, i.i.d. Rayleigh fading with 15 symbols of excess delay.
    struct Scenario
    {
        std::string name = "default";
        int antennas = 100;
        int users = 10;

        ChannelKind channel = ChannelKind::rayleigh;
        int rayleigh_taps = 0;                // 0 means 15 kappa
        std::vector<double> user_angles_deg;  // LOS; empty means drawn at random
        double angle_range_deg = 60.0;        // random LOS users in [-range, range]
        double min_separation_deg = 2.0;      // between random LOS users
        double spacing_over_wavelength = 0.5; // Delta / lambda

        double rolloff = 0.22;
        int span = 32;
        int oversampling = 5;
        double symbol_period = 1.0;

        std::vector<cd> pa_coeffs{cd{1.0, 0.0}, cd{-0.03491, 0.005650}};
        OperatingTarget operating = OperatingTarget::compression_1db;
        double input_power = 1.0; // explicit_power mode only

        std::vector<double> allocation; // empty: equal
        std::vector<double> pathloss;   // users; empty: all ones
        double victim_pathloss = 1.0;
        ChannelKind victim_channel = ChannelKind::rayleigh;

        std::uint64_t seed = 1;
        int realizations = 20;
        int victims = 40;
        std::size_t nfft = 4096;
        double pattern_step_deg = 0.25;
        std::vector<double> ccdf_freqs_over_b{0.0, 0.5, 1.0, 1.5};

        McConfig mc;
        std::string output_dir = "out";

        int taps() const { return rayleigh_taps > 0 ? rayleigh_taps : 15 * oversampling; }
        double bandwidth() const { return (1.0 + rolloff) / symbol_period; }

        void validate() const
        {
            if (antennas < 1 || users < 1)
                throw ConfigError("scenario: antennas and users must be positive");
            if (users > antennas)
                throw ConfigError("scenario: more users than antennas");
            if (oversampling < 2)
                throw ConfigError("scenario: oversampling must be at least 2");
            if (!(rolloff >= 0.0 && rolloff <= 1.0))
                throw ConfigError("scenario: rolloff must lie in [0, 1]");
            if (span < 8)
                throw ConfigError("scenario: pulse span must be at least 8 symbols");
            if (!(symbol_period > 0.0))
                throw ConfigError("scenario: symbol period must be positive");
            if (pa_coeffs.empty() || pa_coeffs.front() == cd{})
                throw ConfigError("scenario: the linear amplifier coefficient must be nonzero");
            if (!allocation.empty() && int(allocation.size()) != users)
                throw ConfigError("scenario: allocation needs one entry per user");
            if (!pathloss.empty() && int(pathloss.size()) != users)
                throw ConfigError("scenario: pathloss needs one entry per user");
            for (double b : pathloss)
                if (!(b > 0.0))
                    throw ConfigError("scenario: path losses must be positive");
            if (!(victim_pathloss > 0.0))
                throw ConfigError("scenario: victim path loss must be positive");
            if (channel == ChannelKind::los && !user_angles_deg.empty() && int(user_angles_deg.size()) != users)
                throw ConfigError("scenario: need one LOS angle per user");
            for (double a : user_angles_deg)
                if (!(std::abs(a) < 90.0))
                    throw ConfigError("scenario: LOS angles must lie strictly inside (-90, 90) degrees");
            if (!(angle_range_deg > 0.0 && angle_range_deg < 90.0))
                throw ConfigError("scenario: angle range must lie in (0, 90) degrees");
            if (min_separation_deg < 0.0)
                throw ConfigError("scenario: minimum user separation must not be negative");
            if (channel == ChannelKind::los && user_angles_deg.empty() && min_separation_deg * users > 2.0 * angle_range_deg)
                throw ConfigError("scenario: minimum user separation does not fit the angle range");
            if (realizations < 1 || victims < 1)
                throw ConfigError("scenario: realizations and victims must be positive");
            if (nfft < 64 || nfft % 2 != 0)
                throw ConfigError("scenario: nfft must be even and at least 64");
            if (!(pattern_step_deg > 0.0))
                throw ConfigError("scenario: pattern step must be positive");
            if (operating == OperatingTarget::explicit_power && !(input_power > 0.0))
                throw ConfigError("scenario: explicit input power must be positive");
            if ((operating == OperatingTarget::compression_1db || operating == OperatingTarget::compression_1db_per_antenna) &&
                pa_coeffs.size() < 2)
                throw ConfigError("scenario: compression operating point needs a cubic coefficient");
            try
            {
                mc.validate();
            }
            catch (const ParameterError &e)
            {
                throw ConfigError(e.what());
            }
        }
    };

    // Quantities shared by all realizations of a scenario
    struct Setup
    {
        Pulse pulse;
        LagKernel g;
        PAModel pa;
        double bandwidth = 0.0;
    };

    inline Setup make_setup(const Scenario &sc)
    {
        sc.validate();
        Setup s;
        s.pulse = make_rrc_pulse(sc.rolloff, sc.span, sc.oversampling, sc.symbol_period);
        s.g = pulse_autocorr(s.pulse);
        s.pa = memoryless_pa(sc.pa_coeffs);
        s.bandwidth = sc.bandwidth();
        return s;
    }

    // One draw of the user fading together with everything that follows from it
    struct Realization
    {
        ChannelModel channel;
        DiscreteChannel discrete;
        Precoder precoder;
        LagCorrelation rxx_sym;          // R_xx[nu], unscaled
        std::vector<double> input_power; // sigma^2_{x_m} before the operating-point scale
        OperatingPoint op;
    };

    // Random LOS directions in [-range, range] with a minimum pairwise separation (rejection sampling)
    inline std::vector<double> draw_user_angles_deg(const Scenario &sc, std::uint64_t index)
    {
        Rng rng = make_rng(sc.seed, Stream::user_angles, index);
        std::vector<double> out;
        for (int attempt = 0; attempt < 100000 && int(out.size()) < sc.users; ++attempt)
        {
            const double a = uniform(rng, -sc.angle_range_deg, sc.angle_range_deg);
            bool ok = true;
            for (double b : out)
                ok = ok && std::abs(a - b) >= sc.min_separation_deg;
            if (ok)
                out.push_back(a);
        }
        if (int(out.size()) != sc.users)
            throw ConfigError("scenario: could not place the LOS users with the requested separation");
        return out;
    }

    // sigma^2_{x_m} = R_xx,mm(0) = (1/T) sum_nu R_xx,mm[nu] g(-nu T)
    inline std::vector<double> unamplified_powers(const LagCorrelation &rxx_sym, const LagKernel &g, int oversampling)
    {
        const double symbol_period = g.lag_spacing * oversampling;
        const detail::ContinuousLagMap lag_map(g, oversampling, symbol_period, detail::next_pow2(g.values.size()));
        std::vector<double> p(static_cast<std::size_t>(rxx_sym.dim()));
        for (int m = 0; m < rxx_sym.dim(); ++m)
            p[std::size_t(m)] = lag_map.at_zero(rxx_sym.entry(m, m), rxx_sym.first_lag(), symbol_period).real();
        return p;
    }

    inline OperatingPoint make_operating_point(const Scenario &sc, const PAModel &pa, const std::vector<double> &powers)
    {
        switch (sc.operating)
        {
        case OperatingTarget::compression_1db:
            return calibrate_1db(pa, powers, false);
        case OperatingTarget::compression_1db_per_antenna:
            return calibrate_1db(pa, powers, true);
        case OperatingTarget::explicit_power:
            return explicit_operating_point(sc.input_power, powers);
        case OperatingTarget::unscaled:
            break;
        }
        return OperatingPoint{};
    }

    // Realization `index` of the scenario. Each index owns its own random streams.
    inline Realization draw_realization(const Scenario &sc, const Setup &su, std::uint64_t index)
    {
        Realization r;
        if (sc.channel == ChannelKind::los)
        {
            std::vector<double> deg = sc.user_angles_deg.empty() ? draw_user_angles_deg(sc, index) : sc.user_angles_deg;
            std::vector<double> rad;
            for (double d : deg)
                rad.push_back(deg2rad(d));
            Rng rng = make_rng(sc.seed, Stream::user_phases, index);
            r.channel = gen_los(rad, sc.antennas, sc.spacing_over_wavelength, rng, sc.oversampling, sc.symbol_period);
        }
        else
        {
            Rng rng = make_rng(sc.seed, Stream::user_channel, index);
            r.channel = gen_rayleigh(sc.antennas, sc.users, sc.taps(), rng, sc.oversampling, sc.symbol_period);
        }
        if (!sc.pathloss.empty())
            r.channel.pathloss = sc.pathloss;
        r.discrete = discretize(r.channel, su.g, sc.oversampling);
        r.precoder = mr_precoder(r.discrete, sc.allocation);
        r.rxx_sym = tx_corr_symbol_rate(r.precoder);
        r.input_power = unamplified_powers(r.rxx_sym, su.g, sc.oversampling);
        r.op = make_operating_point(sc, su.pa, r.input_power);
        return r;
    }

    // Single antenna, single user, flat unit channel at the same operating rule
    inline Realization siso_realization(const Scenario &sc, const Setup &su)
    {
        Realization r;
        r.channel.kind = ChannelKind::los;
        r.channel.sample_period = sc.symbol_period / sc.oversampling;
        r.channel.pathloss = {1.0};
        r.channel.angles = {0.0};
        r.channel.taps = {Eigen::MatrixXcd::Ones(1, 1)};
        r.discrete = discretize(r.channel, su.g, sc.oversampling);
        r.precoder = mr_precoder(r.discrete);
        r.rxx_sym = tx_corr_symbol_rate(r.precoder);
        r.input_power = unamplified_powers(r.rxx_sym, su.g, sc.oversampling);
        r.op = make_operating_point(sc, su.pa, r.input_power);
        return r;
    }

    inline SpectralMatrix analytic_spectrum(const Scenario &sc, const Setup &su, const Realization &r)
    {
        return amplified_psd(r.rxx_sym, su.g, sc.oversampling, su.pa, r.op, sc.nfft);
    }

    inline DiagonalSpectrum analytic_diagonal(const Scenario &sc, const Setup &su, const Realization &r)
    {
        return amplified_psd_diagonal(r.rxx_sym, su.g, sc.oversampling, su.pa, r.op, sc.nfft);
    }

    inline VictimSpec victim_spec(const Scenario &sc)
    {
        VictimSpec v;
        v.kind = sc.victim_channel;
        v.antennas = sc.antennas;
        v.taps = sc.taps();
        v.spacing_over_wavelength = sc.spacing_over_wavelength;
        v.pathloss = sc.victim_pathloss;
        v.oversampling = sc.oversampling;
        v.symbol_period = sc.symbol_period;
        return v;
    }
}

#endif
