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

#include "oobrad/channel.hpp"
#include "oobrad/metrics.hpp"
#include "oobrad/pa.hpp"
#include "oobrad/precode.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace oobrad;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    const double bw = 1.22;

    // band integral by the bin-center rule
    double center_rule(const std::vector<double> &psd, const std::vector<double> &f, double lo, double hi)
    {
        double acc = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j)
            if (f[j] > lo && f[j] < hi)
                acc += psd[j];
        return acc * (f[1] - f[0]);
    }

    SpectralMatrix small_spectrum()
    {
        const Pulse pulse = make_rrc_pulse(0.22, 12, 5);
        const LagKernel g = pulse_autocorr(pulse);
        const Precoder w = mr_precoder(discretize(gen_los({-0.4, 0.3}, 6, 0.5, 2), g, 5));
        const LagCorrelation rxx = tx_corr_symbol_rate(w);
        const OperatingPoint op = calibrate_1db(reference_pa(), std::vector<double>(6, 1.0 / 6.0));
        return amplified_psd(rxx, g, 5, reference_pa(), op, 1024);
    }
}

TEST_CASE("band powers follow the bin-center rule on the standard grid", "[metrics]")
{
    const auto f = frequency_grid(4096, 0.2);
    std::vector<double> psd(f.size());
    Rng rng = make_rng(1, Stream::test);
    for (auto &v : psd)
        v = uniform(rng, 0.0, 1.0);
    const BandPowers p = band_powers(psd, f, bw);
    CHECK_THAT(p.in_band, WithinRel(center_rule(psd, f, -0.5 * bw, 0.5 * bw), 1e-13));
    CHECK_THAT(p.left, WithinRel(center_rule(psd, f, -1.5 * bw, -0.5 * bw), 1e-13));
    CHECK_THAT(p.right, WithinRel(center_rule(psd, f, 0.5 * bw, 1.5 * bw), 1e-13));
    CHECK(p.adjacent == std::max(p.left, p.right));
}

TEST_CASE("aclr of a stepped spectrum", "[metrics]")
{
    const auto f = frequency_grid(4096, 0.2);
    std::vector<double> psd(f.size(), 0.0);
    for (std::size_t j = 0; j < f.size(); ++j)
    {
        const double a = std::abs(f[j]);
        if (a < 0.5 * bw)
            psd[j] = 1.0;
        else if (a < 1.5 * bw)
            psd[j] = f[j] > 0 ? 0.01 : 0.001;
    }
    const double want = 10.0 * std::log10(center_rule(psd, f, 0.5 * bw, 1.5 * bw) / center_rule(psd, f, -0.5 * bw, 0.5 * bw));
    CHECK_THAT(aclr_db(psd, f, bw), WithinAbs(want, 1e-12));
    CHECK_THAT(aclr_db(psd, f, bw), WithinAbs(-20.0, 0.01));

    // scale invariance
    for (double c : {1e-6, 3.0, 1e5})
    {
        std::vector<double> scaled(psd);
        for (auto &v : scaled)
            v *= c;
        CHECK_THAT(aclr_db(scaled, f, bw), WithinAbs(aclr_db(psd, f, bw), 1e-12));
    }

    // mirrored spectrum gives the same value
    std::vector<double> mirrored(psd.size());
    mirrored[0] = psd[0];
    for (std::size_t j = 1; j < psd.size(); ++j)
        mirrored[j] = psd[psd.size() - j];
    CHECK_THAT(aclr_db(mirrored, f, bw), WithinAbs(aclr_db(psd, f, bw), 1e-12));
}

TEST_CASE("band power errors", "[metrics]")
{
    const auto f = frequency_grid(256, 0.5); // Nyquist 1 < 3B/2
    CHECK_THROWS_AS(band_powers(std::vector<double>(256, 1.0), f, bw), DimensionError);
    const auto g = frequency_grid(1024, 0.2);
    CHECK_THROWS_AS(band_powers(std::vector<double>(10, 1.0), g, bw), DimensionError);
    CHECK_THROWS_AS(band_powers(std::vector<double>(1024, 1.0), g, 0.0), ParameterError);
    CHECK_THROWS_AS(aclr_db(std::vector<double>(1024, 0.0), g, bw), NumericalError);
    CHECK(to_db(0.0) == db_floor);
    CHECK_THAT(to_db(100.0), WithinAbs(20.0, 1e-14));
}

TEST_CASE("pattern band powers equal integrated received spectra", "[metrics]")
{
    const SpectralMatrix s = small_spectrum();
    const std::vector<double> angles{-0.4, 0.0, 0.3, 1.2};
    const auto pat = pattern_band_powers(s, bw, angles, 0.5, 2.0);
    for (std::size_t i = 0; i < angles.size(); ++i)
    {
        const auto psd = received_psd(s, steering_vector(6, 0.5, angles[i]), 2.0);
        const BandPowers want = band_powers(psd, s.freqs, bw);
        CHECK_THAT(pat[i].in_band, WithinRel(want.in_band, 1e-10));
        CHECK_THAT(pat[i].left, WithinRel(want.left, 1e-10));
        CHECK_THAT(pat[i].right, WithinRel(want.right, 1e-10));
    }
    // the p_ob_max integral bounds every direction
    const double pmax = p_ob_max(s, bw);
    for (const auto &p : pat)
        CHECK(p.adjacent <= 2.0 * 6.0 * pmax * (1.0 + 1e-12));
}

TEST_CASE("eigenvalue ccdf tables", "[metrics]")
{
    const SpectralMatrix s = small_spectrum();
    const auto tables = eigen_ccdf(s, {0.0, 0.61});
    REQUIRE(tables.size() == 2);
    for (const auto &t : tables)
    {
        REQUIRE(t.level_db.size() == 6);
        double sum = 0.0;
        for (std::size_t i = 0; i < 6; ++i)
        {
            CHECK_THAT(t.fraction[i], WithinAbs(double(i + 1) / 6.0, 1e-15));
            sum += std::pow(10.0, t.level_db[i] / 10.0);
        }
        // eigenvalues re their mean average to one (unless clipped at the floor)
        CHECK_THAT(sum, WithinRel(6.0, 1e-9));
        CHECK_THAT(t.fraction_at_or_above(t.level_db.front()), WithinAbs(1.0 / 6.0, 1e-15));
        CHECK_THAT(t.mean_eigenvalue, WithinRel(s.bins[s.nearest_bin(t.freq)].trace().real() / 6.0, 1e-14));
    }
    CHECK(tables[0].freq == 0.0);
}
