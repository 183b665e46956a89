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

#include "oobrad/signal.hpp"
#include "oobrad/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace oobrad;
using Catch::Matchers::WithinAbs;

TEST_CASE("rrc pulse has unit energy and zero intersymbol interference", "[signal]")
{
    for (double rolloff : {0.0, 0.22, 0.5, 1.0})
    {
        const Pulse p = make_rrc_pulse(rolloff);
        double energy = 0.0;
        for (const auto &v : p.taps)
            energy += std::norm(v);
        CHECK_THAT(energy * p.sample_period(), WithinAbs(1.0, 1e-12));

        // g(nT) = delta[n] up to truncation of the tails
        const LagKernel g = pulse_autocorr(p);
        CHECK_THAT(g.at(0).real(), WithinAbs(1.0, 1e-12));
        for (int n = 1; n <= 10; ++n)
            CHECK(std::abs(g.at(n * p.oversampling)) < 5e-3);
    }
}

TEST_CASE("rrc pulse is real and symmetric", "[signal]")
{
    const Pulse p = make_rrc_pulse(0.22, 16, 4);
    REQUIRE(p.taps.size() == std::size_t(2 * 16 * 4 + 1));
    for (int i = 0; i <= p.center(); ++i)
    {
        CHECK(p.taps[std::size_t(i)].imag() == 0.0);
        CHECK_THAT(p.taps[std::size_t(i)].real(), WithinAbs(p.taps[p.taps.size() - 1 - std::size_t(i)].real(), 1e-15));
    }
    CHECK_THAT(p.bandwidth(), WithinAbs(1.22, 1e-15));
}

TEST_CASE("rrc pulse rejects bad parameters", "[signal]")
{
    CHECK_THROWS_AS(make_rrc_pulse(-0.1), ParameterError);
    CHECK_THROWS_AS(make_rrc_pulse(1.5), ParameterError);
    CHECK_THROWS_AS(make_rrc_pulse(0.22, 4), ParameterError);
    CHECK_THROWS_AS(make_rrc_pulse(0.22, 32, 1), ParameterError);
    CHECK_THROWS_AS(make_rrc_pulse(0.22, 32, 5, 0.0), ParameterError);
}

TEST_CASE("a single symbol reproduces the pulse", "[signal]")
{
    const Pulse p = make_rrc_pulse(0.22, 8, 5);
    const SampledSignal x = modulate({{cd{2.0, -1.0}}}, p);
    REQUIRE(x.length() == std::size_t((1 + 2 * 8) * 5));
    for (std::size_t i = 0; i < p.taps.size(); ++i)
        CHECK(std::abs(x.antennas[0][i] - cd{2.0, -1.0} * p.taps[i]) < 1e-14);
    for (std::size_t i = p.taps.size(); i < x.length(); ++i)
        CHECK(std::abs(x.antennas[0][i]) < 1e-14);
}

TEST_CASE("modulation is linear and shift-equivariant", "[signal]")
{
    const Pulse p = make_rrc_pulse(0.3, 8, 4);
    Rng rng = make_rng(5, Stream::test);
    Sequence a(40), b(40);
    for (auto &v : a)
        v = complex_normal(rng);
    for (auto &v : b)
        v = complex_normal(rng);
    const cd c{0.3, 1.7};
    Sequence mix(40);
    for (std::size_t i = 0; i < mix.size(); ++i)
        mix[i] = c * a[i] + b[i];
    const auto xa = modulate({a}, p), xb = modulate({b}, p), xm = modulate({mix}, p);
    for (std::size_t i = 0; i < xm.length(); ++i)
        CHECK(std::abs(xm.antennas[0][i] - (c * xa.antennas[0][i] + xb.antennas[0][i])) < 1e-12);

    // one symbol delay moves the waveform by kappa samples
    Sequence shifted(41, cd{});
    std::copy(a.begin(), a.end(), shifted.begin() + 1);
    const auto xs = modulate({shifted}, p);
    for (std::size_t i = 0; i < xa.length(); ++i)
        CHECK(std::abs(xs.antennas[0][i + 4] - xa.antennas[0][i]) < 1e-12);

    CHECK_THROWS_AS(modulate({a, Sequence(3)}, p), DimensionError);
}

TEST_CASE("symbol-rate to continuous correlation matches the direct sum", "[signal]")
{
    const Pulse p = make_rrc_pulse(0.22, 10, 5);
    const LagKernel g = pulse_autocorr(p);
    Rng rng = make_rng(9, Stream::test);
    // Hermitian 2 x 2 correlation on lags -3..3
    LagCorrelation rd(2, -3, 3, 1.0);
    for (int n = 0; n <= 3; ++n)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
            {
                const cd v = n == 0 && a == b ? cd{2.0 + a, 0.0} : 0.3 * complex_normal(rng);
                if (n == 0 && b < a)
                    continue;
                rd.at(n)(a, b) = v;
                rd.at(-n)(b, a) = std::conj(v);
            }
    const LagCorrelation rc = discrete_to_continuous_corr(rd, g, p.oversampling);
    CHECK(rc.lag_spacing() == p.sample_period());
    for (int n = rc.first_lag(); n <= rc.last_lag(); ++n)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
            {
                cd direct{};
                for (int nu = -3; nu <= 3; ++nu)
                    direct += rd.at(nu)(a, b) * g.at(n - nu * p.oversampling);
                CHECK(std::abs(rc.at(n)(a, b) - direct / p.symbol_period) < 1e-12);
            }
    // the direct sum vanishes outside the returned support
    CHECK(rc.first_lag() <= -3 * 5 + g.first_lag);
    CHECK(rc.last_lag() >= 3 * 5 + g.last_lag());
    CHECK(rc.hermitian_defect() < 1e-13);
}
