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

#include "oobrad/mc.hpp"
#include "oobrad/pa.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace oobrad;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    // bisection on the instantaneous gain |b1 + b2 p| / |b1| = 10^(-1/20)
    double bisect_1db(cd b1, cd b2)
    {
        const double target = std::pow(10.0, -0.05);
        double lo = 0.0, hi = 1.0;
        while (std::abs(b1 + b2 * hi) / std::abs(b1) > target)
            hi *= 2.0;
        for (int i = 0; i < 200; ++i)
        {
            const double mid = 0.5 * (lo + hi);
            (std::abs(b1 + b2 * mid) / std::abs(b1) > target ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
}

TEST_CASE("compression point agrees with bisection", "[pa]")
{
    const cd b1{1.0, 0.0}, b2{-0.03491, 0.005650};
    const double p = compression_point_1db(b1, b2);
    CHECK_THAT(p, WithinRel(bisect_1db(b1, b2), 1e-12));
    CHECK_THAT(p, WithinAbs(3.12, 0.01));
    CHECK_THAT(compression_point_1db(1.0, -0.1), WithinRel((1.0 - std::pow(10.0, -0.05)) / 0.1, 1e-12));
    CHECK_THAT(compression_point_1db(1.0, -0.1), WithinAbs(1.087, 1e-3));
    CHECK_THAT(compression_point_1db(cd{0.5, 0.5}, cd{-0.02, -0.01}), WithinRel(bisect_1db(cd{0.5, 0.5}, cd{-0.02, -0.01}), 1e-12));
    CHECK_THROWS_AS(compression_point_1db(1.0, 0.0), NumericalError);
    CHECK_THROWS_AS(compression_point_1db(1.0, 0.05), NumericalError);
}

TEST_CASE("calibration places the antenna-average input at the compression point", "[pa]")
{
    const PAModel pa = reference_pa();
    const std::vector<double> powers{0.5, 1.0, 2.5};
    const OperatingPoint op = calibrate_1db(pa, powers);
    double mean = 0.0;
    for (int m = 0; m < 3; ++m)
        mean += powers[std::size_t(m)] * op.scale(m) * op.scale(m) / 3.0;
    CHECK_THAT(mean, WithinRel(op.p1db, 1e-14));

    const OperatingPoint each = calibrate_1db(pa, powers, true);
    for (int m = 0; m < 3; ++m)
        CHECK_THAT(powers[std::size_t(m)] * each.scale(m) * each.scale(m), WithinRel(each.p1db, 1e-14));

    CHECK_THROWS_AS(calibrate_1db(memoryless_pa({1.0}), powers), ParameterError);
    CHECK_THROWS_AS(calibrate_1db(pa, {}), DimensionError);
    CHECK_THROWS_AS(memoryless_pa({0.0, 1.0}), ParameterError);
}

TEST_CASE("memoryless amplification is the cubic polynomial", "[pa]")
{
    const PAModel pa = reference_pa();
    SampledSignal x{{{cd{1.0, 2.0}, cd{-0.5, 0.0}, cd{}}}, 5.0};
    const SampledSignal y = amplify(x, pa);
    for (std::size_t i = 0; i < 3; ++i)
    {
        const cd v = x.antennas[0][i];
        CHECK(std::abs(y.antennas[0][i] - (pa.coeff(0, 1) * v + pa.coeff(0, 2) * v * std::norm(v))) < 1e-15);
    }
}

TEST_CASE("amplifier branches with memory filter each branch causally", "[pa]")
{
    PAModel pa;
    pa.branches = {{Sequence{1.0, cd{0.0, 0.2}}, Sequence{-0.02, 0.0, cd{0.01, 0.0}}}};
    Rng rng = make_rng(3, Stream::test);
    SampledSignal x{{Sequence(50)}, 5.0};
    for (auto &v : x.antennas[0])
        v = complex_normal(rng);
    const SampledSignal y = amplify(x, pa);
    const Sequence &in = x.antennas[0];
    for (std::size_t n = 0; n < in.size(); ++n)
    {
        cd want{};
        for (std::size_t p = 0; p < 2; ++p)
            for (std::size_t t = 0; t < pa.branches[0][p].size(); ++t)
                if (n >= t)
                {
                    const cd v = in[n - t];
                    want += pa.branches[0][p][t] * (p == 0 ? v : v * std::norm(v));
                }
        CHECK(std::abs(y.antennas[0][n] - want) < 1e-13);
    }
    CHECK_FALSE(pa.memoryless());
}

TEST_CASE("gaussian moments match sampling", "[pa]")
{
    const cd r{0.4, -0.3};
    const double va = 1.5, vb = 0.6;
    for (int p = 1; p <= 2; ++p)
        for (int pp = 1; pp <= 2; ++pp)
        {
            const cd want = gaussian_moment(r, va, vb, p, pp);
            const cd got = moment_oracle(r, va, vb, p, pp, 400000, 10 + std::uint64_t(2 * p + pp));
            CHECK(std::abs(got - want) / std::abs(want) < 0.02);
        }
    // E|x|^6 = 6 sigma^6
    CHECK(std::abs(gaussian_moment(2.0, 2.0, 2.0, 2, 2) - 48.0) < 1e-12);
    CHECK_THROWS_AS(gaussian_moment(2.0, 1.0, 1.0, 1, 1), ParameterError);
    CHECK_THROWS_AS(gaussian_moment(0.1, 1.0, 1.0, 3, 1), ParameterError);
}

TEST_CASE("amplified correlation for unequal input powers", "[pa]")
{
    // direct sampling of E[y_a^* y_b] with y = b1 x + b2 x |x|^2, different coefficients per antenna
    const cd r{0.5, 0.2};
    const double va = 1.8, vb = 0.7;
    const cd b1a{1.0, 0.1}, b2a{-0.04, 0.01}, b1b{0.9, 0.0}, b2b{-0.03, -0.006};
    Rng rng = make_rng(77, Stream::test);
    const cd c = r / va;
    const double resid = vb - std::norm(r) / va;
    cd acc{};
    const int n = 1000000;
    for (int i = 0; i < n; ++i)
    {
        const cd a = complex_normal(rng, va);
        const cd b = c * a + complex_normal(rng, resid);
        acc += std::conj(b1a * a + b2a * a * std::norm(a)) * (b1b * b + b2b * b * std::norm(b));
    }
    acc /= double(n);
    const cd model = detail::amplified_corr(r, va, vb, b1a, b2a, b1b, b2b);
    CHECK(std::abs(acc - model) / std::abs(model) < 0.01);

    // same-antenna power: |b1|^2 s + 4 Re(b1^* b2) s^2 + 6 |b2|^2 s^3
    const double s = 1.3;
    const cd p0 = detail::amplified_corr(s, s, s, b1a, b2a, b1a, b2a);
    CHECK(std::abs(p0 - (std::norm(b1a) * s + 4.0 * std::real(std::conj(b1a) * b2a) * s * s + 6.0 * std::norm(b2a) * s * s * s)) < 1e-14);
}

TEST_CASE("propagation of a linear amplifier only scales the correlation", "[pa]")
{
    LagCorrelation rxx(2, -2, 2, 0.2);
    rxx.at(0) << 1.0, cd(0.2, 0.1), cd(0.2, -0.1), 0.5;
    rxx.at(1) << cd(0.3, 0.1), 0.0, cd(0.1, 0.0), cd(0.05, 0.02);
    rxx.at(-1) = rxx.at(1).adjoint();
    OperatingPoint op;
    op.input_scale = {2.0};
    const LagCorrelation ryy = propagate_corr(rxx, memoryless_pa({cd{0.0, 1.5}}), op);
    for (int n = -2; n <= 2; ++n)
        CHECK((ryy.at(n) - 2.25 * 4.0 * rxx.at(n)).norm() < 1e-14);

    PAModel mem;
    mem.branches = {{Sequence{1.0, 0.1}}};
    CHECK_THROWS_AS(propagate_corr(rxx, mem, op), ParameterError);
}
