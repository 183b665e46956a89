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
#include "oobrad/precode.hpp"
#include "oobrad/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace oobrad;
using Catch::Matchers::WithinAbs;

namespace
{
    DiscreteChannel random_discrete(int k, int m, int taps, int first, std::uint64_t seed)
    {
        Rng rng = make_rng(seed, Stream::test);
        DiscreteChannel h;
        h.first_tap = first;
        for (int l = 0; l < taps; ++l)
        {
            Eigen::MatrixXcd t(k, m);
            for (Eigen::Index i = 0; i < t.size(); ++i)
                t(i) = complex_normal(rng);
            h.taps.push_back(t);
        }
        return h;
    }
}

TEST_CASE("maximum-ratio precoder is the normalized conjugate time reverse", "[precode]")
{
    const DiscreteChannel h = random_discrete(3, 5, 4, -1, 1);
    const Precoder w = mr_precoder(h, {1.0, 2.0, 1.0});
    CHECK_THAT(w.energy(), WithinAbs(3.0, 1e-12));
    CHECK(w.first_tap == -h.last_tap());
    CHECK(w.last_tap() == -h.first_tap);
    for (int l = w.first_tap; l <= w.last_tap(); ++l)
        CHECK((w.taps[std::size_t(l - w.first_tap)] - w.alpha * h.taps[std::size_t(-l - h.first_tap)].adjoint()).norm() < 1e-14);
    CHECK_THAT(w.allocation[1], WithinAbs(0.5, 1e-15));
}

TEST_CASE("allocations are validated", "[precode]")
{
    CHECK(normalize_allocation({}, 4) == std::vector<double>(4, 0.25));
    CHECK_THROWS_AS(normalize_allocation({1.0, 0.0}, 2), ParameterError);
    CHECK_THROWS_AS(normalize_allocation({1.0}, 2), DimensionError);
    DiscreteChannel zero;
    zero.taps = {Eigen::MatrixXcd::Zero(1, 2)};
    CHECK_THROWS_AS(mr_precoder(zero), NumericalError);
}

TEST_CASE("symbol-rate transmit correlation matches the direct sum", "[precode]")
{
    const DiscreteChannel h = random_discrete(2, 4, 5, 0, 2);
    const Precoder w = mr_precoder(h, {0.3, 0.7});
    const LagCorrelation r = tx_corr_symbol_rate(w);
    const int n = int(w.taps.size());
    Eigen::MatrixXd d = Eigen::VectorXd::Map(w.allocation.data(), 2).asDiagonal();
    for (int nu = -(n - 1); nu <= n - 1; ++nu)
    {
        Eigen::MatrixXcd direct = Eigen::MatrixXcd::Zero(4, 4);
        for (int l = 0; l < n; ++l)
            if (l + nu >= 0 && l + nu < n)
                direct += w.taps[std::size_t(l)].conjugate() * d * w.taps[std::size_t(l + nu)].transpose();
        CHECK((r.at(nu) - direct).norm() < 1e-13);
    }
    CHECK(r.hermitian_defect() < 1e-14);

    const LagCorrelation diag = tx_corr_symbol_rate(w, true);
    for (int nu = -(n - 1); nu <= n - 1; ++nu)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                CHECK(std::abs(diag.at(nu)(a, b) - (a == b ? r.at(nu)(a, b) : cd{})) < 1e-14);
}

TEST_CASE("streamed precoding equals direct convolution", "[precode]")
{
    const DiscreteChannel h = random_discrete(2, 3, 6, -2, 3);
    const Precoder w = mr_precoder(h, {0.6, 0.4});
    Rng rng = make_rng(4, Stream::test);
    // long enough for several overlap-add blocks
    MultiSequence s(2, Sequence(9000));
    for (auto &row : s)
        for (auto &v : row)
            v = complex_normal(rng);
    const MultiSequence x = apply_precoder(w, s);
    REQUIRE(x.size() == 3);
    REQUIRE(x[0].size() == s[0].size() + w.taps.size() - 1);
    for (int m = 0; m < 3; ++m)
        for (std::size_t i : {std::size_t(0), std::size_t(3), std::size_t(4090), std::size_t(4101), std::size_t(9004)})
        {
            cd direct{};
            for (int k = 0; k < 2; ++k)
                for (std::size_t l = 0; l < w.taps.size(); ++l)
                    if (i >= l && i - l < s[0].size())
                        direct += w.taps[l](m, k) * std::sqrt(w.allocation[std::size_t(k)]) * s[std::size_t(k)][i - l];
            CHECK(std::abs(x[std::size_t(m)][i] - direct) < 1e-11);
        }
    CHECK_THROWS_AS(apply_precoder(w, MultiSequence(1, Sequence(10))), DimensionError);
}
