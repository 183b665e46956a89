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

#ifndef OOBRAD_RNG_HPP
#define OOBRAD_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>

namespace oobrad
{
    using Rng = std::mt19937_64;

    // Named random streams. A generator is fully determined by (seed, stream, index), so
    // realizations can be produced in any order or in parallel with identical results.
    enum class Stream : std::uint64_t
    {
        user_channel = 1,
        victim_channel = 2,
        symbols = 3,
        user_angles = 4,
        user_phases = 5,
        test = 99
    };

    inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0)
    {
        const auto s = static_cast<std::uint64_t>(stream);
        std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32),
                          std::uint32_t(s), std::uint32_t(s >> 32),
                          std::uint32_t(index), std::uint32_t(index >> 32)};
        return Rng(seq);
    }

    // Circularly symmetric complex Gaussian CN(0, variance)
    inline std::complex<double> complex_normal(Rng &rng, double variance = 1.0)
    {
        std::normal_distribution<double> n(0.0, std::sqrt(0.5 * variance));
        const double re = n(rng);
        const double im = n(rng);
        return {re, im};
    }

    inline double uniform(Rng &rng, double lo, double hi)
    {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }
}

#endif
