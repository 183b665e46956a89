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
#include "oobrad/pa.hpp"
#include "oobrad/precode.hpp"
#include "oobrad/spectral.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

using namespace oobrad;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    // Small precoded system shared by several cases
    struct Small
    {
        Pulse pulse = make_rrc_pulse(0.22, 12, 5);
        LagKernel g = pulse_autocorr(pulse);
        Precoder w;
        LagCorrelation rxx;
        PAModel pa = reference_pa();
        OperatingPoint op;

        Small()
        {
            const ChannelModel ch = gen_rayleigh(4, 2, 10, 5, 8);
            w = mr_precoder(discretize(ch, g, 5), {0.7, 0.3});
            rxx = tx_corr_symbol_rate(w);
            op.input_scale = {1.2};
        }
    };
}

TEST_CASE("spectrum of a short correlation equals its Fourier sum", "[spectral]")
{
    const double dt = 0.2;
    LagCorrelation r(1, -2, 2, dt);
    r.at(0)(0, 0) = 2.0;
    r.at(1)(0, 0) = cd{0.3, 0.4};
    r.at(-1)(0, 0) = cd{0.3, -0.4};
    r.at(2)(0, 0) = 0.1;
    r.at(-2)(0, 0) = 0.1;
    const SpectralMatrix s = corr_to_psd(r, 64);
    REQUIRE(s.size() == 64);
    CHECK_THAT(s.bin_width, WithinRel(1.0 / (64 * dt), 1e-15));
    for (std::size_t j = 0; j < s.size(); ++j)
    {
        const double f = s.freqs[j];
        cd direct{};
        for (int n = -2; n <= 2; ++n)
            direct += r.at(n)(0, 0) * std::polar(1.0, -2.0 * std::numbers::pi * f * n * dt);
        CHECK(std::abs(s.bins[j](0, 0) - dt * direct) < 1e-13);
    }
    CHECK(s.freqs[32] == 0.0);
    CHECK_THROWS_AS(corr_to_psd(r, 3), ParameterError);
    CHECK_THROWS_AS(corr_to_psd(r, 7), ParameterError);
}

TEST_CASE("integrated spectrum returns the zero-lag power", "[spectral]")
{
    Small sys;
    const SpectralMatrix s = amplified_psd(sys.rxx, sys.g, 5, sys.pa, sys.op, 2048);
    const LagCorrelation ryy = propagate_corr(discrete_to_continuous_corr(sys.rxx, sys.g, 5), sys.pa, sys.op);
    Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(4, 4);
    for (const auto &b : s.bins)
        total += b * s.bin_width;
    CHECK((total - ryy.at(0)).norm() < 1e-10 * ryy.at(0).norm());
}

TEST_CASE("entrywise pipeline equals the composed lag-domain route", "[spectral]")
{
    Small sys;
    const std::size_t nfft = 2048;
    const SpectralMatrix fast = amplified_psd(sys.rxx, sys.g, 5, sys.pa, sys.op, nfft);
    const SpectralMatrix slow = corr_to_psd(propagate_corr(discrete_to_continuous_corr(sys.rxx, sys.g, 5), sys.pa, sys.op), nfft);
    double worst = 0.0, peak = 0.0;
    for (std::size_t j = 0; j < nfft; ++j)
    {
        worst = std::max(worst, (fast.bins[j] - slow.bins[j]).cwiseAbs().maxCoeff());
        peak = std::max(peak, fast.bins[j].cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-12 * peak);

    const DiagonalSpectrum d = amplified_psd_diagonal(sys.rxx, sys.g, 5, sys.pa, sys.op, nfft);
    for (std::size_t j = 0; j < nfft; j += 7)
        for (int m = 0; m < 4; ++m)
            CHECK_THAT(d.antennas[std::size_t(m)][j], WithinAbs(fast.bins[j](m, m).real(), 1e-14 * peak));
    const auto t1 = s_tx(fast), t2 = s_tx(d);
    for (std::size_t j = 0; j < nfft; j += 11)
        CHECK_THAT(t1[j], WithinAbs(t2[j], 1e-13 * peak));
}

TEST_CASE("spectral matrices are Hermitian and positive semidefinite", "[spectral]")
{
    Small sys;
    const SpectralMatrix s = amplified_psd(sys.rxx, sys.g, 5, sys.pa, sys.op, 1024);
    CHECK(hermitian_defect(s) < 1e-14);
    CHECK(psd_floor(s) > -1e-10);
}

TEST_CASE("rounding in deep stopband bins is judged against the peak", "[spectral]")
{
    SpectralMatrix s;
    s.bin_width = 1.0;
    s.freqs = {0.0, 1.0, 2.0};
    s.bins.assign(3, Eigen::MatrixXcd::Identity(2, 2));
    // trace 1e-10 of the peak, smallest eigenvalue -1e-17 of the peak
    s.bins[1] = Eigen::MatrixXcd::Zero(2, 2);
    s.bins[1](0, 0) = 2e-10 + 1e-17;
    s.bins[1](1, 1) = -1e-17;
    const auto mx = s_max(s);
    CHECK(mx[1] > 0.0);
    CHECK(psd_floor(s) > -1e-12);
    CHECK(eigen_spectrum(s, 1.0).back() == 0.0);

    // a real defect in a strong bin still throws
    s.bins[2](1, 1) = -1e-3;
    CHECK_THROWS_AS(s_max(s), NumericalError);
    CHECK(psd_floor(s) < -1e-8);
}

TEST_CASE("largest eigenvalue bounds every received spectrum", "[spectral]")
{
    Small sys;
    const SpectralMatrix s = amplified_psd(sys.rxx, sys.g, 5, sys.pa, sys.op, 1024);
    const auto smax = s_max(s);
    const BinExtremes e = eigen_extremes(s);
    const auto ratio = worst_case_ratio(s);
    const auto tx = s_tx(s);
    Rng rng = make_rng(12, Stream::test);
    for (std::size_t j = 0; j < s.size(); ++j)
    {
        CHECK_THAT(e.max[j], WithinAbs(smax[j], 1e-14 * std::abs(smax[j]) + 1e-300));
        // general (non-Hermitian) eigensolver as the oracle
        const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(s.bins[j]);
        double top = -1e300;
        for (Eigen::Index i = 0; i < 4; ++i)
            top = std::max(top, ces.eigenvalues()(i).real());
        CHECK_THAT(smax[j], WithinAbs(top, 1e-10 * s.bins[j].norm()));
        CHECK_THAT(ratio[j], WithinAbs(10.0 * std::log10(4.0 * smax[j] / tx[j]), 1e-10));
        for (int k = 0; k < 20; ++k)
        {
            Eigen::VectorXcd h(4);
            for (int m = 0; m < 4; ++m)
                h(m) = complex_normal(rng);
            CHECK(h.dot(s.bins[j] * h).real() <= h.squaredNorm() * smax[j] * (1.0 + 1e-12));
        }
    }
    const auto ev = eigen_spectrum(s, 0.0);
    REQUIRE(ev.size() == 4);
    CHECK(std::is_sorted(ev.rbegin(), ev.rend()));
    CHECK_THAT(ev.front(), WithinRel(smax[s.nearest_bin(0.0)], 1e-12));
}

TEST_CASE("received spectra are quadratic forms of the spectral matrix", "[spectral]")
{
    Small sys;
    const SpectralMatrix s = amplified_psd(sys.rxx, sys.g, 5, sys.pa, sys.op, 1024);
    Rng rng = make_rng(13, Stream::test);
    std::vector<Eigen::VectorXcd> h(s.size(), Eigen::VectorXcd(4));
    std::vector<Eigen::MatrixXcd> batch(s.size(), Eigen::MatrixXcd(4, 2));
    for (std::size_t j = 0; j < s.size(); ++j)
        for (int m = 0; m < 4; ++m)
        {
            h[j](m) = complex_normal(rng);
            batch[j](m, 0) = h[j](m);
            batch[j](m, 1) = cd{0.0, 1.0} * std::conj(h[j](m));
        }
    const auto one = received_psd(s, h, 0.5);
    const auto many = received_psd_batch(s, batch, 0.5);
    for (std::size_t j = 0; j < s.size(); ++j)
    {
        const double direct = 0.5 * (h[j].adjoint() * s.bins[j] * h[j])(0, 0).real();
        CHECK_THAT(one[j], WithinAbs(direct, 1e-12 * std::abs(direct) + 1e-300));
        CHECK_THAT(many[0][j], WithinAbs(direct, 1e-12 * std::abs(direct) + 1e-300));
    }
    const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(4);
    const auto flat = received_psd(s, ones);
    for (std::size_t j = 0; j < s.size(); ++j)
        CHECK_THAT(flat[j], WithinAbs(s.bins[j].sum().real(), 1e-12 * s.bins[j].norm()));
}
