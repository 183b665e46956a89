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

#ifndef OOBRAD_METRICS_HPP
#define OOBRAD_METRICS_HPP

#include "channel.hpp"
#include "error.hpp"
#include "spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace oobrad
{
    // Reports never go below this level
    inline constexpr double db_floor = -120.0;

    inline double to_db(double x) { return std::max(db_floor, 10.0 * std::log10(std::max(x, 0.0))); }

    // Powers in the allocated band [-B/2, B/2] and the two adjacent bands of equal width
    struct BandPowers
    {
        double in_band = 0.0;
        double left = 0.0;     // [-3B/2, -B/2]
        double right = 0.0;    // [B/2, 3B/2]
        double adjacent = 0.0; // max(left, right)
        double bandwidth = 0.0;
    };

    namespace detail
    {
        // Bins of a band [lo, hi) on a grid with a bin centered at f = 0. Band edges are snapped to the
        // nearest bin boundary so the three bands tile the axis without overlap and mirror exactly.
        struct BinRange
        {
            std::size_t begin = 0, end = 0;
        };

        inline BinRange band_bins(const std::vector<double> &freqs, double bin_width, double lo, double hi)
        {
            const long zero = std::lround(-freqs.front() / bin_width);
            const long first = std::lround(lo / bin_width - 0.5) + 1;
            const long last = std::lround(hi / bin_width - 0.5);
            if (first + zero < 0 || last + zero >= long(freqs.size()))
                throw DimensionError("band_powers: frequency grid does not cover the adjacent bands");
            return {std::size_t(first + zero), std::size_t(last + zero + 1)};
        }

        inline double bin_width_of(const std::vector<double> &freqs)
        {
            if (freqs.size() < 2)
                throw DimensionError("band_powers: frequency grid too short");
            return freqs[1] - freqs[0];
        }

        inline double integrate(const std::vector<double> &psd, BinRange r, double bin_width)
        {
            double acc = 0.0;
            for (std::size_t j = r.begin; j < r.end; ++j)
                acc += psd[j];
            return acc * bin_width;
        }

        struct Bands
        {
            BinRange left, in_band, right;
        };

        inline Bands bands(const std::vector<double> &freqs, double bandwidth)
        {
            const double df = bin_width_of(freqs);
            return {band_bins(freqs, df, -1.5 * bandwidth, -0.5 * bandwidth),
                    band_bins(freqs, df, -0.5 * bandwidth, 0.5 * bandwidth),
                    band_bins(freqs, df, 0.5 * bandwidth, 1.5 * bandwidth)};
        }
    }

    // Midpoint-rule band integrals of a real PSD
    inline BandPowers band_powers(const std::vector<double> &psd, const std::vector<double> &freqs, double bandwidth)
    {
        if (psd.size() != freqs.size())
            throw DimensionError("band_powers: PSD and frequency grid differ in length");
        if (!(bandwidth > 0.0))
            throw ParameterError("band_powers: bandwidth must be positive");
        const double df = detail::bin_width_of(freqs);
        const auto b = detail::bands(freqs, bandwidth);
        BandPowers p;
        p.bandwidth = bandwidth;
        p.left = detail::integrate(psd, b.left, df);
        p.in_band = detail::integrate(psd, b.in_band, df);
        p.right = detail::integrate(psd, b.right, df);
        p.adjacent = std::max(p.left, p.right);
        return p;
    }

    // Adjacent-channel leakage ratio in dB, max(left, right) / in-band
    inline double aclr_db(const BandPowers &p)
    {
        if (!(p.in_band > 0.0))
            throw NumericalError("aclr: no in-band power");
        return to_db(p.adjacent / p.in_band);
    }

    inline double aclr_db(const std::vector<double> &psd, const std::vector<double> &freqs, double bandwidth)
    {
        return aclr_db(band_powers(psd, freqs, bandwidth));
    }

    // P_ob,max = max over the adjacent bands of int S_max(f) df
    inline double p_ob_max(const std::vector<double> &smax, const std::vector<double> &freqs, double bandwidth)
    {
        return band_powers(smax, freqs, bandwidth).adjacent;
    }

    inline double p_ob_max(const SpectralMatrix &s, double bandwidth) { return p_ob_max(s_max(s), s.freqs, bandwidth); }

    // Band integrals of the cross-spectral matrix, int_band S_yy(f) df
    struct BandMatrices
    {
        Eigen::MatrixXcd left, in_band, right;
    };

    inline BandMatrices integrate_bands(const SpectralMatrix &s, double bandwidth)
    {
        const auto b = detail::bands(s.freqs, bandwidth);
        auto sum = [&](detail::BinRange r)
        {
            Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(s.dim(), s.dim());
            for (std::size_t j = r.begin; j < r.end; ++j)
                acc += s.bins[j];
            return Eigen::MatrixXcd(acc * s.bin_width);
        };
        return {sum(b.left), sum(b.in_band), sum(b.right)};
    }

    // Band powers received by frequency-flat line-of-sight probes in the given directions. Because the
    // probe response does not depend on f, int a^H S(f) a df = a^H (int S df) a.
    inline std::vector<BandPowers> pattern_band_powers(const SpectralMatrix &s, double bandwidth, const std::vector<double> &angles,
                                                       double spacing_over_wavelength = 0.5, double beta = 1.0)
    {
        const BandMatrices bm = integrate_bands(s, bandwidth);
        std::vector<BandPowers> out(angles.size());
        for (std::size_t i = 0; i < angles.size(); ++i)
        {
            const Eigen::VectorXcd a = steering_vector(s.dim(), spacing_over_wavelength, angles[i]);
            BandPowers &p = out[i];
            p.bandwidth = bandwidth;
            p.left = beta * a.dot(bm.left * a).real();
            p.in_band = beta * a.dot(bm.in_band * a).real();
            p.right = beta * a.dot(bm.right * a).real();
            p.adjacent = std::max(p.left, p.right);
        }
        return out;
    }

    // Empirical CCDF of the eigenvalues of S_yy(f) in dB relative to their mean S_tx(f)/M
    struct CcdfTable
    {
        double freq = 0.0;            // bin frequency actually used
        double mean_eigenvalue = 0.0; // S_tx(f) / M
        std::vector<double> level_db; // eigenvalues, descending, dB re mean
        std::vector<double> fraction; // fraction of eigenvalues >= level_db[i], i.e. (i+1)/M

        double fraction_at_or_above(double level) const
        {
            std::size_t count = 0;
            for (double l : level_db)
                if (l >= level)
                    ++count;
            return level_db.empty() ? 0.0 : double(count) / double(level_db.size());
        }
    };

    inline std::vector<CcdfTable> eigen_ccdf(const SpectralMatrix &s, const std::vector<double> &freqs)
    {
        std::vector<CcdfTable> out;
        for (double f : freqs)
        {
            const std::size_t j = s.nearest_bin(f);
            const auto ev = eigen_spectrum(s, s.freqs[j]);
            CcdfTable t;
            t.freq = s.freqs[j];
            t.mean_eigenvalue = s.bins[j].trace().real() / s.dim();
            if (!(t.mean_eigenvalue > 0.0))
                throw NumericalError("eigen_ccdf: bin without radiated power");
            for (std::size_t i = 0; i < ev.size(); ++i)
            {
                t.level_db.push_back(to_db(ev[i] / t.mean_eigenvalue));
                t.fraction.push_back(double(i + 1) / double(ev.size()));
            }
            out.push_back(std::move(t));
        }
        return out;
    }
}

#endif
