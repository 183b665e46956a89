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

#ifndef OOBRAD_SPECTRAL_HPP
#define OOBRAD_SPECTRAL_HPP

#include "detail/fft.hpp"
#include "detail/parallel.hpp"
#include "error.hpp"
#include "pa.hpp"
#include "signal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oobrad
{
    // f_j = (j - nfft/2) / (nfft * sample_period), j = 0 .. nfft-1
    inline std::vector<double> frequency_grid(std::size_t nfft, double sample_period)
    {
        std::vector<double> f(nfft);
        for (std::size_t j = 0; j < nfft; ++j)
            f[j] = (double(j) - double(nfft / 2)) / (double(nfft) * sample_period);
        return f;
    }

    // One Hermitian M x M cross-spectral matrix per frequency bin, S_ab(f) = int R_ab(tau) e^{-j2pi f tau} dtau
    struct SpectralMatrix
    {
        std::vector<double> freqs;
        std::vector<Eigen::MatrixXcd> bins;
        double bin_width = 0.0;

        std::size_t size() const { return bins.size(); }
        int dim() const { return bins.empty() ? 0 : int(bins.front().rows()); }

        std::size_t nearest_bin(double f) const
        {
            if (freqs.empty())
                throw DimensionError("SpectralMatrix: empty frequency grid");
            const double pos = (f - freqs.front()) / bin_width;
            const long j = std::lround(pos);
            return std::size_t(std::clamp(j, 0L, long(freqs.size()) - 1));
        }
    };

    // Per-antenna (diagonal) spectra only, S_{y_m y_m}(f)
    struct DiagonalSpectrum
    {
        std::vector<double> freqs;
        std::vector<std::vector<double>> antennas;
        double bin_width = 0.0;
    };

    namespace detail
    {
        inline SpectralMatrix empty_spectrum(int dim, std::size_t nfft, double sample_period)
        {
            SpectralMatrix s;
            s.freqs = frequency_grid(nfft, sample_period);
            s.bin_width = 1.0 / (double(nfft) * sample_period);
            s.bins.assign(nfft, Eigen::MatrixXcd::Zero(dim, dim));
            return s;
        }

        // In place: circular lag sequence (index n mod nfft) -> spectrum on the centered grid
        inline void lags_to_spectrum(std::span<cd> work, double sample_period)
        {
            for (std::size_t n = 1; n < work.size(); n += 2)
                work[n] = -work[n];
            fft_inplace(work);
            for (auto &v : work)
                v *= sample_period;
        }

        // Evaluates the pipeline R_xx[nu] -> R_xx(tau) -> R_yy(tau) -> S_yy(f) one matrix entry at a time.
        // visit(m, mp, spectrum) is called for every m <= mp (or only m == mp).
        inline void amplified_entries(const LagCorrelation &rxx_sym, const LagKernel &g, int oversampling, const PAModel &pa,
                                      const OperatingPoint &op, std::size_t nfft, bool diagonal_only,
                                      const std::function<void(int, int, std::span<const cd>)> &visit)
        {
            require_cubic(pa, "amplified_psd");
            const int dim = rxx_sym.dim();
            if (!pa.shared() && int(pa.branches.size()) != dim)
                throw DimensionError("amplified_psd: amplifier count does not match antenna count");
            const double symbol_period = g.lag_spacing * oversampling;
            if (std::abs(rxx_sym.lag_spacing() - symbol_period) > 1e-12 * symbol_period)
                throw DimensionError("amplified_psd: correlation spacing does not match the pulse grid");
            if (nfft % 2 != 0)
                throw ParameterError("amplified_psd: nfft must be even");
            const ContinuousLagMap lag_map(g, oversampling, symbol_period, nfft);
            const std::size_t support = std::size_t(lag_map.last_output_lag(rxx_sym.last_lag()) - lag_map.first_output_lag(rxx_sym.first_lag()) + 1);
            if (support > nfft)
                throw ParameterError("amplified_psd: nfft smaller than the lag support of R_yy");

            std::vector<double> var(static_cast<std::size_t>(dim));
            for (int m = 0; m < dim; ++m)
            {
                const double s = op.scale(m);
                var[std::size_t(m)] = s * s * lag_map.at_zero(rxx_sym.entry(m, m), rxx_sym.first_lag(), symbol_period).real();
            }

            parallel_for(std::size_t(dim), [&](std::size_t row)
                         {
                const int m = int(row);
                Sequence work(nfft);
                const int last = diagonal_only ? m : dim - 1;
                for (int mp = m; mp <= last; ++mp)
                {
                    const Sequence r = rxx_sym.entry(m, mp);
                    lag_map.map(r, rxx_sym.first_lag(), work);
                    const double s = op.scale(m) * op.scale(mp);
                    const cd b1m = pa.coeff(m, 1), b2m = pa.coeff(m, 2), b1mp = pa.coeff(mp, 1), b2mp = pa.coeff(mp, 2);
                    for (auto &v : work)
                        v = amplified_corr(s * v, var[std::size_t(m)], var[std::size_t(mp)], b1m, b2m, b1mp, b2mp);
                    lags_to_spectrum(work, g.lag_spacing);
                    visit(m, mp, work);
                } });
        }
    }

    // S(f_j) = (T/kappa) sum_n R(n T/kappa) e^{-j2pi f_j n T/kappa}: the Fourier integral on the lag grid.
    // No taper; the lag support is finite. Each bin is made exactly Hermitian.
    inline SpectralMatrix corr_to_psd(const LagCorrelation &r, std::size_t nfft = 4096)
    {
        if (nfft < r.lag_count())
            throw ParameterError("corr_to_psd: nfft smaller than the number of lags");
        if (nfft % 2 != 0)
            throw ParameterError("corr_to_psd: nfft must be even");
        const int dim = r.dim();
        SpectralMatrix s = detail::empty_spectrum(dim, nfft, r.lag_spacing());
        const long n = long(nfft);
        detail::parallel_for(std::size_t(dim), [&](std::size_t row)
                             {
            const int m = int(row);
            Sequence work(nfft);
            for (int mp = 0; mp < dim; ++mp)
            {
                std::fill(work.begin(), work.end(), cd{});
                for (int lag = r.first_lag(); lag <= r.last_lag(); ++lag)
                    work[std::size_t(((lag % n) + n) % n)] += r.at(lag)(m, mp);
                detail::lags_to_spectrum(work, r.lag_spacing());
                for (std::size_t j = 0; j < nfft; ++j)
                    s.bins[j](m, mp) = work[j];
            } });
        for (auto &b : s.bins)
            b = (0.5 * (b + b.adjoint())).eval();
        return s;
    }

    // Analytical S_yy(f) straight from the symbol-rate transmit correlation: the composition
    // corr_to_psd(propagate_corr(discrete_to_continuous_corr(rxx_sym, g), pa, op)) evaluated entry by
    // entry without materializing the oversampled lag matrices
    inline SpectralMatrix amplified_psd(const LagCorrelation &rxx_sym, const LagKernel &g, int oversampling, const PAModel &pa,
                                        const OperatingPoint &op, std::size_t nfft = 4096)
    {
        SpectralMatrix s = detail::empty_spectrum(rxx_sym.dim(), nfft, g.lag_spacing);
        detail::amplified_entries(rxx_sym, g, oversampling, pa, op, nfft, false,
                                  [&](int m, int mp, std::span<const cd> spec)
                                  {
                                      for (std::size_t j = 0; j < spec.size(); ++j)
                                      {
                                          if (m == mp)
                                              s.bins[j](m, m) = spec[j].real();
                                          else
                                          {
                                              s.bins[j](m, mp) = spec[j];
                                              s.bins[j](mp, m) = std::conj(spec[j]);
                                          }
                                      }
                                  });
        return s;
    }

    // Per-antenna output spectra S_{y_m y_m}(f); only the diagonal of R_xx is used
    inline DiagonalSpectrum amplified_psd_diagonal(const LagCorrelation &rxx_sym, const LagKernel &g, int oversampling,
                                                   const PAModel &pa, const OperatingPoint &op, std::size_t nfft = 4096)
    {
        DiagonalSpectrum d;
        d.freqs = frequency_grid(nfft, g.lag_spacing);
        d.bin_width = 1.0 / (double(nfft) * g.lag_spacing);
        d.antennas.assign(std::size_t(rxx_sym.dim()), std::vector<double>(nfft));
        detail::amplified_entries(rxx_sym, g, oversampling, pa, op, nfft, true,
                                  [&](int m, int, std::span<const cd> spec)
                                  {
                                      for (std::size_t j = 0; j < spec.size(); ++j)
                                          d.antennas[std::size_t(m)][j] = spec[j].real();
                                  });
        return d;
    }

    // S_tx(f) = trace S_yy(f)
    inline std::vector<double> s_tx(const SpectralMatrix &s)
    {
        std::vector<double> out(s.size());
        for (std::size_t j = 0; j < s.size(); ++j)
            out[j] = s.bins[j].trace().real();
        return out;
    }

    inline std::vector<double> s_tx(const DiagonalSpectrum &d)
    {
        std::vector<double> out(d.freqs.size(), 0.0);
        for (const auto &a : d.antennas)
            for (std::size_t j = 0; j < out.size(); ++j)
                out[j] += a[j];
        return out;
    }

    // S_theta(f) = beta h~^H(f) S_yy(f) h~(f) with one victim response per bin
    inline std::vector<double> received_psd(const SpectralMatrix &s, const std::vector<Eigen::VectorXcd> &h, double beta = 1.0)
    {
        if (h.size() != s.size())
            throw DimensionError("received_psd: victim response and spectrum grids differ");
        std::vector<double> out(s.size());
        for (std::size_t j = 0; j < s.size(); ++j)
        {
            if (h[j].size() != s.dim())
                throw DimensionError("received_psd: victim response has the wrong antenna count");
            out[j] = beta * h[j].dot(s.bins[j] * h[j]).real();
        }
        return out;
    }

    // Frequency-flat victim (line of sight)
    inline std::vector<double> received_psd(const SpectralMatrix &s, const Eigen::VectorXcd &h, double beta = 1.0)
    {
        if (h.size() != s.dim())
            throw DimensionError("received_psd: victim response has the wrong antenna count");
        std::vector<double> out(s.size());
        for (std::size_t j = 0; j < s.size(); ++j)
            out[j] = beta * h.dot(s.bins[j] * h).real();
        return out;
    }

    // Many victims at once: h[j] is M x V (one column per victim); returns out[v][j]
    inline std::vector<std::vector<double>> received_psd_batch(const SpectralMatrix &s, const std::vector<Eigen::MatrixXcd> &h, double beta = 1.0)
    {
        if (h.size() != s.size())
            throw DimensionError("received_psd_batch: victim responses and spectrum grids differ");
        const Eigen::Index victims = h.empty() ? 0 : h.front().cols();
        std::vector<std::vector<double>> out(std::size_t(victims), std::vector<double>(s.size()));
        detail::parallel_for(s.size(), [&](std::size_t j)
                             {
            const Eigen::MatrixXcd q = s.bins[j] * h[j];
            for (Eigen::Index v = 0; v < victims; ++v)
                out[std::size_t(v)][j] = beta * h[j].col(v).dot(q.col(v)).real(); });
        return out;
    }

    namespace detail
    {
        // Reference scale for the PSD check of one bin: its trace, but never less than 1e-4 of the
        // largest trace. Deep stopband bins carry FFT rounding of the peak bins (~1e-16 of the peak),
        // which can exceed 1e-8 of their own trace.
        inline double peak_trace(const SpectralMatrix &s)
        {
            double peak = 0.0;
            for (const auto &b : s.bins)
                peak = std::max(peak, b.trace().real());
            return peak;
        }

        inline double psd_scale(const Eigen::MatrixXcd &bin, double peak)
        {
            return std::max({0.0, bin.trace().real(), 1e-4 * peak});
        }

        // Eigenvalues ascending; values in [-1e-8 scale, 0) are clamped to zero, lower ones are an error
        inline Eigen::VectorXd checked_eigenvalues(const Eigen::MatrixXcd &bin, double peak)
        {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(bin, Eigen::EigenvaluesOnly);
            if (solver.info() != Eigen::Success)
                throw NumericalError("Hermitian eigensolver did not converge");
            Eigen::VectorXd ev = solver.eigenvalues();
            const double scale = psd_scale(bin, peak);
            for (auto &v : ev)
            {
                if (v < -1e-8 * scale - 1e-300)
                    throw NumericalError("spectral matrix is not positive semidefinite");
                v = std::max(v, 0.0);
            }
            return ev;
        }
    }

    // S_max(f) = lambda_max(S_yy(f))
    inline std::vector<double> s_max(const SpectralMatrix &s)
    {
        const double peak = detail::peak_trace(s);
        std::vector<double> out(s.size());
        detail::parallel_for(s.size(), [&](std::size_t j)
                             { out[j] = detail::checked_eigenvalues(s.bins[j], peak).maxCoeff(); });
        return out;
    }

    // Largest eigenvalue and smallest eigenvalue relative to the bin scale (see psd_scale), from one
    // decomposition; throws like s_max on a matrix that is not positive semidefinite
    struct BinExtremes
    {
        std::vector<double> max;
        std::vector<double> min_over_trace;
    };

    inline BinExtremes eigen_extremes(const SpectralMatrix &s)
    {
        const double peak = detail::peak_trace(s);
        BinExtremes e{std::vector<double>(s.size()), std::vector<double>(s.size(), 0.0)};
        detail::parallel_for(s.size(), [&](std::size_t j)
                             {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(s.bins[j], Eigen::EigenvaluesOnly);
            if (solver.info() != Eigen::Success)
                throw NumericalError("Hermitian eigensolver did not converge");
            const auto &ev = solver.eigenvalues();
            const double scale = detail::psd_scale(s.bins[j], peak);
            if (ev.minCoeff() < -1e-8 * scale - 1e-300)
                throw NumericalError("spectral matrix is not positive semidefinite");
            e.max[j] = std::max(0.0, ev.maxCoeff());
            if (scale > 0.0)
                e.min_over_trace[j] = ev.minCoeff() / scale; });
        return e;
    }

    // 10 log10(M S_max(f) / S_tx(f)); 0 dB for isotropic radiation, 10 log10 M for rank one
    inline std::vector<double> worst_case_ratio(const SpectralMatrix &s)
    {
        const auto tx = s_tx(s);
        const auto mx = s_max(s);
        std::vector<double> out(s.size());
        for (std::size_t j = 0; j < s.size(); ++j)
        {
            if (!(tx[j] > 0.0))
                throw NumericalError("worst_case_ratio: bin without radiated power");
            out[j] = 10.0 * std::log10(double(s.dim()) * mx[j] / tx[j]);
        }
        return out;
    }

    // All eigenvalues of S_yy at the bin nearest to f0, descending
    inline std::vector<double> eigen_spectrum(const SpectralMatrix &s, double f0)
    {
        const Eigen::VectorXd ev = detail::checked_eigenvalues(s.bins[s.nearest_bin(f0)], detail::peak_trace(s));
        std::vector<double> out(std::size_t(ev.size()));
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            out[std::size_t(i)] = ev(ev.size() - 1 - i);
        return out;
    }

    // Largest |S - S^H| relative to the Frobenius norm, over all bins
    inline double hermitian_defect(const SpectralMatrix &s)
    {
        double worst = 0.0;
        for (const auto &b : s.bins)
        {
            const double norm = b.norm();
            if (norm > 0.0)
                worst = std::max(worst, (b - b.adjoint()).norm() / norm);
        }
        return worst;
    }

    // Smallest eigenvalue relative to the bin scale, over all bins (should be >= -1e-8)
    inline double psd_floor(const SpectralMatrix &s)
    {
        const double peak = detail::peak_trace(s);
        std::vector<double> worst(s.size(), 0.0);
        detail::parallel_for(s.size(), [&](std::size_t j)
                             {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(s.bins[j], Eigen::EigenvaluesOnly);
            const double scale = detail::psd_scale(s.bins[j], peak);
            if (scale > 0.0)
                worst[j] = solver.eigenvalues().minCoeff() / scale; });
        return worst.empty() ? 0.0 : *std::min_element(worst.begin(), worst.end());
    }
}

#endif
