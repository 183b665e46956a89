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

#ifndef OOBRAD_PRECODE_HPP
#define OOBRAD_PRECODE_HPP

#include "channel.hpp"
#include "detail/fft.hpp"
#include "detail/parallel.hpp"
#include "error.hpp"
#include "signal.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <vector>

namespace oobrad
{
    // Linear precoder x[n] = sum_l W[l] D_xi^{1/2} s[n - l]; taps[i] is the M x K matrix W[first_tap + i]
    struct Precoder
    {
        std::vector<Eigen::MatrixXcd> taps;
        int first_tap = 0;
        double alpha = 1.0;
        std::vector<double> allocation; // xi, sums to one
        double symbol_period = 1.0;

        int last_tap() const { return first_tap + int(taps.size()) - 1; }
        int antennas() const { return taps.empty() ? 0 : int(taps.front().rows()); }
        int users() const { return taps.empty() ? 0 : int(taps.front().cols()); }
        double energy() const
        {
            double e = 0.0;
            for (const auto &w : taps)
                e += w.squaredNorm();
            return e;
        }
    };

    // Positive allocation rescaled to unit sum; empty input gives equal allocation 1/K
    inline std::vector<double> normalize_allocation(std::vector<double> xi, int users)
    {
        if (xi.empty())
            xi.assign(std::size_t(users), 1.0 / users);
        if (int(xi.size()) != users)
            throw DimensionError("power allocation needs one entry per user");
        double total = 0.0;
        for (double v : xi)
        {
            if (!(v > 0.0) || !std::isfinite(v))
                throw ParameterError("power allocations must be positive and finite");
            total += v;
        }
        for (double &v : xi)
            v /= total;
        return xi;
    }

    // Maximum-ratio precoder W[l] = alpha H^H[-l], alpha chosen so that sum_l ||W[l]||_F^2 = K
    inline Precoder mr_precoder(const DiscreteChannel &h, std::vector<double> allocation = {})
    {
        const double energy = h.energy();
        if (!(energy > 0.0))
            throw NumericalError("mr_precoder: all-zero channel cannot be normalized");
        const int users = h.receivers();

        Precoder w;
        w.allocation = normalize_allocation(std::move(allocation), users);
        w.alpha = std::sqrt(double(users) / energy);
        w.first_tap = -h.last_tap();
        w.symbol_period = h.symbol_period;
        w.taps.reserve(h.taps.size());
        for (auto it = h.taps.rbegin(); it != h.taps.rend(); ++it)
            w.taps.push_back(w.alpha * it->adjoint());
        return w;
    }

    // R_xx[nu] = sum_l W^*[l] D_xi W^T[nu + l], lags -(n_taps-1) .. n_taps-1, spacing T.
    // Evaluated per entry through FFTs of the precoder taps. With diagonal_only the off-diagonal
    // entries are left at zero.
    inline LagCorrelation tx_corr_symbol_rate(const Precoder &w, bool diagonal_only = false)
    {
        const int n_taps = int(w.taps.size());
        const int m_count = w.antennas(), k_count = w.users();
        if (n_taps == 0)
            throw DimensionError("tx_corr_symbol_rate: precoder has no taps");
        if (int(w.allocation.size()) != k_count)
            throw DimensionError("tx_corr_symbol_rate: allocation size does not match the user count");

        const std::size_t nfft = detail::next_pow2(std::size_t(2 * n_taps - 1));
        // spectra[m][k] = DFT of tap sequence W_mk
        std::vector<std::vector<Sequence>> spectra(static_cast<std::size_t>(m_count), std::vector<Sequence>(std::size_t(k_count)));
        detail::parallel_for(std::size_t(m_count), [&](std::size_t m)
                             {
            for (int k = 0; k < k_count; ++k)
            {
                Sequence s(nfft, cd{});
                for (int i = 0; i < n_taps; ++i)
                    s[std::size_t(i)] = w.taps[std::size_t(i)](Eigen::Index(m), k);
                detail::fft_inplace(s);
                spectra[m][std::size_t(k)] = std::move(s);
            } });

        LagCorrelation r(m_count, -(n_taps - 1), n_taps - 1, w.symbol_period);
        const double scale = 1.0 / double(nfft);
        const std::size_t row_count = std::size_t(m_count);
        detail::parallel_for(row_count, [&](std::size_t m)
                             {
            Sequence acc(nfft);
            const int last = diagonal_only ? int(m) : m_count - 1;
            for (int mp = int(m); mp <= last; ++mp)
            {
                std::fill(acc.begin(), acc.end(), cd{});
                for (int k = 0; k < k_count; ++k)
                {
                    const auto &a = spectra[m][std::size_t(k)];
                    const auto &b = spectra[std::size_t(mp)][std::size_t(k)];
                    const double xi = w.allocation[std::size_t(k)];
                    for (std::size_t j = 0; j < nfft; ++j)
                        acc[j] += xi * std::conj(a[j]) * b[j];
                }
                detail::fft_inplace(acc, detail::FftDirection::backward);
                for (int nu = -(n_taps - 1); nu <= n_taps - 1; ++nu)
                {
                    const cd v = acc[std::size_t((nu + long(nfft)) % long(nfft))] * scale;
                    r.at(nu)(Eigen::Index(m), mp) = v;
                    if (mp != int(m))
                        r.at(-nu)(mp, Eigen::Index(m)) = std::conj(v);
                }
            } });
        return r;
    }

    // Streaming evaluation of x_m[n] = sum_k sum_l W_mk[l] sqrt(xi_k) s_k[n - l] by overlap-add.
    // Symbol block spectra are computed once and shared by all antennas.
    class PrecodedStream
    {
    public:
        PrecodedStream(const Precoder &w, const MultiSequence &symbols) : w_(w)
        {
            if (int(symbols.size()) != w.users())
                throw DimensionError("apply_precoder: need one symbol stream per user");
            n_ = symbols.empty() ? 0 : symbols.front().size();
            for (const auto &s : symbols)
                if (s.size() != n_)
                    throw DimensionError("apply_precoder: symbol streams differ in length");
            n_taps_ = w.taps.size();
            nfft_ = detail::next_pow2(std::max<std::size_t>(4096, 4 * n_taps_));
            block_ = nfft_ - n_taps_ + 1;
            const std::size_t blocks = (n_ + block_ - 1) / block_;
            spectra_.assign(symbols.size(), std::vector<Sequence>(blocks));
            for (std::size_t k = 0; k < symbols.size(); ++k)
                for (std::size_t b = 0; b < blocks; ++b)
                {
                    Sequence s(nfft_, cd{});
                    const std::size_t start = b * block_, len = std::min(block_, n_ - start);
                    std::copy_n(symbols[k].begin() + std::ptrdiff_t(start), len, s.begin());
                    detail::fft_inplace(s);
                    spectra_[k][b] = std::move(s);
                }
        }

        // Output sample i corresponds to symbol time first_index() + i
        int first_index() const { return w_.first_tap; }
        std::size_t length() const { return n_ == 0 ? 0 : n_ + n_taps_ - 1; }

        Sequence antenna(int m) const
        {
            const std::size_t users = spectra_.size();
            std::vector<Sequence> filters(users, Sequence(nfft_, cd{}));
            for (std::size_t k = 0; k < users; ++k)
            {
                const double gain = std::sqrt(w_.allocation[k]);
                for (std::size_t i = 0; i < n_taps_; ++i)
                    filters[k][i] = gain * w_.taps[i](m, Eigen::Index(k));
                detail::fft_inplace(filters[k]);
            }
            Sequence out(length(), cd{});
            Sequence work(nfft_);
            const double scale = 1.0 / double(nfft_);
            const std::size_t blocks = users ? spectra_.front().size() : 0;
            for (std::size_t b = 0; b < blocks; ++b)
            {
                std::fill(work.begin(), work.end(), cd{});
                for (std::size_t k = 0; k < users; ++k)
                    for (std::size_t j = 0; j < nfft_; ++j)
                        work[j] += filters[k][j] * spectra_[k][b][j];
                detail::fft_inplace(work, detail::FftDirection::backward);
                const std::size_t start = b * block_;
                const std::size_t produced = std::min(nfft_, out.size() - start);
                for (std::size_t i = 0; i < produced; ++i)
                    out[start + i] += work[i] * scale;
            }
            return out;
        }

    private:
        const Precoder &w_;
        std::size_t n_ = 0, n_taps_ = 0, nfft_ = 0, block_ = 0;
        std::vector<std::vector<Sequence>> spectra_; // [user][block]
    };

    // Full convolution of K symbol streams (length N) with the precoder: M streams of length
    // N + n_taps - 1, sample i at symbol time first_tap + i
    inline MultiSequence apply_precoder(const Precoder &w, const MultiSequence &symbols)
    {
        const PrecodedStream stream(w, symbols);
        MultiSequence out(std::size_t(w.antennas()));
        detail::parallel_for(out.size(), [&](std::size_t m)
                             { out[m] = stream.antenna(int(m)); });
        return out;
    }
}

#endif
