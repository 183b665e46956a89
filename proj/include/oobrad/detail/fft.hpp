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

#ifndef OOBRAD_DETAIL_FFT_HPP
#define OOBRAD_DETAIL_FFT_HPP

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

namespace oobrad
{
    using cd = std::complex<double>;
    using Sequence = std::vector<cd>;

    namespace detail
    {
        enum class FftDirection : int
        {
            forward = FFTW_FORWARD,
            backward = FFTW_BACKWARD
        };

        // Process-wide cache of in-place FFTW plans. Planning is serialized, execution through
        // fftw_execute_dft on caller-owned buffers is thread-safe.
        class FftPlanCache
        {
        public:
            static FftPlanCache &instance()
            {
                static FftPlanCache cache;
                return cache;
            }

            fftw_plan get(std::size_t n, FftDirection dir)
            {
                std::lock_guard guard(lock_);
                const auto key = std::make_pair(n, static_cast<int>(dir));
                if (auto it = plans_.find(key); it != plans_.end())
                    return it->second;
                auto *buf = fftw_alloc_complex(n);
                fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, static_cast<int>(dir),
                                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
                fftw_free(buf);
                plans_.emplace(key, plan);
                return plan;
            }

            FftPlanCache(const FftPlanCache &) = delete;
            FftPlanCache &operator=(const FftPlanCache &) = delete;

        private:
            FftPlanCache() = default;
            ~FftPlanCache()
            {
                for (auto &[key, plan] : plans_)
                    fftw_destroy_plan(plan);
            }
            std::mutex lock_;
            std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
        };

        // Unnormalized in-place DFT: forward X[k] = sum x[n] e^{-j2pi kn/N}, backward uses e^{+j...}
        inline void fft_inplace(std::span<cd> data, FftDirection dir = FftDirection::forward)
        {
            if (data.empty())
                return;
            auto *ptr = reinterpret_cast<fftw_complex *>(data.data());
            fftw_execute_dft(FftPlanCache::instance().get(data.size(), dir), ptr, ptr);
        }

        inline std::size_t next_pow2(std::size_t n)
        {
            std::size_t p = 1;
            while (p < n)
                p <<= 1;
            return p;
        }

        // Overlap-add FIR filter with a precomputed kernel spectrum; reusable across inputs
        class FftFilter
        {
        public:
            explicit FftFilter(std::span<const cd> kernel, std::size_t min_block = 4096)
                : kernel_len_(kernel.size())
            {
                nfft_ = next_pow2(std::max(min_block, 4 * kernel_len_));
                spectrum_.assign(nfft_, cd{});
                std::copy(kernel.begin(), kernel.end(), spectrum_.begin());
                fft_inplace(spectrum_);
            }

            std::size_t block() const { return nfft_ - kernel_len_ + 1; }
            std::size_t nfft() const { return nfft_; }
            std::span<const cd> spectrum() const { return spectrum_; }

            // Full linear convolution, length input.size() + kernel.size() - 1
            Sequence apply(std::span<const cd> input) const
            {
                if (input.empty() || kernel_len_ == 0)
                    return {};
                Sequence out(input.size() + kernel_len_ - 1, cd{});
                Sequence work(nfft_);
                const double scale = 1.0 / double(nfft_);
                for (std::size_t start = 0; start < input.size(); start += block())
                {
                    const std::size_t len = std::min(block(), input.size() - start);
                    std::fill(work.begin(), work.end(), cd{});
                    std::copy_n(input.begin() + std::ptrdiff_t(start), len, work.begin());
                    fft_inplace(work);
                    for (std::size_t i = 0; i < nfft_; ++i)
                        work[i] *= spectrum_[i];
                    fft_inplace(work, FftDirection::backward);
                    const std::size_t produced = std::min(len + kernel_len_ - 1, out.size() - start);
                    for (std::size_t i = 0; i < produced; ++i)
                        out[start + i] += work[i] * scale;
                }
                return out;
            }

        private:
            std::size_t kernel_len_;
            std::size_t nfft_;
            Sequence spectrum_;
        };

        // Full linear convolution; direct sum for short products, overlap-add otherwise
        inline Sequence convolve(std::span<const cd> a, std::span<const cd> b)
        {
            if (a.empty() || b.empty())
                return {};
            if (a.size() < b.size())
                std::swap(a, b);
            if (b.size() <= 32 || a.size() * b.size() <= 65536)
            {
                Sequence out(a.size() + b.size() - 1, cd{});
                for (std::size_t i = 0; i < a.size(); ++i)
                    for (std::size_t j = 0; j < b.size(); ++j)
                        out[i + j] += a[i] * b[j];
                return out;
            }
            return FftFilter(b).apply(a);
        }
    }
}

#endif
