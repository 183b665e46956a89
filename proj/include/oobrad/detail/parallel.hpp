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

#ifndef OOBRAD_DETAIL_PARALLEL_HPP
#define OOBRAD_DETAIL_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace oobrad
{
    namespace detail
    {
        inline std::atomic<unsigned> &thread_setting()
        {
            static std::atomic<unsigned> n{0}; // 0 = hardware concurrency
            return n;
        }
    }

    // Number of worker threads used by the parallel sweeps. 0 selects the hardware concurrency.
    inline void set_thread_count(unsigned n) { detail::thread_setting() = n; }

    inline unsigned thread_count()
    {
        unsigned n = detail::thread_setting();
        if (n == 0)
            n = std::max(1u, std::thread::hardware_concurrency());
        return n;
    }

    namespace detail
    {
        // Static block partition of [0, n). Each index is visited exactly once and results must be
        // written to per-index slots, so the outcome does not depend on the thread count.
        template <typename Fn>
        void parallel_for(std::size_t n, Fn &&fn)
        {
            const std::size_t workers = std::min<std::size_t>(thread_count(), n);
            if (workers <= 1)
            {
                for (std::size_t i = 0; i < n; ++i)
                    fn(i);
                return;
            }

            std::exception_ptr error;
            std::mutex error_lock;
            std::vector<std::jthread> pool;
            pool.reserve(workers);
            for (std::size_t w = 0; w < workers; ++w)
            {
                const std::size_t begin = n * w / workers, end = n * (w + 1) / workers;
                pool.emplace_back([&, begin, end]
                                  {
                    try
                    {
                        for (std::size_t i = begin; i < end; ++i)
                            fn(i);
                    }
                    catch (...)
                    {
                        std::lock_guard guard(error_lock);
                        if (!error)
                            error = std::current_exception();
                    } });
            }
            pool.clear();
            if (error)
                std::rethrow_exception(error);
        }
    }
}

#endif
