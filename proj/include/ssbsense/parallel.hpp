// SPDX-License-Identifier: Apache-2.0
//
// ssbsense: bistatic passive sensing with 5G NR SSB beam sweeps
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

#ifndef SSBSENSE_PARALLEL_HPP
#define SSBSENSE_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ssbsense
{
    /// Worker count: SSBSENSE_THREADS if set, else hardware concurrency.
    inline std::size_t worker_count()
    {
        if (const char *env = std::getenv("SSBSENSE_THREADS"))
        {
            const long v = std::strtol(env, nullptr, 10);
            if (v > 0)
                return std::size_t(v);
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : hw;
    }

    /**
     * @brief Run fn(worker, i) for i in [0, n) on up to `workers` threads.
     *
     * Indices are handed out dynamically; callers write results into per-index
     * slots so the outcome never depends on scheduling. The first exception
     * thrown by any worker is rethrown on the calling thread.
     */
    template <typename Fn>
    void parallel_for(std::size_t n, std::size_t workers, Fn &&fn)
    {
        workers = std::max<std::size_t>(1, std::min(workers, n));
        if (workers == 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                fn(std::size_t(0), i);
            return;
        }

        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                try
                {
                    for (std::size_t i = next++; i < n; i = next++)
                        fn(w, i);
                }
                catch (...)
                {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    next = n;
                }
            });
        for (auto &t : pool)
            t.join();
        if (error)
            std::rethrow_exception(error);
    }
}

#endif
