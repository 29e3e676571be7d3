// Copyright 2026 The spinframe Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace spinframe {

/// Worker count after applying the SPINFRAME_THREADS cap (if set and
/// positive). Never less than 1.
[[nodiscard]] inline unsigned worker_count(unsigned requested) {
    unsigned n = std::max(1u, requested);
    if (const char *env = std::getenv("SPINFRAME_THREADS")) {
        char *end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0)
            n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

/// Hardware concurrency, capped by SPINFRAME_THREADS.
[[nodiscard]] inline unsigned default_workers() {
    return worker_count(std::max(1u, std::thread::hardware_concurrency()));
}

/// Calls f(i) for i in [0, count) on up to `workers` threads using a static
/// contiguous partition. Results must be written to per-index slots, so the
/// outcome never depends on the worker count. The exception thrown for the
/// lowest index is rethrown.
template <typename F> void parallel_for(std::size_t count, unsigned workers, F &&f) {
    workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            f(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = count * w / workers;
            const std::size_t end = count * (w + 1) / workers;
            pool.emplace_back([&, begin, end] {
                for (std::size_t i = begin; i < end; ++i) {
                    try {
                        f(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                        return;
                    }
                }
            });
        }
    }
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace spinframe
