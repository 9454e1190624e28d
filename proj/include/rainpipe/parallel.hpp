#pragma once

#include <cstddef>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace rainpipe {

// Worker count: RAINPIPE_THREADS env var if set, else hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("RAINPIPE_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

namespace detail {
inline thread_local bool inside_parallel_region = false;
}

// Runs fn(i) for i in [0, n), split into contiguous chunks across threads.
// Each index is processed exactly once and results must be written to
// per-index slots, so output never depends on the schedule. Nested calls
// from inside a worker run inline to avoid thread explosion.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const unsigned workers = detail::inside_parallel_region ? 1 : worker_count();
    if (workers <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t t = std::min<std::size_t>(workers, n);
    std::vector<std::thread> threads;
    threads.reserve(t - 1);
    auto run_chunk = [&fn](std::size_t begin, std::size_t end) {
        detail::inside_parallel_region = true;
        for (std::size_t i = begin; i < end; ++i) fn(i);
        detail::inside_parallel_region = false;
    };
    const std::size_t chunk = (n + t - 1) / t;
    for (std::size_t w = 1; w < t; ++w) {
        std::size_t begin = w * chunk;
        std::size_t end = std::min(n, begin + chunk);
        if (begin < end) threads.emplace_back(run_chunk, begin, end);
    }
    run_chunk(0, std::min(n, chunk));
    for (auto& th : threads) th.join();
}

} // namespace rainpipe
