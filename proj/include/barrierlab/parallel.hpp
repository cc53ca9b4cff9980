#pragma once

///
/// Thread-budget helper shared by the station scans. Parallelism is opt-out
/// via the BARRIERLAB_THREADS environment variable (1 forces serial); the
/// partition is deterministic, so numerical results never depend on the
/// thread count.
///

#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace barrierlab {

inline int thread_budget() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    int cap = hw < 8 ? hw : 8;
    if (const char* env = std::getenv("BARRIERLAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) cap = static_cast<int>(v < 64 ? v : 64);
    }
    return cap;
}

/// Runs fn(begin, end) over a contiguous partition of [0, n). Callbacks must
/// write only to disjoint output slots. Exceptions are collected and the
/// first one (in partition order) is rethrown on the calling thread.
template <class Fn>
void parallel_chunks(std::size_t n, Fn&& fn) {
    const int threads = thread_budget();
    if (threads <= 1 || n < 2048) {
        fn(std::size_t{0}, n);
        return;
    }
    const std::size_t chunk = (n + static_cast<std::size_t>(threads) - 1) /
                              static_cast<std::size_t>(threads);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    std::size_t slot = 0;
    for (std::size_t b = 0; b < n; b += chunk, ++slot) {
        const std::size_t e = (b + chunk < n) ? b + chunk : n;
        pool.emplace_back([&fn, &errors, slot, b, e] {
            try {
                fn(b, e);
            } catch (...) {
                errors[slot] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
}

} // namespace barrierlab
