#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace vforge {

/* Worker count: explicit setting wins, then VALENCE_FORGE_THREADS, then
 * hardware concurrency.  Results are always written by index, so outputs
 * do not depend on the schedule. */
inline int& thread_count_override() {
    static int v = 0;
    return v;
}

inline void set_thread_count(int n) { thread_count_override() = n; }

inline int effective_thread_count() {
    if (thread_count_override() > 0) return thread_count_override();
    if (const char* env = std::getenv("VALENCE_FORGE_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

/* Runs body(i) for i in [0, n).  Exceptions from workers are rethrown on
 * the calling thread (first one wins). */
template <class F>
void parallel_for(std::size_t n, F&& body) {
    int threads = effective_thread_count();
    if (n == 0) return;
    if (threads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error = nullptr; // written once, guarded by the CAS on failed
    std::atomic<bool> failed{false};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                body(i);
            } catch (...) {
                bool expected = false;
                if (failed.compare_exchange_strong(expected, true))
                    first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    int use = static_cast<int>(std::min<std::size_t>(n, static_cast<std::size_t>(threads)));
    pool.reserve(use);
    for (int t = 0; t < use; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace vforge
