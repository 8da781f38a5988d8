#pragma once

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace decum {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Strided index partition over [0, n). Workers write to disjoint slots only,
// so the result is identical for every worker count.
template <class F>
void parallel_for(int n, int threads, F&& body) {
    const int t = std::min(resolve_threads(threads), n > 0 ? n : 1);
    if (t <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(t));
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (int k = 0; k < t; ++k) {
        pool.emplace_back([&, k] {
            try {
                for (int i = k; i < n; i += t) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace decum
