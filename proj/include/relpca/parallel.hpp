#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "relpca/types.hpp"

namespace relpca {

// Runs body(i) for i in [0, count).  Each index must write only its own
// disjoint output slice; then the result is identical for any worker count.
// workers <= 1 runs inline.  The first exception thrown by any worker is
// rethrown on the calling thread.
template <class Body>
void parallel_for(Index count, int workers, Body&& body) {
    if (count <= 0) return;
    if (workers <= 1 || count == 1) {
        for (Index i = 0; i < count; ++i) body(i);
        return;
    }
    const int n_threads = static_cast<int>(std::min<Index>(workers, count));
    std::atomic<Index> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const Index i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

inline int default_workers() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace relpca
