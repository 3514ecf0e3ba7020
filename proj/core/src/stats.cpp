#include "katoklab/stats.hpp"

#include <atomic>
#include <mutex>

namespace katoklab {

namespace {
unsigned g_threads = 0;
}

unsigned default_thread_count() {
    if (g_threads > 0) return g_threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

void set_default_thread_count(unsigned n) { g_threads = n; }

void parallel_for(size_t n, const std::function<void(size_t)>& fn, unsigned threads) {
    if (threads == 0) threads = default_thread_count();
    if (threads <= 1 || n < 2) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&]() {
        try {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= n) break;
                fn(i);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lk(err_mu);
            if (!err) err = std::current_exception();
        }
    };
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace katoklab
