#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

namespace suploc {

// Worker count: SUPLOC_WORKERS env var, else hardware concurrency.
inline int default_worker_count() {
    if (const char* env = std::getenv("SUPLOC_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// Calls fn(rep) once for each rep in [0, n) across a bounded worker pool.
// fn must be safe to call concurrently; replicate indices are handed out
// by an atomic counter, so scheduling never changes which work is done.
template <typename Fn>
void for_each_replicate(long long n, int workers, Fn&& fn) {
    if (n <= 0) return;
    workers = std::max(1, workers);
    if (workers == 1 || n == 1) {
        for (long long rep = 0; rep < n; ++rep) fn(rep);
        return;
    }
    std::atomic<long long> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&]() {
        while (!failed.load(std::memory_order_relaxed)) {
            const long long rep = next.fetch_add(1, std::memory_order_relaxed);
            if (rep >= n) return;
            try {
                fn(rep);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    const int spawn = static_cast<int>(std::min<long long>(workers, n));
    pool.reserve(spawn);
    for (int i = 0; i < spawn; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// Map phase with slot-ordered results: results[rep] = fn(rep). The
// reduce stays with the caller (serial, in replicate order), so emitted
// numbers are independent of the worker count.
template <typename T, typename Fn>
std::vector<T> map_replicates(long long n, int workers, Fn&& fn) {
    std::vector<T> results(static_cast<std::size_t>(n));
    for_each_replicate(n, workers, [&](long long rep) { results[static_cast<std::size_t>(rep)] = fn(rep); });
    return results;
}

}  // namespace suploc
