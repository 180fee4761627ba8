#include "brt/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

namespace brt {

namespace {
std::atomic<int> g_threads{0};
constexpr std::size_t kReduceBlock = 4096;
}  // namespace

int global_thread_count() {
    int t = g_threads.load(std::memory_order_relaxed);
    if (t <= 0) {
        unsigned hw = std::thread::hardware_concurrency();
        t = hw == 0 ? 1 : static_cast<int>(hw);
    }
    return t;
}

void set_global_thread_count(int threads) { g_threads.store(threads, std::memory_order_relaxed); }

void parallel_for_chunks(std::size_t n,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(global_thread_count()), n);
    if (workers <= 1) {
        fn(0, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end]() {
            try {
                fn(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    parallel_for_chunks(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
    });
}

double pairwise_tree_sum(std::vector<double>& partials) {
    if (partials.empty()) return 0.0;
    std::size_t count = partials.size();
    while (count > 1) {
        const std::size_t half = count / 2;
        for (std::size_t i = 0; i < half; ++i)
            partials[i] = partials[2 * i] + partials[2 * i + 1];
        if (count % 2 == 1) {
            partials[half] = partials[count - 1];
            count = half + 1;
        } else {
            count = half;
        }
    }
    return partials[0];
}

double deterministic_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    const std::size_t blocks = (n + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partials(blocks, 0.0);
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t begin = b * kReduceBlock;
        const std::size_t end = std::min(n, begin + kReduceBlock);
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += values[i];
        partials[b] = s;
    });
    return pairwise_tree_sum(partials);
}

double deterministic_dot(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    if (n == 0) return 0.0;
    const std::size_t blocks = (n + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partials(blocks, 0.0);
    parallel_for(blocks, [&](std::size_t blk) {
        const std::size_t begin = blk * kReduceBlock;
        const std::size_t end = std::min(n, begin + kReduceBlock);
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += a[i] * b[i];
        partials[blk] = s;
    });
    return pairwise_tree_sum(partials);
}

}  // namespace brt
