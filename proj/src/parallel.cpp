#include "spixct/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace spixct {

namespace {
std::atomic<int> g_max_threads{0};  // 0 = not set yet

int default_threads() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}
}  // namespace

int max_threads() {
    int t = g_max_threads.load(std::memory_order_relaxed);
    return t > 0 ? t : default_threads();
}

void set_max_threads(int count) {
    g_max_threads.store(count > 0 ? count : 0, std::memory_order_relaxed);
}

void parallel_for_blocks(int begin, int end, const std::function<void(int, int)>& fn) {
    const int total = end - begin;
    if (total <= 0) return;
    const int nthreads = std::min(max_threads(), total);
    if (nthreads <= 1) {
        fn(begin, end);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(static_cast<size_t>(nthreads) - 1);
    const int chunk = (total + nthreads - 1) / nthreads;
    for (int t = 1; t < nthreads; ++t) {
        int lo = begin + t * chunk;
        int hi = std::min(end, lo + chunk);
        if (lo < hi) workers.emplace_back(fn, lo, hi);
    }
    fn(begin, std::min(end, begin + chunk));
    for (auto& w : workers) w.join();
}

}  // namespace spixct
