#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace rgs {

// Worker count: RGS_THREADS env var wins, otherwise hardware concurrency.
inline int default_threads() {
    if (const char* env = std::getenv("RGS_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// Static block partition of [begin, end). Each worker owns a contiguous
// range, so output written at index i never races and results do not
// depend on the worker count.
inline void parallel_for(int begin, int end, int num_threads,
                         const std::function<void(int)>& body) {
    int n = end - begin;
    if (n <= 0) return;
    num_threads = std::max(1, std::min(num_threads, n));
    if (num_threads == 1) {
        for (int i = begin; i < end; ++i) body(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(num_threads);
    int chunk = (n + num_threads - 1) / num_threads;
    for (int w = 0; w < num_threads; ++w) {
        int lo = begin + w * chunk;
        int hi = std::min(lo + chunk, end);
        if (lo >= hi) break;
        workers.emplace_back([lo, hi, &body] {
            for (int i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : workers) t.join();
}

}  // namespace rgs
