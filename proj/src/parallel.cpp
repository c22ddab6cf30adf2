#include "kolmo/parallel.hpp"

#include "kolmo/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace kolmo {

unsigned resolve_workers(unsigned requested) noexcept {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t, std::size_t)>& body) {
    if (count == 0) return;
    const std::size_t nthreads = std::min<std::size_t>(resolve_workers(workers), count);
    if (nthreads <= 1) {
        body(0, count);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(nthreads);
    const std::size_t chunk = (count + nthreads - 1) / nthreads;
    for (std::size_t w = 0; w < nthreads; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

double pairwise_sum(std::span<const double> values) noexcept {
    constexpr std::size_t kLeaf = 64;
    if (values.size() <= kLeaf) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

Estimate summarize(std::span<const double> values, std::uint64_t seed) {
    Estimate est;
    est.seed = seed;
    std::vector<double> finite;
    finite.reserve(values.size());
    for (double v : values) {
        if (std::isfinite(v))
            finite.push_back(v);
        else
            ++est.nonfinite;
    }
    est.valid = est.nonfinite == 0 && !finite.empty();
    est.nsamples = std::max<std::uint64_t>(1, finite.size());
    if (finite.empty()) {
        est.mean = std::numeric_limits<double>::quiet_NaN();
        return est;
    }
    const double n = static_cast<double>(finite.size());
    est.mean = pairwise_sum(finite) / n;
    if (finite.size() > 1) {
        for (double& v : finite) v = (v - est.mean) * (v - est.mean);
        const double var = pairwise_sum(finite) / (n - 1.0);
        est.std_error = std::sqrt(var / n);
    }
    return est;
}

double z_score(const Estimate& a, const Estimate& b) noexcept {
    const double diff = std::abs(a.mean - b.mean);
    const double se = std::hypot(a.std_error, b.std_error);
    if (se == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / se;
}

}  // namespace kolmo
