#pragma once

#include <cstdint>
#include <span>

namespace kolmo {

/// Monte Carlo summary of one scalar quantity.
struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(nsamples)
    std::uint64_t nsamples = 1;
    std::uint64_t seed = 0;
    std::uint64_t nonfinite = 0;  // samples dropped because they were NaN/inf
    bool valid = true;
};

/// Pairwise summation; the association order depends only on the length, so
/// the result is reproducible regardless of how the values were produced.
double pairwise_sum(std::span<const double> values) noexcept;

/// Mean and standard error of the finite entries of `values`. Non-finite
/// entries are counted and mark the estimate invalid.
Estimate summarize(std::span<const double> values, std::uint64_t seed);

/// |a.mean - b.mean| / sqrt(se_a^2 + se_b^2); 0 when both errors vanish and
/// the means agree, +inf when they vanish and the means differ.
double z_score(const Estimate& a, const Estimate& b) noexcept;

}  // namespace kolmo
