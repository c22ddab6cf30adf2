#pragma once

#include <array>
#include <cstdint>

namespace kolmo {

/// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) noexcept;
};

/// Stream domains. Every Monte Carlo work item draws from its own stream,
/// keyed by (seed, domain, item index), so results do not depend on which
/// thread evaluates which item.
namespace domain {
inline constexpr std::uint32_t user = 0x0000;
inline constexpr std::uint32_t series_term = 0x1000;  // + term index n
inline constexpr std::uint32_t likelihood = 0x2000;
inline constexpr std::uint32_t girsanov = 0x3000;
inline constexpr std::uint32_t direct = 0x4000;
inline constexpr std::uint32_t lp_norm = 0x5000;
inline constexpr std::uint32_t verify = 0x6000;
}  // namespace domain

/// Sequential view over the Philox counter space for one (seed, domain, id)
/// triple. Not thread-safe; give each work item its own stream.
class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id, std::uint32_t domain = domain::user) noexcept;

    std::uint32_t next_u32() noexcept;
    std::uint64_t next_u64() noexcept;

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() noexcept;

    /// Standard normal via the Marsaglia polar method.
    double normal() noexcept;

    /// Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 uses the U^{1/shape} boost.
    double gamma(double shape) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint32_t blocks_used() const noexcept { return ctr_[0]; }

  private:
    void refill() noexcept;

    std::uint64_t seed_;
    Philox4x32::Key key_;
    Philox4x32::Counter ctr_;
    Philox4x32::Counter buf_{};
    int pos_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace kolmo
