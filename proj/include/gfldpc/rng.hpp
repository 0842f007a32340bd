#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gfldpc {

// Seedable random stream with implementation-pinned distributions.
// std::normal_distribution and friends vary across standard libraries, so
// uniform/gaussian draws are generated here from raw engine output to keep
// results reproducible for a given (seed, stream) on any toolchain.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1) with 53 random bits
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // uniform in (0, 1]
    double next_double_pos() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    // unbiased uniform integer in [0, n)
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    // standard normal via Box-Muller (pair cached)
    double next_gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u = next_double_pos();
        const double v = next_double();
        const double r = std::sqrt(-2.0 * std::log(u));
        spare_ = r * std::sin(6.283185307179586476925286766559 * v);
        have_spare_ = true;
        return r * std::cos(6.283185307179586476925286766559 * v);
    }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

// Independent substream derived from (seed, stream index). Workers and
// per-trial streams are always addressed this way so that results depend on
// the seed and the partitioning only, never on scheduling.
inline Rng substream(std::uint64_t seed, std::uint64_t stream) {
    const std::uint64_t a = detail::splitmix64(seed ^ 0x5851f42d4c957f2dULL);
    const std::uint64_t b = detail::splitmix64(stream + 0x14057b7ef767814fULL);
    return Rng(detail::splitmix64(a ^ (b * 0x2545f4914f6cdd1dULL)));
}

}  // namespace gfldpc
