#pragma once

#include <cstdint>
#include <string_view>

namespace bcqq {

// Counter-based pseudo-random generator. Output i is a pure function of
// (key, start + i), so streams can be forked, replayed, and compared across
// runs without carrying hidden state. The mixing function is the splitmix64
// finalizer over a Weyl sequence.
class Rng {
  public:
    explicit Rng(std::uint64_t key, std::uint64_t counter = 0)
        : key_(key), counter_(counter) {}

    std::uint64_t next_u64() {
        std::uint64_t z = key_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform on [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer on [0, n); n must be > 0
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    int rademacher() { return (next_u64() >> 63) ? 1 : -1; }

    // Independent named stream sharing this generator's key lineage.
    Rng substream(std::string_view name) const {
        std::uint64_t h = 0xCBF29CE484222325ULL ^ key_;
        for (unsigned char c : name) {
            h ^= c;
            h *= 0x100000001B3ULL;
        }
        return Rng(mix(h));
    }

    // Indexed child stream (e.g. one per episode or per sample).
    Rng fork(std::uint64_t index) const { return Rng(mix(key_ ^ (0x9E3779B97F4A7C15ULL + index))); }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_;
};

} // namespace bcqq
