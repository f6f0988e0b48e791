#pragma once

#include <cstdint>
#include <random>

namespace wta {

// Seeded random stream. Substreams are derived by mixing a stream id into
// the base seed, so independent components (committee members, benchmark
// grid cells) can draw from disjoint streams reproducibly.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream), engine_(mix(seed, stream)) {}

    // Independent stream derived from this one; does not disturb this stream.
    RngStream substream(std::uint64_t id) const {
        return RngStream(seed_, mix(stream_, id));
    }

    std::mt19937_64& engine() { return engine_; }

    std::uint64_t uniform_index(std::uint64_t n) {
        std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
        return d(engine_);
    }

    double uniform01() {
        std::uniform_real_distribution<double> d(0.0, 1.0);
        return d(engine_);
    }

    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        // splitmix64 finalizer over the combined words
        std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

}  // namespace wta
