#ifndef CHESSFORGE_UTIL_RNG_HPP
#define CHESSFORGE_UTIL_RNG_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace chessforge {

// All randomness flows through these helpers. std::mt19937_64 produces an
// identical bit stream everywhere, but the standard distributions do not, so
// the draws on top of the raw engine are spelled out by hand.
class Rng {
  public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of precision.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, bound) via rejection, so every value is equally likely.
    uint64_t next_below(uint64_t bound) {
        if (bound == 0)
            throw std::invalid_argument("next_below: bound must be positive");
        uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            uint64_t v = engine_();
            if (v >= threshold)
                return v % bound;
        }
    }

    // Index draw proportional to the given nonnegative weights.
    size_t pick_weighted(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) {
            if (w < 0.0)
                throw std::invalid_argument("pick_weighted: negative weight");
            total += w;
        }
        if (total <= 0.0)
            throw std::invalid_argument("pick_weighted: weights sum to zero");
        double target = next_double() * total;
        double acc = 0.0;
        for (size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (target < acc)
                return i;
        }
        return weights.size() - 1;
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (size_t i = items.size(); i > 1; --i)
            std::swap(items[i - 1], items[next_below(i)]);
    }

  private:
    std::mt19937_64 engine_;
};

// Per-sample seed derivation keeps samples independent of batch order.
inline uint64_t derive_seed(uint64_t base_seed, uint64_t sample_index) {
    return base_seed ^ sample_index;
}

} // namespace chessforge

#endif
