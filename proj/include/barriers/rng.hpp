#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace barriers {

/// Derives the seed of a named random stream from the run seed. Stream names
/// are stable identifiers ("split:cultural:society", "mlp:init", ...), so a
/// new component draws from its own stream without perturbing existing ones.
std::uint64_t substream_seed(std::uint64_t root_seed, std::string_view stream_name);

/// Deterministic random source. mt19937_64 output is specified by the
/// standard, and all derived draws below are implemented by hand instead of
/// via std::*_distribution, so identical seeds give identical streams on
/// every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of precision.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n), n > 0. Rejection sampling keeps it unbiased.
    std::size_t next_below(std::size_t n);

    /// Standard normal deviate (Box-Muller, pairs cached).
    double next_normal();

    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::swap(values[i - 1], values[next_below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace barriers
