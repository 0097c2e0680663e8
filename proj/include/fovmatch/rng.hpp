#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fovmatch {

// Per-realization RNG stream. Distribution sampling is hand-rolled on top of
// mt19937_64 so results are identical across standard library implementations.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_index) {
        std::seed_seq seq{seed, stream_index};
        engine_.seed(seq);
    }

    // uniform in [0, 1)
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // uniform in [-1, 1]
    double uniform_symmetric() {
        return 2.0 * uniform01() - 1.0;
    }

    // uniform integer in [lo, hi] inclusive
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(engine_() % span);
    }

    double gaussian(double sigma) {
        // Box-Muller, one value per call; the spare is discarded to keep the
        // draw count per sample fixed.
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
        return sigma * r * std::cos(6.283185307179586 * u2);
    }

private:
    std::mt19937_64 engine_;
};

} // namespace fovmatch
