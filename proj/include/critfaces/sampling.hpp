#pragma once

#include <cstdint>
#include <vector>

#include "critfaces/torus.hpp"

// Seeded sampling: counter-based substreams (Philox4x32-10 keyed by a
// 128-bit hash of master seed and stream index) and homogeneous Poisson
// point clouds on the unit torus.

namespace critfaces {

// Value-type generator. Streams for distinct indices are derived
// statelessly, so trials can run in any order on any worker.
class RandomStream {
public:
    RandomStream() : RandomStream(0, 0) {}
    RandomStream(std::uint64_t master_seed, std::uint64_t stream_index);

    std::uint64_t next_u64();
    double next_double();   // uniform in [0,1), 53-bit
    double next_gaussian(); // standard normal, Marsaglia polar
    std::uint64_t next_poisson(double mean);

private:
    std::uint32_t key_[2];
    std::uint32_t ctr_hi_[2];
    std::uint64_t counter_;
    std::uint64_t buf_[2];
    int buf_left_;
    double gauss_spare_;
    bool has_gauss_spare_;

    void refill();
};

inline RandomStream substream(std::uint64_t master_seed, std::uint64_t stream_index) {
    return RandomStream(master_seed, stream_index);
}

// Poisson(intensity) count, then that many independent uniform points on
// [0,1)^d, all drawn from the given stream.
PointCloud sample_poisson(double intensity, int d, RandomStream& stream);

PointCloud sample_poisson(double intensity, int d, std::uint64_t master_seed,
                          std::uint64_t trial_index);

} // namespace critfaces
