#include "critfaces/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace critfaces {

namespace {

// Philox4x32 round constants (Salmon et al., SC 2011).
constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85u;
constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline void philox_round(std::uint32_t c[4], const std::uint32_t k[2]) {
    std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM4x32A) * c[0];
    std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM4x32B) * c[2];
    std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    std::uint32_t r0 = hi1 ^ c[1] ^ k[0];
    std::uint32_t r1 = lo1;
    std::uint32_t r2 = hi0 ^ c[3] ^ k[1];
    std::uint32_t r3 = lo0;
    c[0] = r0; c[1] = r1; c[2] = r2; c[3] = r3;
}

} // namespace

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : counter_(0), buf_left_(0), gauss_spare_(0.0), has_gauss_spare_(false) {
    // 128-bit stream key: two independent splitmix64 mixes of (seed, index).
    std::uint64_t h0 = splitmix64(master_seed ^ splitmix64(stream_index));
    std::uint64_t h1 = splitmix64(master_seed ^ splitmix64(stream_index ^ 0xA5A5A5A5A5A5A5A5ull));
    key_[0] = static_cast<std::uint32_t>(h0);
    key_[1] = static_cast<std::uint32_t>(h0 >> 32);
    ctr_hi_[0] = static_cast<std::uint32_t>(h1);
    ctr_hi_[1] = static_cast<std::uint32_t>(h1 >> 32);
}

void RandomStream::refill() {
    std::uint32_t c[4] = {static_cast<std::uint32_t>(counter_),
                          static_cast<std::uint32_t>(counter_ >> 32), ctr_hi_[0], ctr_hi_[1]};
    std::uint32_t k[2] = {key_[0], key_[1]};
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            k[0] += kPhiloxW32A;
            k[1] += kPhiloxW32B;
        }
        philox_round(c, k);
    }
    ++counter_;
    buf_[0] = (static_cast<std::uint64_t>(c[1]) << 32) | c[0];
    buf_[1] = (static_cast<std::uint64_t>(c[3]) << 32) | c[2];
    buf_left_ = 2;
}

std::uint64_t RandomStream::next_u64() {
    if (buf_left_ == 0) refill();
    std::uint64_t x = buf_[2 - buf_left_];
    --buf_left_;
    return x;
}

double RandomStream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::next_gaussian() {
    if (has_gauss_spare_) {
        has_gauss_spare_ = false;
        return gauss_spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * next_double() - 1.0;
        v = 2.0 * next_double() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    gauss_spare_ = v * f;
    has_gauss_spare_ = true;
    return u * f;
}

std::uint64_t RandomStream::next_poisson(double mean) {
    if (!(mean > 0.0)) throw std::domain_error("next_poisson: mean must be positive");
    if (mean < 30.0) {
        // Inversion by sequential search.
        double p = std::exp(-mean), cdf = p, u = next_double();
        std::uint64_t k = 0;
        while (u > cdf) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
            if (p < 1e-300 && cdf >= 1.0) break;
        }
        return k;
    }
    // Hoermann's PTRD transformed rejection: a normal-approximation proposal
    // with a corrected acceptance test, exact for all mean >= 30.
    const double smu = std::sqrt(mean);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        double u = next_double() - 0.5;
        double v = next_double();
        double us = 0.5 - std::fabs(u);
        double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        double rhs = -mean + kf * std::log(mean) - std::lgamma(kf + 1.0);
        if (lhs <= rhs) return static_cast<std::uint64_t>(kf);
    }
}

PointCloud sample_poisson(double intensity, int d, RandomStream& stream) {
    if (!(intensity > 0.0)) throw std::domain_error("sample_poisson: intensity must be positive");
    if (d < 1) throw std::domain_error("sample_poisson: d must be >= 1");
    PointCloud cloud;
    cloud.dim = d;
    std::uint64_t n = stream.next_poisson(intensity);
    cloud.xs.resize(n * static_cast<std::uint64_t>(d));
    for (double& x : cloud.xs) x = stream.next_double();
    return cloud;
}

PointCloud sample_poisson(double intensity, int d, std::uint64_t master_seed,
                          std::uint64_t trial_index) {
    RandomStream s = substream(master_seed, trial_index);
    PointCloud cloud = sample_poisson(intensity, d, s);
    cloud.master_seed = master_seed;
    cloud.trial_index = trial_index;
    return cloud;
}

} // namespace critfaces
