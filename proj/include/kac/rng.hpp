#pragma once

#include <cstdint>
#include <random>

namespace kac {

// 64-bit Mersenne twister keyed by (seed, stream). Variate algorithms are
// implemented here so that output does not depend on the standard library.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    std::uint64_t next_u64() { return eng_(); }
    // Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    // Uniform on (0,1].
    double uniform_pos() { return 1.0 - uniform(); }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    double exponential() ;
    double exponential(double rate) { return exponential() / rate; }
    double normal();
    // log of a Gamma(shape, 1) variate; stays finite for tiny shapes.
    double log_gamma_variate(double shape);
    double gamma(double shape);

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace kac
