#include "fbns/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace fbns {

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream_id))) {}

RngStream RngStream::derive(std::uint64_t child) const {
    return RngStream(seed_, splitmix64(stream_id_ * 0x100000001B3ULL ^ splitmix64(child + 1)));
}

double RngStream::uniform() {
    // (k + 0.5) / 2^53 never hits 0 or 1.
    const std::uint64_t k = engine_() >> 11;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
    if (spare_normal_) {
        const double z = *spare_normal_;
        spare_normal_.reset();
        return z;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * f;
    return u * f;
}

double RngStream::exponential(double rate) {
    if (!(rate > 0.0)) {
        throw std::domain_error("exponential rate must be positive");
    }
    return -std::log(uniform()) / rate;
}

std::uint64_t RngStream::below(std::uint64_t n) {
    if (n == 0) {
        throw std::domain_error("below(0)");
    }
    // Rejection sampling removes modulo bias.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

}  // namespace fbns
