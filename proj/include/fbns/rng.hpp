#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace fbns {

/// Deterministic random stream identified by (seed, stream_id).
///
/// Draws are produced by std::mt19937_64 and converted with fixed formulas
/// (no std:: distributions), so a given (seed, stream_id) yields the same
/// sequence on every platform and standard library.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

    /// Independent child stream; the child id is mixed into this stream's id.
    [[nodiscard]] RngStream derive(std::uint64_t child) const;

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    /// Standard normal via the Marsaglia polar method.
    double normal();
    /// Exponential with the given rate (mean 1 / rate).
    double exponential(double rate);
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

  private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    std::optional<double> spare_normal_;
};

/// SplitMix64 finalizer, used to mix seeds and stream ids.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace fbns
