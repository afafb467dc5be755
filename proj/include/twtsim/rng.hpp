#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace twtsim
{

std::uint64_t splitmix64(std::uint64_t x);

/// Reproducible random stream keyed by (seed, stream id).
///
/// The engine is mt19937_64, whose output sequence is fixed by the standard.
/// The distributions are implemented here rather than taken from <random>
/// because the library distributions are not required to produce the same
/// values across standard library implementations.
class RngStream
{
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Uniform integer in [lo, hi]. Throws FatalError if lo > hi.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01();

    /// Gaussian draw. Throws FatalError if sigma < 0; sigma == 0 returns mean exactly.
    double normal(double mean, double sigma);

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// Stream ids: topology first, then one per node (AP = node 0).
inline constexpr std::uint64_t kTopologyStream = 0;
inline constexpr std::uint64_t node_stream(std::uint32_t node) { return std::uint64_t{node} + 1; }

} // namespace twtsim
