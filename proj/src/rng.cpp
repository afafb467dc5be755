#include "twtsim/rng.hpp"

#include "twtsim/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace twtsim
{

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(splitmix64(seed ^ splitmix64(stream_id + 0x5157)))
{
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi)
{
    if (lo > hi)
        throw FatalError("uniform_int: empty range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    if (span == std::numeric_limits<std::uint64_t>::max())
        return static_cast<std::int64_t>(engine_());
    const std::uint64_t range = span + 1;
    // Reject the top partial block so every residue is equally likely.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % range);
    std::uint64_t x;
    do
    {
        x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % range);
}

double RngStream::uniform01()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::normal(double mean, double sigma)
{
    if (!(sigma >= 0.0))
        throw FatalError("normal: negative sigma " + std::to_string(sigma));
    if (sigma == 0.0)
        return mean;
    if (spare_)
    {
        const double z = *spare_;
        spare_.reset();
        return mean + sigma * z;
    }
    // Marsaglia polar method.
    double u, v, s;
    do
    {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    return mean + sigma * u * factor;
}

} // namespace twtsim
