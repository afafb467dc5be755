#pragma once

#include <cstdint>
#include <limits>

namespace twtsim
{

/// Microseconds since simulation start. Durations use the same unit.
using SimTime = std::int64_t;

using NodeId = std::uint32_t;

/// The access point is always node 0; stations are 1..N.
inline constexpr NodeId kApNode = 0;

inline constexpr SimTime kSecond = 1'000'000;

} // namespace twtsim
