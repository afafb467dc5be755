#pragma once

#include <stdexcept>
#include <string>

namespace twtsim
{

/// Simulator invariant violated. Aborts the replication; never a protocol outcome.
class FatalError : public std::logic_error
{
public:
    explicit FatalError(const std::string &what) : std::logic_error(what) {}
};

/// Scenario or config file rejected before any run starts.
class ConfigError : public std::runtime_error
{
public:
    explicit ConfigError(const std::string &what) : std::runtime_error(what) {}
};

} // namespace twtsim
