#pragma once

#include "twtsim/types.hpp"

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace twtsim
{

/// Receives one line per MAC/radio event: `time_us node event detail`.
class TraceSink
{
public:
    virtual ~TraceSink() = default;
    virtual void record(SimTime t, NodeId node, std::string_view event, std::string_view detail) = 0;
};

class StreamTrace final : public TraceSink
{
public:
    explicit StreamTrace(std::ostream &out) : out_(out) {}

    void record(SimTime t, NodeId node, std::string_view event, std::string_view detail) override
    {
        out_ << t << ' ' << node << ' ' << event << ' ' << (detail.empty() ? std::string_view("-") : detail) << '\n';
    }

private:
    std::ostream &out_;
};

struct TraceLine
{
    SimTime t = 0;
    NodeId node = 0;
    std::string event;
    std::string detail;
};

class MemoryTrace final : public TraceSink
{
public:
    void record(SimTime t, NodeId node, std::string_view event, std::string_view detail) override
    {
        lines.push_back({t, node, std::string(event), std::string(detail)});
    }

    std::vector<TraceLine> lines;
};

} // namespace twtsim
