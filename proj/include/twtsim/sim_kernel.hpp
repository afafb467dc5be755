#pragma once

#include "twtsim/types.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string_view>
#include <utility>

namespace twtsim
{

enum class EventKind : std::uint8_t
{
    Wake,
    BackoffDone,
    TxStart,
    TxEnd,
    AckTimeout,
    SpEnd,
    TriggerDue,
    ResponseTimeout,
    Generic,
};

std::string_view to_string(EventKind kind);

struct SimEvent
{
    SimTime fire_at = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::Generic;
    NodeId target = 0;
    std::function<void()> action;
};

/// Opaque reference to a scheduled event, usable with Kernel::cancel.
struct EventHandle
{
    SimTime fire_at = -1;
    std::uint64_t seq = 0;

    bool valid() const { return fire_at >= 0; }
};

/// Single-threaded discrete-event engine. Events pop in (fire_at, seq) order,
/// so events scheduled for the same instant run in scheduling order.
class Kernel
{
public:
    SimTime now() const { return now_; }

    EventHandle schedule(SimTime fire_at, EventKind kind, NodeId target, std::function<void()> action = {});
    EventHandle schedule_in(SimTime delay, EventKind kind, NodeId target, std::function<void()> action = {})
    {
        return schedule(now_ + delay, kind, target, std::move(action));
    }

    /// True if the event was still pending and has been removed.
    bool cancel(const EventHandle &handle);

    std::optional<SimEvent> pop_next();

    bool empty() const { return queue_.empty(); }
    std::size_t pending() const { return queue_.size(); }

    /// Pops and executes events until the queue drains or the next event lies
    /// beyond `horizon`. Returns false if stopped by the horizon.
    bool run(SimTime horizon = std::numeric_limits<SimTime>::max());

private:
    using Key = std::pair<SimTime, std::uint64_t>;

    SimTime now_ = 0;
    std::uint64_t next_seq_ = 0;
    std::map<Key, SimEvent> queue_;
};

} // namespace twtsim
