#include "twtsim/sim_kernel.hpp"

#include "twtsim/errors.hpp"

#include <string>

namespace twtsim
{

std::string_view to_string(EventKind kind)
{
    switch (kind)
    {
    case EventKind::Wake: return "wake";
    case EventKind::BackoffDone: return "backoff-done";
    case EventKind::TxStart: return "tx-start";
    case EventKind::TxEnd: return "tx-end";
    case EventKind::AckTimeout: return "ack-timeout";
    case EventKind::SpEnd: return "sp-end";
    case EventKind::TriggerDue: return "trigger-due";
    case EventKind::ResponseTimeout: return "response-timeout";
    case EventKind::Generic: return "generic";
    }
    return "unknown";
}

EventHandle Kernel::schedule(SimTime fire_at, EventKind kind, NodeId target, std::function<void()> action)
{
    if (fire_at < now_)
    {
        throw FatalError("event '" + std::string(to_string(kind)) + "' for node " + std::to_string(target) +
                         " scheduled at t=" + std::to_string(fire_at) + " before now=" + std::to_string(now_));
    }
    const std::uint64_t seq = next_seq_++;
    queue_.emplace(Key{fire_at, seq}, SimEvent{fire_at, seq, kind, target, std::move(action)});
    return EventHandle{fire_at, seq};
}

bool Kernel::cancel(const EventHandle &handle)
{
    if (!handle.valid())
        return false;
    return queue_.erase(Key{handle.fire_at, handle.seq}) > 0;
}

std::optional<SimEvent> Kernel::pop_next()
{
    if (queue_.empty())
        return std::nullopt;
    auto node = queue_.extract(queue_.begin());
    now_ = node.mapped().fire_at;
    return std::move(node.mapped());
}

bool Kernel::run(SimTime horizon)
{
    while (!queue_.empty())
    {
        if (queue_.begin()->first.first > horizon)
            return false;
        auto ev = pop_next();
        if (ev->action)
            ev->action();
    }
    return true;
}

} // namespace twtsim
