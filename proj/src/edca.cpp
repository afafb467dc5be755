#include "twtsim/edca.hpp"

#include "twtsim/errors.hpp"

#include <algorithm>
#include <string>

namespace twtsim
{

namespace
{

bool is_window(int cw)
{
    // 2^k - 1
    return cw >= 0 && ((cw + 1) & cw) == 0;
}

} // namespace

void EdcaParams::validate() const
{
    if (!is_window(cw_min) || !is_window(cw_max))
        throw ConfigError("cw_min and cw_max must be of the form 2^k - 1");
    if (cw_min > cw_max)
        throw ConfigError("cw_min must not exceed cw_max");
    if (retry_limit < 1)
        throw ConfigError("retry_limit must be at least 1");
    if (slot <= 0 || sifs <= 0 || ack_duration <= 0)
        throw ConfigError("slot, sifs and ack_duration must be positive");
    if (aifs < sifs + slot)
        throw ConfigError("aifs must be at least sifs + slot");
    if (ack_timeout < sifs + ack_duration)
        throw ConfigError("ack_timeout must cover sifs + ack_duration");
}

int next_cw(int prev_cw, int r, const EdcaParams &params)
{
    if (r < 0)
        throw FatalError("next_cw: negative retry counter");
    if (r == 0)
        return params.cw_min;
    return std::min(2 * (prev_cw + 1) - 1, params.cw_max);
}

std::string_view to_string(EdcaPhase phase)
{
    switch (phase)
    {
    case EdcaPhase::Idle: return "idle";
    case EdcaPhase::DeferAifs: return "defer-aifs";
    case EdcaPhase::Backoff: return "backoff";
    case EdcaPhase::Transmitting: return "transmitting";
    case EdcaPhase::AwaitAck: return "await-ack";
    case EdcaPhase::Done: return "done";
    case EdcaPhase::Dropped: return "dropped";
    }
    return "unknown";
}

EdcaMachine::EdcaMachine(NodeId owner, EdcaParams params, Kernel &kernel, Hooks hooks)
    : owner_(owner), params_(params), kernel_(kernel), hooks_(std::move(hooks))
{
    state_.cw = params_.cw_min;
}

std::optional<SimTime> EdcaMachine::scheduled_access() const
{
    if (!access_.valid())
        return std::nullopt;
    return access_.fire_at;
}

void EdcaMachine::draw(SimTime now)
{
    const int b = hooks_.draw_backoff(state_.retry, state_.cw);
    if (b < 0 || b > state_.cw)
        throw FatalError("backoff draw " + std::to_string(b) + " outside [0, " + std::to_string(state_.cw) + "]");
    state_.backoff_counter = b;
    state_.phase = b == 0 ? EdcaPhase::DeferAifs : EdcaPhase::Backoff;
    entry_ = now;
}

void EdcaMachine::enqueue(const Frame &frame, bool expects_ack, bool channel_idle, SimTime idle_since)
{
    if (state_.phase != EdcaPhase::Idle)
        throw FatalError("node " + std::to_string(owner_) + ": enqueue while EDCA is " +
                         std::string(to_string(state_.phase)));
    const SimTime now = kernel_.now();
    state_ = EdcaState{};
    state_.cw = params_.cw_min;
    state_.frame = frame;
    state_.expects_ack = expects_ack;
    busy_ = !channel_idle;
    idle_since_ = std::min(idle_since, now);

    if (channel_idle && !params_.backoff_on_idle_enqueue)
    {
        state_.backoff_counter = 0;
        state_.phase = EdcaPhase::DeferAifs;
        entry_ = now;
    }
    else
    {
        draw(now);
    }
    if (!busy_)
        resume(now);
}

void EdcaMachine::resume(SimTime now)
{
    origin_ = std::max(idle_since_ + params_.aifs, entry_);
    const SimTime at = origin_ + state_.backoff_counter * params_.slot;
    if (at < now)
        throw FatalError("node " + std::to_string(owner_) + ": backoff resumed in the past");
    access_ = kernel_.schedule(at, EventKind::BackoffDone, owner_, [this] {
        access_ = {};
        fire_access();
    });
}

void EdcaMachine::suspend(SimTime now)
{
    if (!access_.valid())
        return;
    kernel_.cancel(access_);
    access_ = {};
    if (now < origin_)
        return;
    const SimTime elapsed = (now - origin_) / params_.slot;
    const int done = static_cast<int>(std::min<SimTime>(state_.backoff_counter, elapsed));
    state_.backoff_counter -= done;
    if (state_.backoff_counter == 0)
    {
        // The counter reached zero on the very boundary the channel turned busy.
        commit_now(now);
        return;
    }
    state_.phase = EdcaPhase::Backoff;
}

void EdcaMachine::commit_now(SimTime now)
{
    state_.phase = EdcaPhase::Transmitting;
    access_ = kernel_.schedule(now, EventKind::BackoffDone, owner_, [this] {
        access_ = {};
        fire_access();
    });
}

void EdcaMachine::fire_access()
{
    state_.backoff_counter = 0;
    state_.phase = EdcaPhase::Transmitting;
    ++state_.attempts;
    hooks_.transmit(*state_.frame);
}

void EdcaMachine::on_channel_busy(SimTime now)
{
    busy_ = true;
    if (state_.phase == EdcaPhase::DeferAifs || state_.phase == EdcaPhase::Backoff)
        suspend(now);
}

void EdcaMachine::on_channel_idle(SimTime now)
{
    busy_ = false;
    idle_since_ = std::max(idle_since_, now);
    if ((state_.phase == EdcaPhase::DeferAifs || state_.phase == EdcaPhase::Backoff) && !access_.valid())
        resume(now);
}

void EdcaMachine::on_tx_end(SimTime now)
{
    if (state_.phase != EdcaPhase::Transmitting)
        throw FatalError("node " + std::to_string(owner_) + ": tx end while EDCA is " +
                         std::string(to_string(state_.phase)));
    if (!busy_)
        idle_since_ = std::max(idle_since_, now);
    if (!state_.expects_ack)
    {
        state_.phase = EdcaPhase::Done;
        if (hooks_.on_done)
            hooks_.on_done();
        return;
    }
    state_.phase = EdcaPhase::AwaitAck;
    timeout_ = kernel_.schedule(now + params_.ack_timeout, EventKind::AckTimeout, owner_, [this] {
        timeout_ = {};
        on_ack_timeout();
    });
}

bool EdcaMachine::on_ack(SimTime)
{
    if (state_.phase != EdcaPhase::AwaitAck)
        return false;
    kernel_.cancel(timeout_);
    timeout_ = {};
    state_.phase = EdcaPhase::Done;
    if (hooks_.on_done)
        hooks_.on_done();
    return true;
}

void EdcaMachine::on_ack_timeout()
{
    const SimTime now = kernel_.now();
    ++state_.retry;
    state_.cw = next_cw(state_.cw, state_.retry, params_);
    if (state_.retry >= params_.retry_limit)
    {
        state_.phase = EdcaPhase::Dropped;
        state_.frame.reset();
        if (hooks_.on_dropped)
            hooks_.on_dropped();
        return;
    }
    draw(now);
    if (!busy_)
        resume(now);
}

void EdcaMachine::reset()
{
    if (state_.phase != EdcaPhase::Done && state_.phase != EdcaPhase::Dropped && state_.phase != EdcaPhase::Idle)
        throw FatalError("node " + std::to_string(owner_) + ": reset while EDCA is " +
                         std::string(to_string(state_.phase)));
    state_ = EdcaState{};
    state_.cw = params_.cw_min;
}

} // namespace twtsim
