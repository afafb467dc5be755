#pragma once

#include "twtsim/radio_medium.hpp"
#include "twtsim/sim_kernel.hpp"
#include "twtsim/types.hpp"

#include <functional>
#include <optional>
#include <string_view>

namespace twtsim
{

struct EdcaParams
{
    int cw_min = 15;
    int cw_max = 1023;
    int retry_limit = 7;
    SimTime slot = 9;
    SimTime sifs = 16;
    SimTime aifs = 34;         // SIFS + 2 slots
    SimTime ack_duration = 44;
    SimTime ack_timeout = 69;  // SIFS + ACK + slot, measured from the data end
    /// When false, a frame enqueued on an idle channel goes out after AIFS
    /// without a backoff draw. Station wake-ups always draw, see DefaultEdca.
    bool backoff_on_idle_enqueue = true;

    /// Throws ConfigError on a violated invariant.
    void validate() const;
};

/// Contention window at retry stage `r` given the window of stage r-1.
int next_cw(int prev_cw, int r, const EdcaParams &params);

enum class EdcaPhase
{
    Idle,
    DeferAifs,
    Backoff,
    Transmitting,
    AwaitAck,
    Done,
    Dropped,
};

std::string_view to_string(EdcaPhase phase);

struct EdcaState
{
    EdcaPhase phase = EdcaPhase::Idle;
    int retry = 0;
    int cw = 0;
    int backoff_counter = 0;
    int attempts = 0;
    std::optional<Frame> frame;
    bool expects_ack = true;
};

/// Transmit-side channel access for one frame at a time.
///
/// The owner forwards carrier-sense changes, the end of its own transmissions
/// and received ACKs. The machine schedules its own slot-boundary and
/// ACK-timeout events on the kernel. Backoff counts down one unit per idle slot
/// after the channel has been idle for AIFS; a busy channel freezes the counter
/// and the next idle period starts again with a full AIFS. A decrement that lands
/// on the same instant the channel turns busy still counts.
class EdcaMachine
{
public:
    struct Hooks
    {
        /// Called from a kernel event; the frame must go on the air at the current time.
        std::function<void(const Frame &)> transmit;
        std::function<void()> on_done;
        std::function<void()> on_dropped;
        /// Backoff draw for the given retry stage, in [0, cw].
        std::function<int(int retry, int cw)> draw_backoff;
    };

    EdcaMachine(NodeId owner, EdcaParams params, Kernel &kernel, Hooks hooks);

    EdcaMachine(const EdcaMachine &) = delete;
    EdcaMachine &operator=(const EdcaMachine &) = delete;

    /// Starts access for `frame`. `idle_since` is the instant the channel last
    /// turned idle from this station's point of view (ignored when busy).
    void enqueue(const Frame &frame, bool expects_ack, bool channel_idle, SimTime idle_since);

    void on_channel_busy(SimTime now);
    void on_channel_idle(SimTime now);
    void on_tx_end(SimTime now);
    /// Returns false (and changes nothing) unless an ACK is awaited.
    bool on_ack(SimTime now);

    /// Done/Dropped back to Idle so the next frame can be enqueued.
    void reset();

    const EdcaState &state() const { return state_; }
    const EdcaParams &params() const { return params_; }
    /// Pending transmission instant, if the countdown is running.
    std::optional<SimTime> scheduled_access() const;

private:
    void resume(SimTime now);
    void suspend(SimTime now);
    void commit_now(SimTime now);
    void fire_access();
    void on_ack_timeout();
    void draw(SimTime now);

    NodeId owner_;
    EdcaParams params_;
    Kernel &kernel_;
    Hooks hooks_;
    EdcaState state_;

    bool busy_ = false;
    SimTime idle_since_ = 0;
    SimTime entry_ = 0;
    SimTime origin_ = 0;
    EventHandle access_;
    EventHandle timeout_;
};

} // namespace twtsim
