#pragma once

#include "twtsim/edca.hpp"
#include "twtsim/rng.hpp"
#include "twtsim/types.hpp"

#include <cstddef>
#include <deque>
#include <optional>
#include <string_view>
#include <vector>

namespace twtsim
{

enum class TwtMode
{
    Polling,    // trigger flag set: the AP polls each station with a trigger frame
    NonPolling, // trigger flag clear: stations contend with EDCA on wake
};

std::string_view to_string(TwtMode mode);

struct TwtAgreement
{
    NodeId sta = 0;
    SimTime twt = 0;
    SimTime sp_duration = kSecond;
    bool trigger_flag = false;
    SimTime awake_offset = 0;

    /// Instant the station intends to wake, before drift.
    SimTime target_wake() const { return twt - awake_offset; }
    SimTime sp_end() const { return twt + sp_duration; }
};

struct Schedule
{
    SimTime t_target = 0;
    SimTime mu = 0;
    std::vector<TwtAgreement> agreements;
};

/// Agreement i (station i+1) gets twt = t_target + i*mu. The awake offset only
/// applies to polling mode and is forced to zero otherwise.
Schedule build_schedule(std::size_t n, SimTime t_target, SimTime mu, TwtMode mode, SimTime awake_offset,
                        SimTime sp_duration = kSecond);

struct DriftModel
{
    double sigma_us = 0.0;
};

/// Actual wake instant: target wake plus a rounded Gaussian drift, clamped at 0.
SimTime sample_wake(const TwtAgreement &agreement, const DriftModel &drift, RngStream &stream);

double standard_normal_cdf(double z);

/// Reference delivery probability for a polled station when the AP queue never
/// backs up. The station hears its trigger iff it wakes no later than the
/// trigger preamble, which starts AIFS + b slots after the TWT with b uniform
/// over [0, cw_min]. Test oracle only.
double pm_delivery_probability_limit(SimTime awake_offset, double sigma_us, const EdcaParams &ap_edca);

enum class SessionPhase
{
    Doze,
    AwaitingTrigger,
    Contending,
    Exchanging,
    Done,
    Failed,
};

std::string_view to_string(SessionPhase phase);

struct StaSession
{
    SessionPhase phase = SessionPhase::Doze;
    SimTime actual_wake = 0;
    std::optional<SimTime> doze_at;
    std::optional<SimTime> delivered_at; // end of the ACK that confirmed the data frame
    bool awake = false;
};

struct PendingTrigger
{
    NodeId sta = 0;
    SimTime due_at = 0;
};

/// AP side of the polling exchanges. Triggers leave in due order and at most
/// one exchange is in service.
struct ApPollState
{
    std::deque<PendingTrigger> trigger_queue;
    std::optional<PendingTrigger> in_service;
    bool trigger_sent = false;
    bool awaiting_response = false;
};

} // namespace twtsim
