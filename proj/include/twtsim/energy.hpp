#pragma once

#include "twtsim/types.hpp"

#include <string_view>
#include <vector>

namespace twtsim
{

enum class RadioState
{
    Tx,
    Rx,
    Idle,
    Doze,
};

std::string_view to_string(RadioState state);

/// Milliwatts per radio state.
struct PowerProfile
{
    double p_tx = 280.0;
    double p_rx = 180.0;
    double p_idle = 120.0;
    double p_doze = 0.012;

    double power(RadioState state) const;
    /// Throws ConfigError unless p_tx >= p_rx >= p_idle > p_doze >= 0.
    void validate() const;
};

struct StateInterval
{
    RadioState state = RadioState::Doze;
    SimTime start = 0;
    SimTime end = 0;
};

/// Per-station radio-state history. Each station's intervals must be
/// contiguous from t = 0.
class EnergyLedger
{
public:
    explicit EnergyLedger(std::size_t stations) : intervals_(stations) {}

    std::size_t stations() const { return intervals_.size(); }

    /// Station index is 0-based. Throws FatalError on a gap or overlap.
    void record_state(std::size_t sta, RadioState state, SimTime from, SimTime to);

    const std::vector<StateInterval> &intervals(std::size_t sta) const { return intervals_.at(sta); }
    SimTime covered_until(std::size_t sta) const;

    /// Millijoules.
    double station_energy(std::size_t sta, const PowerProfile &profile) const;
    SimTime time_in(std::size_t sta, RadioState state) const;

private:
    std::vector<std::vector<StateInterval>> intervals_;
};

double mean_station_energy(const EnergyLedger &ledger, const PowerProfile &profile);

/// Energy of `duration_us` at `power_mw`, in millijoules.
inline double energy_mj(double power_mw, SimTime duration_us)
{
    return power_mw * static_cast<double>(duration_us) * 1e-6;
}

} // namespace twtsim
