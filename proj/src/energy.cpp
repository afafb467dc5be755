#include "twtsim/energy.hpp"

#include "twtsim/errors.hpp"

#include <string>

namespace twtsim
{

std::string_view to_string(RadioState state)
{
    switch (state)
    {
    case RadioState::Tx: return "tx";
    case RadioState::Rx: return "rx";
    case RadioState::Idle: return "idle";
    case RadioState::Doze: return "doze";
    }
    return "unknown";
}

double PowerProfile::power(RadioState state) const
{
    switch (state)
    {
    case RadioState::Tx: return p_tx;
    case RadioState::Rx: return p_rx;
    case RadioState::Idle: return p_idle;
    case RadioState::Doze: return p_doze;
    }
    return 0.0;
}

void PowerProfile::validate() const
{
    if (!(p_tx >= p_rx && p_rx >= p_idle && p_idle > p_doze && p_doze >= 0.0))
        throw ConfigError("power profile must satisfy p_tx >= p_rx >= p_idle > p_doze >= 0");
}

void EnergyLedger::record_state(std::size_t sta, RadioState state, SimTime from, SimTime to)
{
    auto &list = intervals_.at(sta);
    const SimTime expected = list.empty() ? 0 : list.back().end;
    if (from != expected || to < from)
        throw FatalError("ledger for station index " + std::to_string(sta) + ": interval [" + std::to_string(from) +
                         ", " + std::to_string(to) + ") does not continue from " + std::to_string(expected));
    list.push_back({state, from, to});
}

SimTime EnergyLedger::covered_until(std::size_t sta) const
{
    const auto &list = intervals_.at(sta);
    return list.empty() ? 0 : list.back().end;
}

double EnergyLedger::station_energy(std::size_t sta, const PowerProfile &profile) const
{
    double total = 0.0;
    for (const StateInterval &iv : intervals_.at(sta))
        total += energy_mj(profile.power(iv.state), iv.end - iv.start);
    return total;
}

SimTime EnergyLedger::time_in(std::size_t sta, RadioState state) const
{
    SimTime total = 0;
    for (const StateInterval &iv : intervals_.at(sta))
        if (iv.state == state)
            total += iv.end - iv.start;
    return total;
}

double mean_station_energy(const EnergyLedger &ledger, const PowerProfile &profile)
{
    if (ledger.stations() == 0)
        throw FatalError("mean_station_energy: no stations");
    double sum = 0.0;
    for (std::size_t i = 0; i < ledger.stations(); ++i)
        sum += ledger.station_energy(i, profile);
    return sum / static_cast<double>(ledger.stations());
}

} // namespace twtsim
