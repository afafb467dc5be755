#pragma once

#include "twtsim/energy.hpp"
#include "twtsim/radio_medium.hpp"
#include "twtsim/scenario.hpp"
#include "twtsim/trace.hpp"
#include "twtsim/twt.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace twtsim
{

struct ReplicationMetrics
{
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::size_t delivered = 0;
    double pdr = 0.0;
    /// End of the last confirmed delivery minus the first TWT; absent without deliveries.
    std::optional<double> txn_time_us;
    double mean_energy_mj = 0.0;
    std::size_t collisions = 0; // frames lost to overlap at the AP
    std::size_t hidden_pairs = 0;
    SimTime run_end = 0;
};

/// Test seams. Production runs leave everything empty.
struct SimulationHooks
{
    /// Replaces a backoff draw when it returns a value.
    std::function<std::optional<int>(NodeId node, int retry, int cw)> backoff_override;
    /// Replaces the random topology; index 0 is the AP.
    std::optional<std::vector<Position>> positions;
    TraceSink *trace = nullptr;
};

/// One seeded run of a scenario: topology, schedule, drift, then the event
/// loop until every station is done and the channel is quiet.
class Replication
{
public:
    Replication(const ScenarioConfig &config, std::uint64_t seed, SimulationHooks hooks = {});
    ~Replication();

    Replication(const Replication &) = delete;
    Replication &operator=(const Replication &) = delete;

    /// Runs to quiescence. Call once.
    ReplicationMetrics run();

    const Schedule &schedule() const;
    const RadioMedium &medium() const;
    const EnergyLedger &ledger() const;
    /// Indexed by station (station id minus one).
    const std::vector<StaSession> &sessions() const;
    /// Transmission attempts per station for its data frame.
    const std::vector<int> &attempts() const;

private:
    class Engine;
    std::unique_ptr<Engine> engine_;
};

ReplicationMetrics run_replication(const ScenarioConfig &config, std::uint64_t seed, TraceSink *trace = nullptr);

} // namespace twtsim
