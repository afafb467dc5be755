#pragma once

#include "twtsim/edca.hpp"
#include "twtsim/energy.hpp"
#include "twtsim/radio_medium.hpp"
#include "twtsim/twt.hpp"
#include "twtsim/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace twtsim
{

/// Everything a replication needs. Durations are microseconds.
struct ScenarioConfig
{
    TwtMode mode = TwtMode::NonPolling;
    std::size_t n = 20;
    SimTime mu = 5000;
    double sigma = 1000.0;
    SimTime awake_offset = 0;
    SimTime sp_duration = kSecond;
    SimTime t_target = kSecond;
    double placement_radius = 5.0;
    bool capture = false;
    SimTime data_duration = 1480;
    SimTime trigger_duration = 140;
    SimTime response_timeout = 25; // SIFS + slot
    EdcaParams edca;
    PropagationParams propagation;
    double capture_threshold_db = 10.0;
    PowerProfile power;
    std::size_t replications = 1000;
    std::uint64_t master_seed = 1;

    CaptureParams capture_params() const { return {capture, capture_threshold_db}; }
    DriftModel drift() const { return {sigma}; }

    /// Throws ConfigError on any violated invariant.
    void validate() const;
};

/// Config keys in canonical order.
const std::vector<std::string> &config_keys();

/// Sets one field from its textual value. Throws ConfigError on an unknown
/// key or malformed value.
void set_field(ScenarioConfig &config, std::string_view key, std::string_view value);
std::string get_field(const ScenarioConfig &config, std::string_view key);

/// Parses `key = value` lines; `#` starts a comment. Unknown keys and
/// repeated keys are rejected. The result is validated.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path &path);

/// Every key in canonical order, one `key = value` per line.
std::string normalized_config(const ScenarioConfig &config);

/// Shortest decimal text that round-trips to `value`.
std::string format_double(double value);

} // namespace twtsim
