#pragma once

#include "twtsim/replication.hpp"
#include "twtsim/scenario.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace twtsim
{

/// Unbiased sample statistics over the present values.
struct Summary
{
    std::optional<double> mean;
    std::optional<double> stddev; // absent for fewer than two values
    std::size_t count = 0;
    std::size_t exclusions = 0; // absent inputs skipped
};

Summary summarize(const std::vector<std::optional<double>> &values);
Summary summarize(const std::vector<double> &values);

struct ScenarioResult
{
    ScenarioConfig config;
    std::vector<ReplicationMetrics> replications; // in replication-index order
    Summary pdr;
    Summary txn_time_us;
    Summary energy_mj;
    Summary collisions;
    Summary hidden_pairs;
};

/// Replication r uses seed master_seed + r. Replications run on up to
/// `threads` workers (0 = hardware concurrency); results do not depend on it.
ScenarioResult run_scenario(const ScenarioConfig &config, unsigned threads = 0);

std::string csv_header();
std::string csv_row(const ScenarioResult &result);

/// One CSV row per value, in the given order, header first.
std::string sweep(const ScenarioConfig &base, std::string_view axis, const std::vector<std::string> &values,
                  unsigned threads = 0);

/// Splits "a,b,c" into trimmed, non-empty items.
std::vector<std::string> split_values(std::string_view list);

} // namespace twtsim
