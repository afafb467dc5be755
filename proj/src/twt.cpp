#include "twtsim/twt.hpp"

#include "twtsim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace twtsim
{

std::string_view to_string(TwtMode mode)
{
    return mode == TwtMode::Polling ? "PM" : "NPM";
}

std::string_view to_string(SessionPhase phase)
{
    switch (phase)
    {
    case SessionPhase::Doze: return "doze";
    case SessionPhase::AwaitingTrigger: return "awaiting-trigger";
    case SessionPhase::Contending: return "contending";
    case SessionPhase::Exchanging: return "exchanging";
    case SessionPhase::Done: return "done";
    case SessionPhase::Failed: return "failed";
    }
    return "unknown";
}

Schedule build_schedule(std::size_t n, SimTime t_target, SimTime mu, TwtMode mode, SimTime awake_offset,
                        SimTime sp_duration)
{
    if (n < 1)
        throw ConfigError("schedule needs at least one station");
    if (mu < 0)
        throw ConfigError("TWT step must be non-negative");
    if (sp_duration <= 0)
        throw ConfigError("service period must be positive");
    if (awake_offset < 0)
        throw ConfigError("awake offset must be non-negative");

    Schedule s{t_target, mu, {}};
    s.agreements.reserve(n);
    const bool polling = mode == TwtMode::Polling;
    for (std::size_t i = 0; i < n; ++i)
    {
        s.agreements.push_back(TwtAgreement{
            .sta = static_cast<NodeId>(i + 1),
            .twt = t_target + static_cast<SimTime>(i) * mu,
            .sp_duration = sp_duration,
            .trigger_flag = polling,
            .awake_offset = polling ? awake_offset : 0,
        });
    }
    return s;
}

SimTime sample_wake(const TwtAgreement &agreement, const DriftModel &drift, RngStream &stream)
{
    const double d = stream.normal(0.0, drift.sigma_us);
    const SimTime wake = agreement.target_wake() + static_cast<SimTime>(std::llround(d));
    return std::max<SimTime>(wake, 0);
}

double standard_normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double pm_delivery_probability_limit(SimTime awake_offset, double sigma_us, const EdcaParams &ap_edca)
{
    if (!(sigma_us > 0.0))
        throw FatalError("pm_delivery_probability_limit: sigma must be positive");
    double sum = 0.0;
    for (int b = 0; b <= ap_edca.cw_min; ++b)
    {
        const double lead = static_cast<double>(awake_offset + ap_edca.aifs + b * ap_edca.slot);
        sum += standard_normal_cdf(lead / sigma_us);
    }
    return sum / (ap_edca.cw_min + 1);
}

} // namespace twtsim
