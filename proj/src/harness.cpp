#include "twtsim/harness.hpp"

#include "twtsim/errors.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace twtsim
{

Summary summarize(const std::vector<std::optional<double>> &values)
{
    Summary s;
    double sum = 0.0;
    for (const auto &v : values)
    {
        if (!v)
        {
            ++s.exclusions;
            continue;
        }
        sum += *v;
        ++s.count;
    }
    if (s.count == 0)
        return s;
    const double mean = sum / static_cast<double>(s.count);
    s.mean = mean;
    if (s.count >= 2)
    {
        double ss = 0.0;
        for (const auto &v : values)
            if (v)
                ss += (*v - mean) * (*v - mean);
        s.stddev = std::sqrt(ss / static_cast<double>(s.count - 1));
    }
    return s;
}

Summary summarize(const std::vector<double> &values)
{
    return summarize(std::vector<std::optional<double>>(values.begin(), values.end()));
}

ScenarioResult run_scenario(const ScenarioConfig &config, unsigned threads)
{
    config.validate();
    const std::size_t reps = config.replications;
    std::vector<ReplicationMetrics> results(reps);

    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, reps));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;)
        {
            const std::size_t r = next.fetch_add(1);
            if (r >= reps)
                return;
            try
            {
                results[r] = run_replication(config, config.master_seed + r);
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = reps;
                return;
            }
        }
    };
    if (threads <= 1)
    {
        worker();
    }
    else
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);

    ScenarioResult out{config, std::move(results), {}, {}, {}, {}, {}};
    std::vector<double> pdr, energy, collisions, hidden;
    std::vector<std::optional<double>> txn;
    for (const ReplicationMetrics &m : out.replications)
    {
        pdr.push_back(m.pdr);
        energy.push_back(m.mean_energy_mj);
        collisions.push_back(static_cast<double>(m.collisions));
        hidden.push_back(static_cast<double>(m.hidden_pairs));
        txn.push_back(m.txn_time_us);
    }
    out.pdr = summarize(pdr);
    out.txn_time_us = summarize(txn);
    out.energy_mj = summarize(energy);
    out.collisions = summarize(collisions);
    out.hidden_pairs = summarize(hidden);
    return out;
}

std::string csv_header()
{
    return "mode,n,mu_us,sigma_us,cw_min,awake_offset_us,radius_m,capture,replications,pdr_mean,pdr_std,"
           "txn_time_us_mean,txn_time_us_std,txn_time_exclusions,energy_mj_mean,energy_mj_std,collisions_mean,"
           "hidden_pairs_mean,seed\n";
}

namespace
{

std::string opt(const std::optional<double> &v)
{
    return v ? format_double(*v) : std::string{};
}

} // namespace

std::string csv_row(const ScenarioResult &r)
{
    const ScenarioConfig &c = r.config;
    std::string row;
    auto add = [&row](const std::string &field) {
        if (!row.empty())
            row += ',';
        row += field;
    };
    add(std::string(to_string(c.mode)));
    add(std::to_string(c.n));
    add(std::to_string(c.mu));
    add(format_double(c.sigma));
    add(std::to_string(c.edca.cw_min));
    add(std::to_string(c.awake_offset));
    add(format_double(c.placement_radius));
    add(c.capture ? "true" : "false");
    add(std::to_string(c.replications));
    add(opt(r.pdr.mean));
    add(opt(r.pdr.stddev));
    add(opt(r.txn_time_us.mean));
    add(opt(r.txn_time_us.stddev));
    add(std::to_string(r.txn_time_us.exclusions));
    add(opt(r.energy_mj.mean));
    add(opt(r.energy_mj.stddev));
    add(opt(r.collisions.mean));
    add(opt(r.hidden_pairs.mean));
    add(std::to_string(c.master_seed));
    return row + "\n";
}

std::vector<std::string> split_values(std::string_view list)
{
    std::vector<std::string> out;
    while (true)
    {
        const auto comma = list.find(',');
        std::string_view item = list.substr(0, comma);
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first != std::string_view::npos)
            out.emplace_back(item.substr(first, last - first + 1));
        if (comma == std::string_view::npos)
            break;
        list = list.substr(comma + 1);
    }
    return out;
}

std::string sweep(const ScenarioConfig &base, std::string_view axis, const std::vector<std::string> &values,
                  unsigned threads)
{
    if (values.empty())
        throw ConfigError("sweep needs at least one value");
    std::vector<ScenarioConfig> configs;
    for (const std::string &v : values)
    {
        ScenarioConfig c = base;
        set_field(c, axis, v);
        c.validate();
        configs.push_back(c);
    }
    std::string out = csv_header();
    for (const ScenarioConfig &c : configs)
        out += csv_row(run_scenario(c, threads));
    return out;
}

} // namespace twtsim
