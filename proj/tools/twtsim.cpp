#include "twtsim/errors.hpp"
#include "twtsim/harness.hpp"
#include "twtsim/scenario.hpp"
#include "twtsim/trace.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace
{

constexpr int kExitConfig = 2;
constexpr int kExitFatal = 3;

void write_output(const std::string &text, const std::string &path)
{
    if (path.empty())
    {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw twtsim::ConfigError("cannot write '" + path + "'");
    out << text;
}

twtsim::ScenarioConfig load(const std::string &path, const std::optional<std::uint64_t> &seed)
{
    twtsim::ScenarioConfig config = twtsim::load_config(path);
    if (seed)
        config.master_seed = *seed;
    return config;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Target Wake Time uplink simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string trace_path;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::string axis;
    std::string values;

    auto *run = app.add_subcommand("run", "Run every replication of one scenario and print one CSV row");
    run->add_option("--config", config_path, "Scenario file")->required();
    run->add_option("--seed", seed, "Override the master seed");
    run->add_option("--out", out_path, "CSV output path (stdout if omitted)");
    run->add_option("--trace", trace_path, "Write the event log of replication 0 here");
    run->add_option("--threads", threads, "Worker threads (0 = all cores)");

    auto *sw = app.add_subcommand("sweep", "Vary one config key and print one CSV row per value");
    sw->add_option("--config", config_path, "Scenario file")->required();
    sw->add_option("--axis", axis, "Config key to vary")->required();
    sw->add_option("--values", values, "Comma-separated values")->required();
    sw->add_option("--seed", seed, "Override the master seed");
    sw->add_option("--out", out_path, "CSV output path (stdout if omitted)");
    sw->add_option("--threads", threads, "Worker threads (0 = all cores)");

    auto *validate = app.add_subcommand("validate", "Check a scenario file and print it normalized");
    validate->add_option("--config", config_path, "Scenario file")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try
    {
        if (*validate)
        {
            std::cout << twtsim::normalized_config(twtsim::load_config(config_path));
            return 0;
        }
        const twtsim::ScenarioConfig config = load(config_path, seed);
        if (*run)
        {
            if (!trace_path.empty())
            {
                std::ofstream trace_out(trace_path, std::ios::binary);
                if (!trace_out)
                    throw twtsim::ConfigError("cannot write '" + trace_path + "'");
                twtsim::StreamTrace trace(trace_out);
                twtsim::run_replication(config, config.master_seed, &trace);
            }
            const auto result = twtsim::run_scenario(config, threads);
            write_output(twtsim::csv_header() + twtsim::csv_row(result), out_path);
        }
        else if (*sw)
        {
            write_output(twtsim::sweep(config, axis, twtsim::split_values(values), threads), out_path);
        }
    }
    catch (const twtsim::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const std::exception &e)
    {
        std::cerr << "fatal: " << e.what() << '\n';
        return kExitFatal;
    }
    return 0;
}
