#include "twtsim/scenario.hpp"

#include "twtsim/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace twtsim
{

namespace
{

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view value)
{
    Int out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ConfigError("invalid integer for '" + std::string(key) + "': '" + std::string(value) + "'");
    return out;
}

double parse_real(std::string_view key, std::string_view value)
{
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(out))
        throw ConfigError("invalid number for '" + std::string(key) + "': '" + std::string(value) + "'");
    return out;
}

bool parse_bool(std::string_view key, std::string_view value)
{
    if (value == "true" || value == "1")
        return true;
    if (value == "false" || value == "0")
        return false;
    throw ConfigError("invalid boolean for '" + std::string(key) + "': '" + std::string(value) + "'");
}

TwtMode parse_mode(std::string_view value)
{
    if (value == "PM")
        return TwtMode::Polling;
    if (value == "NPM")
        return TwtMode::NonPolling;
    throw ConfigError("mode must be PM or NPM, got '" + std::string(value) + "'");
}

struct Field
{
    std::string key;
    std::function<void(ScenarioConfig &, std::string_view)> set;
    std::function<std::string(const ScenarioConfig &)> get;
};

template <typename T>
Field int_field(std::string key, T ScenarioConfig::*member)
{
    return {key, [key, member](ScenarioConfig &c, std::string_view v) { c.*member = parse_int<T>(key, v); },
            [member](const ScenarioConfig &c) { return std::to_string(c.*member); }};
}

Field real_field(std::string key, double ScenarioConfig::*member)
{
    return {key, [key, member](ScenarioConfig &c, std::string_view v) { c.*member = parse_real(key, v); },
            [member](const ScenarioConfig &c) { return format_double(c.*member); }};
}

template <typename Sub, typename T>
Field nested_int(std::string key, Sub ScenarioConfig::*outer, T Sub::*member)
{
    return {key,
            [key, outer, member](ScenarioConfig &c, std::string_view v) { (c.*outer).*member = parse_int<T>(key, v); },
            [outer, member](const ScenarioConfig &c) { return std::to_string((c.*outer).*member); }};
}

template <typename Sub>
Field nested_real(std::string key, Sub ScenarioConfig::*outer, double Sub::*member)
{
    return {key,
            [key, outer, member](ScenarioConfig &c, std::string_view v) { (c.*outer).*member = parse_real(key, v); },
            [outer, member](const ScenarioConfig &c) { return format_double((c.*outer).*member); }};
}

const std::vector<Field> &fields()
{
    static const std::vector<Field> table = [] {
        std::vector<Field> f;
        f.push_back({"mode", [](ScenarioConfig &c, std::string_view v) { c.mode = parse_mode(v); },
                     [](const ScenarioConfig &c) { return std::string(to_string(c.mode)); }});
        f.push_back(int_field("n", &ScenarioConfig::n));
        f.push_back(int_field("mu_us", &ScenarioConfig::mu));
        f.push_back(real_field("sigma_us", &ScenarioConfig::sigma));
        f.push_back(nested_int("cw_min", &ScenarioConfig::edca, &EdcaParams::cw_min));
        f.push_back(nested_int("cw_max", &ScenarioConfig::edca, &EdcaParams::cw_max));
        f.push_back(nested_int("retry_limit", &ScenarioConfig::edca, &EdcaParams::retry_limit));
        f.push_back(int_field("awake_offset_us", &ScenarioConfig::awake_offset));
        f.push_back(int_field("sp_duration_us", &ScenarioConfig::sp_duration));
        f.push_back(int_field("t_target_us", &ScenarioConfig::t_target));
        f.push_back(real_field("radius_m", &ScenarioConfig::placement_radius));
        f.push_back({"capture", [](ScenarioConfig &c, std::string_view v) { c.capture = parse_bool("capture", v); },
                     [](const ScenarioConfig &c) { return std::string(c.capture ? "true" : "false"); }});
        f.push_back(real_field("capture_threshold_db", &ScenarioConfig::capture_threshold_db));
        f.push_back(int_field("data_duration_us", &ScenarioConfig::data_duration));
        f.push_back(int_field("trigger_duration_us", &ScenarioConfig::trigger_duration));
        f.push_back(int_field("response_timeout_us", &ScenarioConfig::response_timeout));
        f.push_back(nested_int("slot_us", &ScenarioConfig::edca, &EdcaParams::slot));
        f.push_back(nested_int("sifs_us", &ScenarioConfig::edca, &EdcaParams::sifs));
        f.push_back(nested_int("aifs_us", &ScenarioConfig::edca, &EdcaParams::aifs));
        f.push_back(nested_int("ack_duration_us", &ScenarioConfig::edca, &EdcaParams::ack_duration));
        f.push_back(nested_int("ack_timeout_us", &ScenarioConfig::edca, &EdcaParams::ack_timeout));
        f.push_back(nested_real("sense_range_m", &ScenarioConfig::propagation, &PropagationParams::sense_range_m));
        f.push_back(nested_real("tx_power_dbm", &ScenarioConfig::propagation, &PropagationParams::tx_power_dbm));
        f.push_back(
            nested_real("reference_loss_db", &ScenarioConfig::propagation, &PropagationParams::reference_loss_db));
        f.push_back(
            nested_real("path_loss_exponent", &ScenarioConfig::propagation, &PropagationParams::path_loss_exponent));
        f.push_back(nested_real("p_tx_mw", &ScenarioConfig::power, &PowerProfile::p_tx));
        f.push_back(nested_real("p_rx_mw", &ScenarioConfig::power, &PowerProfile::p_rx));
        f.push_back(nested_real("p_idle_mw", &ScenarioConfig::power, &PowerProfile::p_idle));
        f.push_back(nested_real("p_doze_mw", &ScenarioConfig::power, &PowerProfile::p_doze));
        f.push_back(int_field("replications", &ScenarioConfig::replications));
        f.push_back(int_field("seed", &ScenarioConfig::master_seed));
        return f;
    }();
    return table;
}

const Field &find_field(std::string_view key)
{
    for (const Field &f : fields())
        if (f.key == key)
            return f;
    throw ConfigError("unknown config key '" + std::string(key) + "'");
}

} // namespace

std::string format_double(double value)
{
    char buf[64];
    // integral values print without an exponent
    const bool integral = std::isfinite(value) && std::abs(value) < 1e15 && value == std::trunc(value);
    const auto [ptr, ec] = integral ? std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed)
                                    : std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{})
        throw FatalError("format_double failed");
    return std::string(buf, ptr);
}

void ScenarioConfig::validate() const
{
    if (n < 1)
        throw ConfigError("n must be at least 1");
    if (mu < 0)
        throw ConfigError("mu_us must be non-negative");
    if (!(sigma >= 0.0))
        throw ConfigError("sigma_us must be non-negative");
    if (awake_offset < 0)
        throw ConfigError("awake_offset_us must be non-negative");
    if (sp_duration <= 0)
        throw ConfigError("sp_duration_us must be positive");
    if (t_target < 0)
        throw ConfigError("t_target_us must be non-negative");
    if (!(placement_radius > 0.0))
        throw ConfigError("radius_m must be positive");
    if (data_duration <= 0 || trigger_duration <= 0)
        throw ConfigError("frame durations must be positive");
    if (response_timeout <= edca.sifs)
        throw ConfigError("response_timeout_us must exceed sifs_us");
    if (!(capture_threshold_db >= 0.0))
        throw ConfigError("capture_threshold_db must be non-negative");
    if (!(propagation.sense_range_m > 0.0) || !(propagation.path_loss_exponent > 0.0))
        throw ConfigError("sense_range_m and path_loss_exponent must be positive");
    if (replications < 1)
        throw ConfigError("replications must be at least 1");
    edca.validate();
    power.validate();
}

const std::vector<std::string> &config_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const Field &f : fields())
            k.push_back(f.key);
        return k;
    }();
    return keys;
}

void set_field(ScenarioConfig &config, std::string_view key, std::string_view value)
{
    find_field(key).set(config, trim(value));
}

std::string get_field(const ScenarioConfig &config, std::string_view key)
{
    return find_field(key).get(config);
}

ScenarioConfig parse_config(std::string_view text)
{
    ScenarioConfig config;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    while (!text.empty())
    {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        if (!seen.insert(std::string(key)).second)
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
        try
        {
            set_field(config, key, value);
        }
        catch (const ConfigError &e)
        {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    config.validate();
    return config;
}

ScenarioConfig load_config(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string normalized_config(const ScenarioConfig &config)
{
    std::string out;
    for (const Field &f : fields())
        out += f.key + " = " + f.get(config) + "\n";
    return out;
}

} // namespace twtsim
