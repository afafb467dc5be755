// Acceptance suite: one PASS/FAIL line per criterion. Exit status is 0 only if
// every criterion passes.

#include "twtsim/edca.hpp"
#include "twtsim/harness.hpp"
#include "twtsim/replication.hpp"
#include "twtsim/trace.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace twtsim;

namespace
{

constexpr SimTime kAifs = 34, kSlot = 9, kSifs = 16, kAck = 44, kData = 1480, kAckTimeout = 69;
// AIFS + CW_min slots + data + SIFS + ACK: the longest collision-free NPM exchange
constexpr SimTime kExchangeSpan = kAifs + 15 * kSlot + kData + kSifs + kAck;

struct Verdict
{
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string &what)
    {
        if (!ok)
        {
            pass = false;
            if (!detail.empty())
                detail += "; ";
            detail += what;
        }
    }
    void note(const std::string &what)
    {
        if (!detail.empty())
            detail += "; ";
        detail += what;
    }
};

std::string fmt(double v, int digits = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// Every scenario an acceptance criterion ran, for the determinism and PM checks.
struct Ledger
{
    std::vector<std::pair<ScenarioConfig, std::string>> runs;
    std::size_t pm_runs = 0;
    std::size_t pm_collisions = 0;

    ScenarioResult run(const ScenarioConfig &c)
    {
        ScenarioResult r = run_scenario(c);
        runs.emplace_back(c, csv_header() + csv_row(r));
        if (c.mode == TwtMode::Polling)
            for (const auto &m : r.replications)
            {
                ++pm_runs;
                pm_collisions += m.collisions;
            }
        return r;
    }
};

ScenarioConfig npm(std::size_t n, SimTime mu, double sigma, std::size_t reps)
{
    ScenarioConfig c;
    c.mode = TwtMode::NonPolling;
    c.n = n;
    c.mu = mu;
    c.sigma = sigma;
    c.replications = reps;
    return c;
}

double phi(double z)
{
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

// ---------------------------------------------------------------------------

Verdict edca_oracles()
{
    Verdict v;
    const SimTime exchange = kData + kSifs + kAck;

    for (int b = 0; b <= 15; ++b)
    {
        SimulationHooks h;
        h.backoff_override = [b](NodeId, int, int) -> std::optional<int> { return b; };
        Replication r(npm(1, 0, 0.0, 1), 1, h);
        const auto m = r.run();
        const SimTime expect = kAifs + b * kSlot + exchange;
        v.require(m.txn_time_us && *m.txn_time_us == static_cast<double>(expect),
                  "single b=" + std::to_string(b));
        v.require(r.sessions()[0].doze_at == r.sessions()[0].actual_wake + expect, "single doze b=" + std::to_string(b));
    }

    // Two stations 4 m apart, waking together. After a collision station 1
    // redraws 0 and station 2 redraws 1.
    int checked = 0;
    for (int b1 = 0; b1 <= 7; ++b1)
    {
        for (int b2 = 0; b2 <= 7; ++b2)
        {
            SimulationHooks h;
            h.positions = std::vector<Position>{{0, 0}, {2, 0}, {-2, 0}};
            h.backoff_override = [b1, b2](NodeId node, int retry, int) -> std::optional<int> {
                if (retry == 0)
                    return node == 1 ? b1 : b2;
                return node == 1 ? 0 : 1;
            };
            auto c = npm(2, 0, 0.0, 1);
            Replication r(c, 1, h);
            const auto m = r.run();
            const SimTime t = c.t_target;

            SimTime done1 = 0, done2 = 0;
            std::size_t collisions = 0;
            if (b1 != b2)
            {
                const int lo = std::min(b1, b2), hi = std::max(b1, b2);
                const SimTime winner_end = t + kAifs + lo * kSlot + exchange;
                const SimTime loser_end = winner_end + kAifs + (hi - lo) * kSlot + exchange;
                done1 = b1 < b2 ? winner_end : loser_end;
                done2 = b1 < b2 ? loser_end : winner_end;
            }
            else
            {
                const SimTime data_end = t + kAifs + b1 * kSlot + kData;
                done1 = data_end + kAckTimeout + exchange;
                done2 = done1 + kAifs + kSlot + exchange;
                collisions = 2;
            }
            const auto &s = r.sessions();
            const bool ok = m.pdr == 1.0 && s[0].delivered_at == done1 && s[1].delivered_at == done2 &&
                            m.collisions == collisions && r.attempts()[0] == (b1 == b2 ? 2 : 1) &&
                            r.attempts()[1] == (b1 == b2 ? 2 : 1);
            v.require(ok, "pair (" + std::to_string(b1) + "," + std::to_string(b2) + ")");
            ++checked;
        }
    }
    v.note("16 single-station timelines, " + std::to_string(checked) + " two-station timelines");
    return v;
}

Verdict cw_recurrence()
{
    Verdict v;
    Kernel kernel;
    std::vector<int> cws;
    int transmissions = 0;
    bool dropped = false;
    EdcaParams params;
    EdcaMachine *self = nullptr;
    EdcaMachine mac(1, params, kernel,
                    EdcaMachine::Hooks{[&](const Frame &) {
                                           ++transmissions;
                                           kernel.schedule_in(kData, EventKind::TxEnd, 1,
                                                              [&] { self->on_tx_end(kernel.now()); });
                                       },
                                       [] {}, [&] { dropped = true; },
                                       [&](int, int cw) {
                                           cws.push_back(cw);
                                           return cw / 2;
                                       }});
    self = &mac;
    kernel.schedule(0, EventKind::Generic, 1, [&] { mac.enqueue(Frame{FrameKind::Data, 1, 0, 1}, true, true, 0); });
    kernel.run();
    cws.push_back(mac.state().cw);

    const std::vector<int> expect{15, 31, 63, 127, 255, 511, 1023, 1023};
    std::string got;
    for (int cw : cws)
        got += (got.empty() ? "" : ",") + std::to_string(cw);
    v.require(cws == expect, "trajectory " + got);
    v.require(dropped && mac.state().phase == EdcaPhase::Dropped, "not dropped");
    v.require(mac.state().retry == 7, "retry " + std::to_string(mac.state().retry));
    v.require(transmissions == 7, "attempts " + std::to_string(transmissions));
    v.note("cw " + got + ", dropped at retry " + std::to_string(mac.state().retry));
    return v;
}

Verdict pm_saturation(Ledger &ledger)
{
    Verdict v;
    auto c = npm(20, 100'000, 10'000.0, 500);
    c.mode = TwtMode::Polling;
    c.awake_offset = 30'000;
    const auto r = ledger.run(c);

    // the trigger preamble starts AIFS + b slots after the TWT, b uniform on [0, 15]
    double oracle = 0;
    for (int b = 0; b <= 15; ++b)
        oracle += phi((30'000.0 + kAifs + b * kSlot) / 10'000.0);
    oracle /= 16.0;

    const double pdr = *r.pdr.mean;
    v.require(pdr >= 0.9956, "PDR below 0.9956");
    v.require(std::abs(pdr - oracle) <= 0.01, "PDR off the oracle by more than 0.01");
    v.note("PDR " + fmt(pdr, 6) + " over " + std::to_string(20 * c.replications) + " wakes, oracle " + fmt(oracle, 6));
    return v;
}

Verdict npm_linear(Ledger &ledger)
{
    Verdict v;
    const auto r = ledger.run(npm(20, 5000, 1000.0, 1000));
    const double target = 19.0 * 5000 + 1637;
    const double txn = *r.txn_time_us.mean;
    v.require(*r.pdr.mean >= 0.999, "PDR below 0.999");
    v.require(std::abs(txn - target) <= 0.03 * target, "txn time outside 3%");
    v.note("PDR " + fmt(*r.pdr.mean, 6) + ", txn " + fmt(txn, 6) + " us vs " + fmt(target, 6) + " us (" +
           fmt(100.0 * (txn - target) / target, 3) + "%)");
    return v;
}

Verdict npm_avalanche(Ledger &ledger)
{
    Verdict v;
    const auto r = ledger.run(npm(20, kData / 2, 10'000.0, 1000));
    v.require(*r.pdr.mean < 0.95, "PDR not below 0.95");
    v.note("PDR " + fmt(*r.pdr.mean, 6) + ", collisions per run " + fmt(*r.collisions.mean));
    return v;
}

Verdict energy_ordering(Ledger &ledger)
{
    Verdict v;
    const double sigma = 1000.0;
    double best_npm = 1e300, best_pm = 1e300;
    std::string npm_at, pm_at;
    for (int k : {2, 4, 8, 16})
    {
        const SimTime mu = k * kExchangeSpan;
        for (int cw : {15, 63, 255, 1023})
        {
            auto c = npm(20, mu, sigma, 200);
            c.edca.cw_min = cw;
            const double e = *ledger.run(c).energy_mj.mean;
            if (e < best_npm)
            {
                best_npm = e;
                npm_at = "mu=" + std::to_string(mu) + " cw_min=" + std::to_string(cw);
            }
        }
        for (int offsets : {0, 1, 2, 3})
        {
            auto c = npm(20, mu, sigma, 200);
            c.mode = TwtMode::Polling;
            c.awake_offset = static_cast<SimTime>(offsets * sigma);
            const double e = *ledger.run(c).energy_mj.mean;
            if (e < best_pm)
            {
                best_pm = e;
                pm_at = "mu=" + std::to_string(mu) + " offset=" + std::to_string(c.awake_offset);
            }
        }
    }
    v.require(best_npm < best_pm, "NPM minimum not below PM minimum");
    v.note("NPM min " + fmt(best_npm) + " mJ (" + npm_at + "), PM min " + fmt(best_pm) + " mJ (" + pm_at + ")");
    return v;
}

Verdict capture_benefit(Ledger &ledger)
{
    Verdict v;
    auto off = npm(20, kExchangeSpan, 1000.0, 300);
    off.placement_radius = 50;
    auto on = off;
    on.capture = true;
    const auto r_off = ledger.run(off);
    const auto r_on = ledger.run(on);
    const double e_off = *r_off.energy_mj.mean, e_on = *r_on.energy_mj.mean;
    const double ratio = e_off / e_on;
    v.require(e_on <= e_off, "capture raised energy");
    v.require(ratio >= 1.15, "energy ratio below 1.15");

    auto pm_off = off;
    pm_off.mode = TwtMode::Polling;
    pm_off.awake_offset = 3000;
    auto pm_on = pm_off;
    pm_on.capture = true;
    const auto p_off = ledger.run(pm_off);
    const auto p_on = ledger.run(pm_on);
    bool same = true;
    std::size_t pm_collisions = 0;
    for (std::size_t i = 0; i < p_off.replications.size(); ++i)
    {
        const auto &a = p_off.replications[i], &b = p_on.replications[i];
        same = same && a.pdr == b.pdr && a.txn_time_us == b.txn_time_us && a.mean_energy_mj == b.mean_energy_mj;
        pm_collisions += a.collisions + b.collisions;
    }
    v.require(same, "capture changed a PM run");
    v.require(pm_collisions == 0, "PM collisions");
    v.note("energy " + fmt(e_off) + " -> " + fmt(e_on) + " mJ, ratio " + fmt(ratio) + ", PDR " + fmt(*r_off.pdr.mean) +
           " -> " + fmt(*r_on.pdr.mean) + ", hidden pairs " + fmt(*r_off.hidden_pairs.mean) +
           "; PM unchanged by capture");
    return v;
}

Verdict pm_no_collisions(const Ledger &ledger)
{
    Verdict v;
    v.require(ledger.pm_collisions == 0, std::to_string(ledger.pm_collisions) + " PM collisions");
    v.note(std::to_string(ledger.pm_runs) + " PM replications, " + std::to_string(ledger.pm_collisions) +
           " collisions");
    return v;
}

Verdict determinism(const Ledger &ledger)
{
    Verdict v;
    std::size_t compared = 0;
    for (const auto &[config, csv] : ledger.runs)
    {
        const std::string again = csv_header() + csv_row(run_scenario(config, 1));
        v.require(again == csv, "CSV differs for " + std::string(to_string(config.mode)) + " mu=" +
                                    std::to_string(config.mu));
        ++compared;
    }
    v.note(std::to_string(compared) + " scenarios re-run single-threaded, byte-identical CSV");
    return v;
}

// Energy rebuilt from the trace alone: wake/doze, own tx_start/tx_end and
// carrier-sense edges give the radio state between consecutive lines.
std::vector<double> energy_from_trace(const std::vector<TraceLine> &lines, std::size_t n, const PowerProfile &p)
{
    struct S
    {
        bool awake = false, tx = false, busy = false;
        SimTime since = 0;
        double mj = 0;
    };
    std::vector<S> st(n + 1);
    auto power = [&](const S &s) {
        if (!s.awake)
            return p.p_doze;
        if (s.tx)
            return p.p_tx;
        return s.busy ? p.p_rx : p.p_idle;
    };
    auto advance = [&](S &s, SimTime t) {
        s.mj += power(s) * static_cast<double>(t - s.since) * 1e-6;
        s.since = t;
    };
    for (const auto &line : lines)
    {
        if (line.event == "run_end")
        {
            for (std::size_t i = 1; i <= n; ++i)
                advance(st[i], line.t);
            continue;
        }
        if (line.node == kApNode)
            continue;
        S &s = st[line.node];
        advance(s, line.t);
        if (line.event == "wake")
            s.awake = true;
        else if (line.event == "doze")
            s.awake = false;
        else if (line.event == "tx_start")
            s.tx = true;
        else if (line.event == "tx_end")
            s.tx = false;
        else if (line.event == "cs_busy")
            s.busy = true;
        else if (line.event == "cs_idle")
            s.busy = false;
    }
    std::vector<double> out;
    for (std::size_t i = 1; i <= n; ++i)
        out.push_back(st[i].mj);
    return out;
}

Verdict energy_conservation()
{
    Verdict v;
    RngStream pick(2024, 0);
    std::size_t stations = 0;
    for (int k = 0; k < 100; ++k)
    {
        ScenarioConfig c;
        c.mode = pick.uniform01() < 0.5 ? TwtMode::Polling : TwtMode::NonPolling;
        c.n = static_cast<std::size_t>(pick.uniform_int(1, 30));
        c.mu = pick.uniform_int(0, 20'000);
        c.sigma = static_cast<double>(pick.uniform_int(0, 20'000));
        c.placement_radius = pick.uniform01() < 0.5 ? 5.0 : 50.0;
        c.capture = pick.uniform01() < 0.5;
        c.edca.cw_min = (1 << pick.uniform_int(1, 10)) - 1;
        c.awake_offset = pick.uniform_int(0, 3 * static_cast<SimTime>(c.sigma));
        c.sp_duration = pick.uniform_int(20'000, kSecond);
        const auto seed = static_cast<std::uint64_t>(pick.uniform_int(1, 1'000'000));

        MemoryTrace trace;
        SimulationHooks h;
        h.trace = &trace;
        Replication r(c, seed, h);
        const auto m = r.run();
        const auto rebuilt = energy_from_trace(trace.lines, c.n, c.power);
        for (std::size_t i = 0; i < c.n; ++i)
        {
            const auto &iv = r.ledger().intervals(i);
            bool tiles = !iv.empty() && iv.front().start == 0 && iv.back().end == m.run_end;
            for (std::size_t j = 1; tiles && j < iv.size(); ++j)
                tiles = iv[j].start == iv[j - 1].end && iv[j].end >= iv[j].start;
            v.require(tiles, "config " + std::to_string(k) + " station " + std::to_string(i + 1) + " not tiled");
            const double ledger_mj = r.ledger().station_energy(i, c.power);
            v.require(std::abs(ledger_mj - rebuilt[i]) <= 1e-9 * std::max(1.0, ledger_mj),
                      "config " + std::to_string(k) + " station " + std::to_string(i + 1) + " energy " +
                          fmt(ledger_mj, 12) + " vs trace " + fmt(rebuilt[i], 12));
            ++stations;
        }
    }
    v.note("100 random configs, " + std::to_string(stations) + " station ledgers tiled and matched to the trace");
    return v;
}

} // namespace

int main()
{
    struct Criterion
    {
        int id;
        const char *name;
        double limit_s; // 0: no runtime bound
        std::function<Verdict()> check;
    };

    Ledger ledger;
    const std::vector<Criterion> criteria{
        {1, "EDCA timeline oracles", 1, edca_oracles},
        {2, "CW recurrence and drop", 1, cw_recurrence},
        {3, "PM saturation PDR", 30, [&] { return pm_saturation(ledger); }},
        {4, "NPM linear regime", 60, [&] { return npm_linear(ledger); }},
        {5, "NPM collision avalanche", 60, [&] { return npm_avalanche(ledger); }},
        {6, "mode energy ordering", 120, [&] { return energy_ordering(ledger); }},
        {7, "capture benefit with hidden STAs", 120, [&] { return capture_benefit(ledger); }},
        {8, "PM no-collision invariant", 0, [&] { return pm_no_collisions(ledger); }},
        {9, "determinism", 0, [&] { return determinism(ledger); }},
        {10, "energy conservation", 60, energy_conservation},
    };

    int failed = 0;
    for (const auto &c : criteria)
    {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try
        {
            v = c.check();
        }
        catch (const std::exception &e)
        {
            v.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_s > 0)
            v.require(secs < c.limit_s, "runtime over " + fmt(c.limit_s) + " s");
        failed += !v.pass;
        std::printf("criterion %2d %s  %s: %s (%.2f s)\n", c.id, v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str(),
                    secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
