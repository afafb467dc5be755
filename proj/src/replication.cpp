#include "twtsim/replication.hpp"

#include "twtsim/edca.hpp"
#include "twtsim/errors.hpp"
#include "twtsim/rng.hpp"
#include "twtsim/sim_kernel.hpp"

#include <algorithm>
#include <string>

namespace twtsim
{

class Replication::Engine final : public RadioMedium::Observer
{
public:
    Engine(const ScenarioConfig &config, std::uint64_t seed, SimulationHooks hooks);

    ReplicationMetrics run();

    // RadioMedium::Observer
    void on_carrier_busy(NodeId node, SimTime now) override;
    void on_carrier_idle(NodeId node, SimTime now) override;
    void on_reception(NodeId listener, const TransmissionRecord &tx, ReceptionOutcome outcome, SimTime now) override;
    void on_tx_end(const TransmissionRecord &tx, SimTime now) override;

    const ScenarioConfig config_;
    const std::uint64_t seed_;
    SimulationHooks hooks_;

    Kernel kernel_;
    std::vector<RngStream> node_rng_;
    std::unique_ptr<RadioMedium> medium_;
    Schedule schedule_;
    std::vector<StaSession> sessions_;
    std::vector<int> attempts_;
    std::vector<std::unique_ptr<EdcaMachine>> edca_; // by node id; AP slot used in polling mode
    ApPollState poll_;
    EnergyLedger ledger_;
    std::size_t collisions_ = 0;
    bool ran_ = false;

private:
    struct Radio
    {
        RadioState state = RadioState::Doze;
        SimTime since = 0;
    };

    bool polling() const { return config_.mode == TwtMode::Polling; }
    std::size_t index(NodeId sta) const { return sta - 1; }
    StaSession &session(NodeId sta) { return sessions_[index(sta)]; }
    const TwtAgreement &agreement(NodeId sta) const { return schedule_.agreements[index(sta)]; }

    void trace(NodeId node, std::string_view event, const std::string &detail = {})
    {
        if (hooks_.trace)
            hooks_.trace->record(kernel_.now(), node, event, detail);
    }

    int draw_backoff(NodeId node, int retry, int cw);
    void update_radio(NodeId sta);
    void wake(NodeId sta);
    void doze(NodeId sta);
    void start_tx(const Frame &frame, SimTime duration);
    Frame make_frame(FrameKind kind, NodeId sender, NodeId addressee);

    // non-polling mode
    void npm_on_wake(NodeId sta);
    void npm_finish(NodeId sta, bool delivered);

    // polling mode
    void pm_sta_on_wake(NodeId sta);
    void pm_sta_sp_end(NodeId sta);
    void pm_ap_on_trigger_due(NodeId sta);
    void pm_start_next_poll();
    void pm_trigger_sent();
    void pm_response_timeout();
    void pm_complete_exchange();

    std::vector<Radio> radio_;
    std::vector<EventHandle> pm_ack_timeout_;
    std::uint64_t next_payload_ = 1;
};

Replication::Engine::Engine(const ScenarioConfig &config, std::uint64_t seed, SimulationHooks hooks)
    : config_(config), seed_(seed), hooks_(std::move(hooks)), ledger_(config.n)
{
    config_.validate();
    const std::size_t n = config_.n;

    std::vector<Position> positions;
    if (hooks_.positions)
    {
        positions = *hooks_.positions;
        if (positions.size() != n + 1)
            throw FatalError("hook positions must list the AP and every station");
    }
    else
    {
        RngStream topology(seed_, kTopologyStream);
        positions.push_back({0.0, 0.0});
        for (const Position &p : place_nodes(n, config_.placement_radius, topology))
            positions.push_back(p);
    }
    medium_ = std::make_unique<RadioMedium>(std::move(positions), config_.propagation, config_.capture_params());
    medium_->set_observer(this);

    for (NodeId node = 0; node <= n; ++node)
        node_rng_.emplace_back(seed_, node_stream(node));

    schedule_ = build_schedule(n, config_.t_target, config_.mu, config_.mode, config_.awake_offset,
                               config_.sp_duration);
    sessions_.resize(n);
    attempts_.assign(n, 0);
    radio_.assign(n, Radio{});
    pm_ack_timeout_.assign(n, EventHandle{});
    edca_.resize(n + 1);

    // Drift first, so the wake instants do not depend on later backoff draws.
    for (NodeId sta = 1; sta <= n; ++sta)
    {
        medium_->set_listening(sta, false);
        session(sta).actual_wake = sample_wake(agreement(sta), config_.drift(), node_rng_[sta]);
    }

    auto make_edca = [this](NodeId node) {
        EdcaMachine::Hooks h;
        h.transmit = [this, node](const Frame &frame) {
            if (node != kApNode)
                ++attempts_[index(node)];
            start_tx(frame, frame.kind == FrameKind::Trigger ? config_.trigger_duration : config_.data_duration);
        };
        h.draw_backoff = [this, node](int retry, int cw) { return draw_backoff(node, retry, cw); };
        if (node == kApNode)
        {
            h.on_done = [this] { pm_trigger_sent(); };
        }
        else
        {
            h.on_done = [this, node] { npm_finish(node, true); };
            h.on_dropped = [this, node] { npm_finish(node, false); };
        }
        return std::make_unique<EdcaMachine>(node, config_.edca, kernel_, std::move(h));
    };

    if (polling())
    {
        edca_[kApNode] = make_edca(kApNode);
        for (NodeId sta = 1; sta <= n; ++sta)
        {
            StaSession &s = session(sta);
            const TwtAgreement &a = agreement(sta);
            if (s.actual_wake < a.sp_end())
            {
                kernel_.schedule(s.actual_wake, EventKind::Wake, sta, [this, sta] { pm_sta_on_wake(sta); });
                kernel_.schedule(a.sp_end(), EventKind::SpEnd, sta, [this, sta] { pm_sta_sp_end(sta); });
            }
            else
            {
                // Wakes after its own service period: nothing to wait for.
                s.phase = SessionPhase::Failed;
            }
        }
        for (NodeId sta = 1; sta <= n; ++sta)
            kernel_.schedule(agreement(sta).twt, EventKind::TriggerDue, kApNode,
                             [this, sta] { pm_ap_on_trigger_due(sta); });
    }
    else
    {
        for (NodeId sta = 1; sta <= n; ++sta)
        {
            edca_[sta] = make_edca(sta);
            kernel_.schedule(session(sta).actual_wake, EventKind::Wake, sta, [this, sta] { npm_on_wake(sta); });
        }
    }
}

int Replication::Engine::draw_backoff(NodeId node, int retry, int cw)
{
    int b = -1;
    if (hooks_.backoff_override)
        if (auto forced = hooks_.backoff_override(node, retry, cw))
            b = *forced;
    if (b < 0)
        b = static_cast<int>(node_rng_[node].uniform_int(0, cw));
    trace(node, "backoff", "b=" + std::to_string(b) + " cw=" + std::to_string(cw) + " retry=" + std::to_string(retry));
    return b;
}

void Replication::Engine::update_radio(NodeId sta)
{
    if (sta == kApNode)
        return;
    const StaSession &s = session(sta);
    RadioState next = RadioState::Doze;
    if (s.awake)
    {
        if (medium_->transmitting(sta))
            next = RadioState::Tx;
        else if (medium_->busy(sta))
            next = RadioState::Rx;
        else
            next = RadioState::Idle;
    }
    Radio &r = radio_[index(sta)];
    if (next == r.state)
        return;
    const SimTime now = kernel_.now();
    ledger_.record_state(index(sta), r.state, r.since, now);
    r.state = next;
    r.since = now;
}

void Replication::Engine::wake(NodeId sta)
{
    StaSession &s = session(sta);
    s.awake = true;
    medium_->set_listening(sta, true);
    trace(sta, "wake");
    update_radio(sta);
}

void Replication::Engine::doze(NodeId sta)
{
    StaSession &s = session(sta);
    if (!s.awake)
        return;
    s.awake = false;
    s.doze_at = kernel_.now();
    medium_->set_listening(sta, false);
    trace(sta, "doze");
    update_radio(sta);
}

Frame Replication::Engine::make_frame(FrameKind kind, NodeId sender, NodeId addressee)
{
    return Frame{kind, sender, addressee, next_payload_++};
}

void Replication::Engine::start_tx(const Frame &frame, SimTime duration)
{
    const SimTime now = kernel_.now();
    const TransmissionRecord rec = medium_->begin_transmission(frame, now, duration);
    trace(frame.sender, "tx_start",
          std::string(to_string(frame.kind)) + "->" + std::to_string(frame.addressee) + " id=" + std::to_string(rec.id));
    update_radio(frame.sender);
    const std::uint64_t id = rec.id;
    kernel_.schedule(rec.end(), EventKind::TxEnd, frame.sender, [this, id] { medium_->end_transmission(id, kernel_.now()); });
}

// --- medium callbacks --------------------------------------------------------

void Replication::Engine::on_carrier_busy(NodeId node, SimTime now)
{
    if (node != kApNode)
    {
        trace(node, "cs_busy");
        update_radio(node);
    }
    if (edca_[node])
        edca_[node]->on_channel_busy(now);
}

void Replication::Engine::on_carrier_idle(NodeId node, SimTime now)
{
    if (node != kApNode)
    {
        trace(node, "cs_idle");
        update_radio(node);
    }
    if (edca_[node])
        edca_[node]->on_channel_idle(now);
}

void Replication::Engine::on_tx_end(const TransmissionRecord &tx, SimTime now)
{
    const NodeId sender = tx.frame.sender;
    trace(sender, "tx_end", std::string(to_string(tx.frame.kind)) + " id=" + std::to_string(tx.id));
    update_radio(sender);

    switch (tx.frame.kind)
    {
    case FrameKind::Data:
        if (polling())
        {
            pm_ack_timeout_[index(sender)] =
                kernel_.schedule(now + config_.edca.ack_timeout, EventKind::AckTimeout, sender, [this, sender] {
                    pm_ack_timeout_[index(sender)] = {};
                    StaSession &s = session(sender);
                    if (s.phase != SessionPhase::Exchanging)
                        return;
                    s.phase = SessionPhase::Failed;
                    trace(sender, "failed", "no-ack");
                    doze(sender);
                });
        }
        else
        {
            edca_[sender]->on_tx_end(now);
        }
        break;
    case FrameKind::Trigger:
        edca_[kApNode]->on_tx_end(now);
        break;
    case FrameKind::Ack:
        if (polling() && poll_.in_service && poll_.in_service->sta == tx.frame.addressee)
            pm_complete_exchange();
        break;
    }
}

void Replication::Engine::on_reception(NodeId listener, const TransmissionRecord &tx, ReceptionOutcome outcome,
                                       SimTime now)
{
    trace(listener, "rx",
          std::string(to_string(tx.frame.kind)) + " from=" + std::to_string(tx.frame.sender) +
              " id=" + std::to_string(tx.id) + " " + std::string(to_string(outcome)));

    if (listener == kApNode)
    {
        if (outcome == ReceptionOutcome::LostCollision || outcome == ReceptionOutcome::LostCapturedAway)
            ++collisions_;
        if (tx.frame.kind != FrameKind::Data || tx.frame.addressee != kApNode)
            return;
        if (outcome == ReceptionOutcome::Delivered)
        {
            const NodeId to = tx.frame.sender;
            kernel_.schedule(now + config_.edca.sifs, EventKind::TxStart, kApNode, [this, to] {
                start_tx(make_frame(FrameKind::Ack, kApNode, to), config_.edca.ack_duration);
            });
        }
        else if (polling() && poll_.awaiting_response && poll_.in_service && poll_.in_service->sta == tx.frame.sender)
        {
            pm_complete_exchange();
        }
        return;
    }

    if (outcome != ReceptionOutcome::Delivered || tx.frame.addressee != listener)
        return;
    StaSession &s = session(listener);
    if (tx.frame.kind == FrameKind::Trigger && s.phase == SessionPhase::AwaitingTrigger)
    {
        s.phase = SessionPhase::Exchanging;
        kernel_.schedule(now + config_.edca.sifs, EventKind::TxStart, listener, [this, listener] {
            ++attempts_[index(listener)];
            start_tx(make_frame(FrameKind::Data, listener, kApNode), config_.data_duration);
        });
    }
    else if (tx.frame.kind == FrameKind::Ack)
    {
        if (polling())
        {
            if (s.phase != SessionPhase::Exchanging)
                return;
            kernel_.cancel(pm_ack_timeout_[index(listener)]);
            pm_ack_timeout_[index(listener)] = {};
            s.phase = SessionPhase::Done;
            s.delivered_at = now;
            trace(listener, "delivered");
            doze(listener);
        }
        else
        {
            edca_[listener]->on_ack(now);
        }
    }
}

// --- non-polling mode ----------------------------------------------------------

void Replication::Engine::npm_on_wake(NodeId sta)
{
    StaSession &s = session(sta);
    if (s.phase != SessionPhase::Doze)
        throw FatalError("station " + std::to_string(sta) + " woke twice");
    wake(sta);
    s.phase = SessionPhase::Contending;
    const SimTime now = kernel_.now();
    edca_[sta]->enqueue(make_frame(FrameKind::Data, sta, kApNode), true, !medium_->busy(sta), now);
}

void Replication::Engine::npm_finish(NodeId sta, bool delivered)
{
    StaSession &s = session(sta);
    if (delivered)
    {
        s.phase = SessionPhase::Done;
        s.delivered_at = kernel_.now();
        trace(sta, "delivered");
    }
    else
    {
        s.phase = SessionPhase::Failed;
        trace(sta, "dropped");
    }
    doze(sta);
}

// --- polling mode --------------------------------------------------------------

void Replication::Engine::pm_sta_on_wake(NodeId sta)
{
    StaSession &s = session(sta);
    if (s.phase != SessionPhase::Doze)
        throw FatalError("station " + std::to_string(sta) + " woke twice");
    wake(sta);
    s.phase = SessionPhase::AwaitingTrigger;
}

void Replication::Engine::pm_sta_sp_end(NodeId sta)
{
    StaSession &s = session(sta);
    if (s.phase != SessionPhase::AwaitingTrigger)
        return;
    s.phase = SessionPhase::Failed;
    trace(sta, "failed", "sp-end");
    doze(sta);
}

void Replication::Engine::pm_ap_on_trigger_due(NodeId sta)
{
    poll_.trigger_queue.push_back({sta, kernel_.now()});
    trace(kApNode, "trigger_due", "sta=" + std::to_string(sta) + " queued=" + std::to_string(poll_.trigger_queue.size()));
    if (!poll_.in_service)
        pm_start_next_poll();
}

void Replication::Engine::pm_start_next_poll()
{
    if (poll_.in_service || poll_.trigger_queue.empty())
        return;
    poll_.in_service = poll_.trigger_queue.front();
    poll_.trigger_queue.pop_front();
    poll_.trigger_sent = false;
    poll_.awaiting_response = false;

    EdcaMachine &ap = *edca_[kApNode];
    ap.reset();
    const bool idle = !medium_->busy(kApNode) && !medium_->transmitting(kApNode);
    ap.enqueue(make_frame(FrameKind::Trigger, kApNode, poll_.in_service->sta), false, idle, kernel_.now());
}

void Replication::Engine::pm_trigger_sent()
{
    poll_.trigger_sent = true;
    kernel_.schedule(kernel_.now() + config_.response_timeout, EventKind::ResponseTimeout, kApNode,
                     [this] { pm_response_timeout(); });
}

void Replication::Engine::pm_response_timeout()
{
    if (!poll_.in_service)
        return;
    if (medium_->busy(kApNode) || medium_->transmitting(kApNode))
    {
        // A response is on the air; its reception outcome closes or continues the exchange.
        poll_.awaiting_response = true;
        return;
    }
    trace(kApNode, "no_response", "sta=" + std::to_string(poll_.in_service->sta));
    pm_complete_exchange();
}

void Replication::Engine::pm_complete_exchange()
{
    poll_.in_service.reset();
    poll_.awaiting_response = false;
    poll_.trigger_sent = false;
    pm_start_next_poll();
}

// --- run -------------------------------------------------------------------------

ReplicationMetrics Replication::Engine::run()
{
    if (ran_)
        throw FatalError("replication already ran");
    ran_ = true;

    const std::size_t n = config_.n;
    const SimTime horizon = schedule_.t_target + static_cast<SimTime>(n) * config_.mu + 10 * config_.sp_duration;
    if (!kernel_.run(horizon))
        throw FatalError("replication (seed " + std::to_string(seed_) + ") did not quiesce by t=" +
                         std::to_string(horizon));

    SimTime run_end = kernel_.now();
    for (const TwtAgreement &a : schedule_.agreements)
        run_end = std::max(run_end, a.sp_end());

    ReplicationMetrics m;
    m.seed = seed_;
    m.n = n;
    m.collisions = collisions_;
    m.hidden_pairs = medium_->hidden_pairs(1);
    m.run_end = run_end;

    std::optional<SimTime> last_delivery;
    for (NodeId sta = 1; sta <= n; ++sta)
    {
        const StaSession &s = session(sta);
        if (s.phase != SessionPhase::Done && s.phase != SessionPhase::Failed)
            throw FatalError("station " + std::to_string(sta) + " ended in phase " + std::string(to_string(s.phase)));
        if (s.awake)
            throw FatalError("station " + std::to_string(sta) + " still awake at quiescence");
        if (s.phase == SessionPhase::Done)
        {
            ++m.delivered;
            last_delivery = std::max(last_delivery.value_or(*s.delivered_at), *s.delivered_at);
        }
        const Radio &r = radio_[index(sta)];
        ledger_.record_state(index(sta), r.state, r.since, run_end);
    }
    m.pdr = static_cast<double>(m.delivered) / static_cast<double>(n);
    if (last_delivery)
        m.txn_time_us = static_cast<double>(*last_delivery - schedule_.t_target);
    m.mean_energy_mj = mean_station_energy(ledger_, config_.power);
    if (hooks_.trace)
        hooks_.trace->record(run_end, kApNode, "run_end", "-");
    return m;
}

// ---------------------------------------------------------------------------------

Replication::Replication(const ScenarioConfig &config, std::uint64_t seed, SimulationHooks hooks)
    : engine_(std::make_unique<Engine>(config, seed, std::move(hooks)))
{
}

Replication::~Replication() = default;

ReplicationMetrics Replication::run()
{
    return engine_->run();
}

const Schedule &Replication::schedule() const
{
    return engine_->schedule_;
}

const RadioMedium &Replication::medium() const
{
    return *engine_->medium_;
}

const EnergyLedger &Replication::ledger() const
{
    return engine_->ledger_;
}

const std::vector<StaSession> &Replication::sessions() const
{
    return engine_->sessions_;
}

const std::vector<int> &Replication::attempts() const
{
    return engine_->attempts_;
}

ReplicationMetrics run_replication(const ScenarioConfig &config, std::uint64_t seed, TraceSink *trace)
{
    SimulationHooks hooks;
    hooks.trace = trace;
    Replication rep(config, seed, std::move(hooks));
    return rep.run();
}

} // namespace twtsim
