#include "twtsim/radio_medium.hpp"

#include "twtsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace twtsim
{

double distance(const Position &a, const Position &b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

std::vector<Position> place_nodes(std::size_t n, double radius, RngStream &stream)
{
    std::vector<Position> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        // sqrt of a uniform radius fraction gives uniform density over the area
        const double r = radius * std::sqrt(stream.uniform01());
        const double theta = 2.0 * std::numbers::pi * stream.uniform01();
        out.push_back({r * std::cos(theta), r * std::sin(theta)});
    }
    return out;
}

std::string_view to_string(FrameKind kind)
{
    switch (kind)
    {
    case FrameKind::Data: return "data";
    case FrameKind::Trigger: return "trigger";
    case FrameKind::Ack: return "ack";
    }
    return "unknown";
}

std::string_view to_string(ReceptionOutcome outcome)
{
    switch (outcome)
    {
    case ReceptionOutcome::Delivered: return "delivered";
    case ReceptionOutcome::LostCollision: return "collision";
    case ReceptionOutcome::LostCapturedAway: return "captured-away";
    case ReceptionOutcome::NotSensed: return "not-sensed";
    }
    return "unknown";
}

double rx_power_dbm(double distance_m, const PropagationParams &params)
{
    if (!(distance_m > 0.0))
        throw FatalError("rx_power: non-positive distance " + std::to_string(distance_m));
    return params.tx_power_dbm - (params.reference_loss_db + 10.0 * params.path_loss_exponent * std::log10(distance_m));
}

// ---------------------------------------------------------------------------

ListenerReceiver::Active *ListenerReceiver::find(std::uint64_t id)
{
    auto it = std::find_if(active_.begin(), active_.end(), [id](const Active &a) { return a.id == id; });
    return it == active_.end() ? nullptr : &*it;
}

void ListenerReceiver::abandon_locked(ReceptionOutcome verdict)
{
    if (!locked_)
        return;
    find(*locked_)->verdict = verdict;
    locked_.reset();
}

void ListenerReceiver::begin(std::uint64_t id, SimTime start, double power_dbm)
{
    Active incoming{id, start, power_dbm, ReceptionOutcome::LostCollision};
    if (!listening_)
    {
        incoming.verdict = ReceptionOutcome::NotSensed;
    }
    else if (transmitting_)
    {
        // half duplex: the preamble is missed
    }
    else if (active_.empty())
    {
        locked_ = id;
        locked_ok_ = true;
    }
    else
    {
        double strongest = active_.front().power_dbm;
        for (const Active &a : active_)
            strongest = std::max(strongest, a.power_dbm);

        const Active *current = locked_ ? find(*locked_) : nullptr;
        if (capture_.enabled && current && power_dbm >= strongest + capture_.threshold_db)
        {
            abandon_locked(locked_ok_ ? ReceptionOutcome::LostCapturedAway : ReceptionOutcome::LostCollision);
            locked_ = id;
            locked_ok_ = true;
        }
        else if (capture_.enabled && current && locked_ok_ && current->start == start &&
                 current->power_dbm >= power_dbm + capture_.threshold_db)
        {
            // Simultaneous preambles: the dominant one keeps the receiver.
        }
        else
        {
            locked_ok_ = false;
        }
    }
    active_.push_back(incoming);
}

ReceptionOutcome ListenerReceiver::end(std::uint64_t id)
{
    auto it = std::find_if(active_.begin(), active_.end(), [id](const Active &a) { return a.id == id; });
    if (it == active_.end())
        throw FatalError("reception end for unknown transmission " + std::to_string(id));
    ReceptionOutcome outcome = it->verdict;
    if (locked_ == id)
    {
        outcome = locked_ok_ ? ReceptionOutcome::Delivered : ReceptionOutcome::LostCollision;
        locked_.reset();
    }
    active_.erase(it);
    return outcome;
}

void ListenerReceiver::own_tx_begin()
{
    transmitting_ = true;
    abandon_locked(ReceptionOutcome::LostCollision);
}

void ListenerReceiver::set_listening(bool listening)
{
    if (!listening)
        abandon_locked(ReceptionOutcome::NotSensed);
    listening_ = listening;
}

std::vector<ReceptionOutcome> resolve_reception(std::span<const Arrival> arrivals, CaptureParams capture)
{
    struct Step
    {
        SimTime at;
        int order; // ends (0) before starts (1)
        std::size_t index;
    };
    std::vector<Step> steps;
    steps.reserve(arrivals.size() * 2);
    for (std::size_t i = 0; i < arrivals.size(); ++i)
    {
        if (arrivals[i].end <= arrivals[i].start)
            throw FatalError("resolve_reception: arrival with non-positive duration");
        steps.push_back({arrivals[i].start, 1, i});
        steps.push_back({arrivals[i].end, 0, i});
    }
    std::stable_sort(steps.begin(), steps.end(),
                     [](const Step &a, const Step &b) { return a.at != b.at ? a.at < b.at : a.order < b.order; });

    ListenerReceiver rx(capture);
    std::vector<ReceptionOutcome> out(arrivals.size(), ReceptionOutcome::NotSensed);
    for (const Step &s : steps)
    {
        if (s.order == 1)
            rx.begin(s.index, arrivals[s.index].start, arrivals[s.index].power_dbm);
        else
            out[s.index] = rx.end(s.index);
    }
    return out;
}

// ---------------------------------------------------------------------------

RadioMedium::RadioMedium(std::vector<Position> positions, PropagationParams propagation, CaptureParams capture)
    : positions_(std::move(positions)), propagation_(propagation), capture_(capture)
{
    const std::size_t n = positions_.size();
    power_.assign(n, std::vector<double>(n, 0.0));
    senses_.assign(n, std::vector<bool>(n, false));
    for (std::size_t a = 0; a < n; ++a)
    {
        for (std::size_t b = 0; b < n; ++b)
        {
            if (a == b)
                continue;
            const double d = twtsim::distance(positions_[a], positions_[b]);
            if (!(d > 0.0))
                throw FatalError("nodes " + std::to_string(a) + " and " + std::to_string(b) + " are co-located");
            power_[a][b] = rx_power_dbm(d, propagation_);
            senses_[a][b] = d <= propagation_.sense_range_m;
        }
    }
    receivers_.assign(n, ListenerReceiver(capture_));
    transmitting_.assign(n, false);
    idle_since_.assign(n, 0);
}

double RadioMedium::distance(NodeId a, NodeId b) const
{
    return twtsim::distance(positions_.at(a), positions_.at(b));
}

bool RadioMedium::can_sense(NodeId a, NodeId b) const
{
    if (a == b)
        return true;
    return senses_.at(a).at(b);
}

double RadioMedium::rx_power(NodeId sender, NodeId listener) const
{
    if (sender == listener)
        throw FatalError("rx_power: sender and listener are the same node");
    return power_.at(sender).at(listener);
}

const TransmissionRecord &RadioMedium::begin_transmission(const Frame &frame, SimTime start, SimTime duration)
{
    const NodeId sender = frame.sender;
    if (sender >= positions_.size())
        throw FatalError("transmission from unknown node " + std::to_string(sender));
    if (duration <= 0)
        throw FatalError("transmission with non-positive duration");

    // Retire everything that has already finished, oldest end first.
    for (;;)
    {
        std::size_t best = on_air_.size();
        for (std::size_t i = 0; i < on_air_.size(); ++i)
        {
            if (on_air_[i].end() <= start &&
                (best == on_air_.size() || on_air_[i].end() < on_air_[best].end() ||
                 (on_air_[i].end() == on_air_[best].end() && on_air_[i].id < on_air_[best].id)))
                best = i;
        }
        if (best == on_air_.size())
            break;
        retire(best, start);
    }

    if (transmitting_[sender])
        throw FatalError("node " + std::to_string(sender) + " started a transmission while already transmitting");

    TransmissionRecord rec{next_id_++, frame, start, duration};
    transmitting_[sender] = true;
    receivers_[sender].own_tx_begin();
    on_air_.push_back(rec);

    for (NodeId listener = 0; listener < positions_.size(); ++listener)
    {
        if (listener == sender || !senses_[sender][listener])
            continue;
        const bool was_busy = receivers_[listener].busy();
        receivers_[listener].begin(rec.id, start, power_[sender][listener]);
        if (!was_busy && receivers_[listener].busy() && observer_)
            observer_->on_carrier_busy(listener, start);
    }
    return on_air_.back();
}

void RadioMedium::end_transmission(std::uint64_t id, SimTime now)
{
    auto it = std::find_if(on_air_.begin(), on_air_.end(), [id](const TransmissionRecord &r) { return r.id == id; });
    if (it == on_air_.end())
        return;
    if (it->end() != now)
        throw FatalError("transmission " + std::to_string(id) + " ended at t=" + std::to_string(now) +
                         " instead of t=" + std::to_string(it->end()));
    retire(static_cast<std::size_t>(it - on_air_.begin()), now);
}

void RadioMedium::retire(std::size_t index, SimTime now)
{
    const TransmissionRecord rec = on_air_[index];
    on_air_.erase(on_air_.begin() + static_cast<std::ptrdiff_t>(index));
    const SimTime end = rec.end();
    const NodeId sender = rec.frame.sender;

    transmitting_[sender] = false;
    receivers_[sender].own_tx_end();
    if (!receivers_[sender].busy())
        idle_since_[sender] = end;
    if (observer_)
        observer_->on_tx_end(rec, now);

    for (NodeId listener = 0; listener < positions_.size(); ++listener)
    {
        if (listener == sender || !senses_[sender][listener])
            continue;
        const bool was_busy = receivers_[listener].busy();
        const ReceptionOutcome outcome = receivers_[listener].end(rec.id);
        if (observer_)
            observer_->on_reception(listener, rec, outcome, now);
        if (was_busy && !receivers_[listener].busy())
        {
            if (!transmitting_[listener])
                idle_since_[listener] = end;
            if (observer_)
                observer_->on_carrier_idle(listener, end);
        }
    }
}

void RadioMedium::set_listening(NodeId node, bool listening)
{
    receivers_.at(node).set_listening(listening);
}

std::size_t RadioMedium::hidden_pairs(NodeId first) const
{
    std::size_t count = 0;
    for (std::size_t a = first; a < positions_.size(); ++a)
        for (std::size_t b = a + 1; b < positions_.size(); ++b)
            if (!senses_[a][b])
                ++count;
    return count;
}

} // namespace twtsim
