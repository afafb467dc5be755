#pragma once

#include "twtsim/rng.hpp"
#include "twtsim/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace twtsim
{

struct Position
{
    double x = 0.0;
    double y = 0.0;
};

double distance(const Position &a, const Position &b);

/// `n` positions i.i.d. uniform over the disk of `radius` meters centred on the AP.
std::vector<Position> place_nodes(std::size_t n, double radius, RngStream &stream);

enum class FrameKind : std::uint8_t
{
    Data,
    Trigger,
    Ack,
};

std::string_view to_string(FrameKind kind);

struct Frame
{
    FrameKind kind = FrameKind::Data;
    NodeId sender = 0;
    NodeId addressee = 0;
    std::uint64_t payload_id = 0;
};

struct TransmissionRecord
{
    std::uint64_t id = 0;
    Frame frame;
    SimTime start = 0;
    SimTime duration = 0;

    SimTime end() const { return start + duration; }
};

enum class ReceptionOutcome : std::uint8_t
{
    Delivered,
    LostCollision,
    LostCapturedAway,
    NotSensed,
};

std::string_view to_string(ReceptionOutcome outcome);

/// Log-distance path loss, no fading.
struct PropagationParams
{
    double tx_power_dbm = 0.0;
    double reference_loss_db = 46.7; // at 1 m
    double path_loss_exponent = 3.0;
    double sense_range_m = 65.0;
};

struct CaptureParams
{
    bool enabled = false;
    double threshold_db = 10.0;
};

/// Path loss model applied to a distance. Throws FatalError for distance <= 0.
double rx_power_dbm(double distance_m, const PropagationParams &params);

/// Reception state of a single listener.
///
/// A frame is decoded only if the listener locked onto its preamble at the
/// frame start and nothing disturbed it until the end. With capture enabled, a
/// new preamble at least `threshold_db` above every frame already on the air at
/// the listener takes over the receiver, but only while the receiver is still
/// synchronised to an earlier frame. Once that frame is over, nothing else is
/// decoded until the channel goes quiet.
class ListenerReceiver
{
public:
    explicit ListenerReceiver(CaptureParams capture = {}) : capture_(capture) {}

    void begin(std::uint64_t id, SimTime start, double power_dbm);
    /// Outcome for `id`. Throws FatalError if `id` is not on the air here.
    ReceptionOutcome end(std::uint64_t id);

    void own_tx_begin();
    void own_tx_end() { transmitting_ = false; }
    void set_listening(bool listening);

    bool busy() const { return !active_.empty(); }
    bool listening() const { return listening_; }
    std::optional<std::uint64_t> locked() const { return locked_; }

private:
    struct Active
    {
        std::uint64_t id;
        SimTime start;
        double power_dbm;
        ReceptionOutcome verdict;
    };

    Active *find(std::uint64_t id);
    void abandon_locked(ReceptionOutcome verdict);

    CaptureParams capture_;
    std::vector<Active> active_;
    std::optional<std::uint64_t> locked_;
    bool locked_ok_ = false;
    bool transmitting_ = false;
    bool listening_ = true;
};

/// One frame as seen at a listener, for the batch form of reception resolution.
struct Arrival
{
    SimTime start = 0;
    SimTime end = 0;
    double power_dbm = 0.0;
};

/// Outcome per arrival at a single always-listening receiver. At equal
/// instants frame ends are processed before frame starts; simultaneous starts
/// are processed in input order.
std::vector<ReceptionOutcome> resolve_reception(std::span<const Arrival> arrivals, CaptureParams capture);

/// Shared channel: who hears whom, what is on the air, and what each listener decodes.
class RadioMedium
{
public:
    class Observer
    {
    public:
        virtual ~Observer() = default;
        virtual void on_carrier_busy(NodeId node, SimTime now) = 0;
        virtual void on_carrier_idle(NodeId node, SimTime now) = 0;
        virtual void on_reception(NodeId listener, const TransmissionRecord &tx, ReceptionOutcome outcome,
                                  SimTime now) = 0;
        virtual void on_tx_end(const TransmissionRecord &tx, SimTime now) = 0;
    };

    RadioMedium(std::vector<Position> positions, PropagationParams propagation, CaptureParams capture);

    void set_observer(Observer *observer) { observer_ = observer; }

    std::size_t node_count() const { return positions_.size(); }
    const Position &position(NodeId node) const { return positions_.at(node); }
    double distance(NodeId a, NodeId b) const;
    bool can_sense(NodeId a, NodeId b) const;
    double rx_power(NodeId sender, NodeId listener) const;

    /// Puts a frame on the air. Frames that end at or before `start` are
    /// retired first so abutting frames never overlap.
    const TransmissionRecord &begin_transmission(const Frame &frame, SimTime start, SimTime duration);
    /// Retires the frame if it is still on the air; later calls are no-ops.
    void end_transmission(std::uint64_t id, SimTime now);

    /// Carrier sensed busy at `node` from other nodes' transmissions.
    bool busy(NodeId node) const { return receivers_.at(node).busy(); }
    bool transmitting(NodeId node) const { return transmitting_.at(node); }
    /// Last instant the channel became idle at `node`, counting its own transmissions as busy.
    SimTime idle_since(NodeId node) const { return idle_since_.at(node); }

    /// A node that is not listening decodes nothing but still senses the carrier.
    void set_listening(NodeId node, bool listening);

    /// Unordered pairs among nodes [first, node_count) that cannot sense each other.
    std::size_t hidden_pairs(NodeId first = 1) const;

private:
    void retire(std::size_t index, SimTime now);

    std::vector<Position> positions_;
    PropagationParams propagation_;
    CaptureParams capture_;
    std::vector<std::vector<double>> power_;
    std::vector<std::vector<bool>> senses_;
    std::vector<ListenerReceiver> receivers_;
    std::vector<bool> transmitting_;
    std::vector<SimTime> idle_since_;
    std::vector<TransmissionRecord> on_air_;
    std::uint64_t next_id_ = 1;
    Observer *observer_ = nullptr;
};

} // namespace twtsim
