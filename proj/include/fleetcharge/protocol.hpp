#pragma once

// Ramp-triggered truck/station exchange.
//
// When a truck reaches ramp r_k it talks to station S_k only:
//   1. arrival   truck -> station  anticipated arrival (now + detour)
//   2. estimate  station -> truck  anticipated wait from the port ledger
//   3. commit    truck -> station  planned charging time at S_k (may be 0)
//   4. ack       station -> truck  truck queued (ledger updated when t > 0)
// The four steps run atomically per station; the caller must not interleave
// two exchanges on the same ledger.

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fleetcharge/charge_planner.hpp"
#include "fleetcharge/core_model.hpp"
#include "fleetcharge/station_scheduler.hpp"

namespace fleetcharge {

struct ArrivalAnnouncement {
    TruckId truck;
    StationId station;
    Minutes arrival = 0.0;
    bool operator==(const ArrivalAnnouncement&) const = default;
};

struct WaitingEstimate {
    StationId station;
    TruckId truck;
    Minutes wait = 0.0;
    bool operator==(const WaitingEstimate&) const = default;
};

struct ChargingCommitment {
    TruckId truck;
    StationId station;
    Minutes charge_time = 0.0;
    bool operator==(const ChargingCommitment&) const = default;
};

struct Ack {
    StationId station;
    TruckId truck;
    bool operator==(const Ack&) const = default;
};

using Message = std::variant<ArrivalAnnouncement, WaitingEstimate, ChargingCommitment, Ack>;

class DecodeError : public std::runtime_error {
public:
    DecodeError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Canonical single-line JSON, fixed field order, at most six decimals.
std::string encode_message(const Message& m);
Message decode_message(const std::string& line);

/// Shortest decimal rendering with at most six fractional digits.
std::string format_wire_number(double v);

enum class ExchangeOutcome { planned, rescued, stranded };

struct ExchangeTranscript {
    std::uint64_t sequence_no = 0;
    ArrivalAnnouncement arrival;
    WaitingEstimate estimate;
    ChargingCommitment commitment;
    Ack ack;
    std::uint64_t ledger_version_before = 0;
    std::uint64_t ledger_version_after = 0;
    PlannerStatus planner_status = PlannerStatus::optimal;
    ExchangeOutcome outcome = ExchangeOutcome::planned;

    std::array<Message, 4> messages() const { return {arrival, estimate, commitment, ack}; }
};

/// Structural checks on one exchange: message order and party ids, and the
/// ledger-version step implied by the commitment.
std::vector<std::string> check_transcript(const ExchangeTranscript& t);

struct ExchangeResult {
    ExchangeTranscript transcript;
    PlannerSolution solution;
    WaitQuote quote;
};

using Planner = std::function<PlannerSolution(const PlannerInput&)>;

/// Planner input for a truck standing at ramp `state.next_ramp` with the
/// station's quote in hand. `route_stations` holds S_1..S_N of its route.
PlannerInput planner_input_at_ramp(const TruckSpec& truck, const TruckState& state,
                                   std::span<const StationSpec> route_stations,
                                   Minutes quoted_wait);

/// Assigns sequence numbers and keeps every transcript in order.
class ExchangeLog {
public:
    std::uint64_t next_sequence() { return next_++; }
    void append(ExchangeTranscript t) { transcripts_.push_back(std::move(t)); }
    const std::vector<ExchangeTranscript>& transcripts() const { return transcripts_; }

    void write_jsonl(std::ostream& out) const;

private:
    std::uint64_t next_ = 0;
    std::vector<ExchangeTranscript> transcripts_;
};

/// Runs the four-step exchange at the truck's current ramp against `ledger`.
/// If the planner finds no feasible plan, the truck commits the smallest
/// charge at this station that restores energy feasibility; failing that it
/// commits nothing and the outcome is `stranded`.
ExchangeResult run_ramp_exchange(const TruckSpec& truck, const TruckState& state,
                                 std::span<const StationSpec> route_stations, PortLedger& ledger,
                                 const Planner& planner, ExchangeLog& log);

}  // namespace fleetcharge
