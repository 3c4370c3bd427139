#pragma once

// First-come, first-served port ledger of a single charging station.
//
// Each port c keeps the earliest time a_c from which it is free onward. A
// truck announcing an arrival time gets the anticipated wait
//     w = max(min_c a_c - t_arrival, 0)
// and, if it then commits a charging time t > 0, the port attaining the
// minimum is booked from t_arrival + w for t minutes.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fleetcharge/core_model.hpp"

namespace fleetcharge {

struct Assignment {
    TruckId truck;
    int port = 0;
    Minutes start = 0.0;
    Minutes duration = 0.0;

    Minutes end() const { return start + duration; }
    bool operator==(const Assignment&) const = default;
};

struct WaitQuote {
    Minutes wait = 0.0;
    int port = 0;
    Minutes arrival = 0.0;
    std::uint64_t ledger_version = 0;
};

struct ScheduleRow {
    int port = 0;
    TruckId truck;
    Minutes start = 0.0;
    Minutes end = 0.0;

    bool operator==(const ScheduleRow&) const = default;
};

/// Raised when a quote is committed against a ledger that changed after the
/// quote was issued. Under the one-truck-at-a-time discipline this cannot
/// happen, so it always indicates a serialization bug in the caller.
class StaleQuoteError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class PortLedger {
public:
    PortLedger(StationId station_id, int port_count);

    /// Rebuilds a ledger by replaying an assignment log through the port
    /// available-time update.
    static PortLedger replay(StationId station_id, int port_count,
                             const std::vector<Assignment>& log);

    /// Raw construction, bypassing commit; used to audit external state.
    static PortLedger from_parts(StationId station_id, std::vector<Minutes> available_times,
                                 std::vector<Assignment> assignments);

    const StationId& station_id() const { return station_id_; }
    int port_count() const { return static_cast<int>(available_.size()); }
    const std::vector<Minutes>& available_times() const { return available_; }
    const std::vector<Assignment>& assignments() const { return log_; }
    std::uint64_t version() const { return version_; }

    WaitQuote estimate_wait(Minutes arrival) const;

    /// Books quote.port for `charge_time` minutes. A zero charging time
    /// leaves the ledger untouched.
    void commit(const WaitQuote& quote, const TruckId& truck, Minutes charge_time);

    std::vector<ScheduleRow> realized_schedule() const;
    std::vector<Violation> audit() const;

    nlohmann::ordered_json to_json() const;

private:
    StationId station_id_;
    std::vector<Minutes> available_;
    std::vector<Assignment> log_;
    std::uint64_t version_ = 0;
};

PortLedger ledger_from_json(const nlohmann::json& j);

}  // namespace fleetcharge
