#pragma once

// File outputs of a simulation run and the plot-ready report tables.
//
// Run directory (one per strategy):
//   metrics.json      RunMetrics
//   trips.csv         truck,station,ramp,t_arrival,quoted_wait,realized_wait,
//                     charge_time,battery_before,battery_after
//   stations.csv      station,charging_minutes,waiting_minutes,charging_visits,mean_wait
//   transcript.jsonl  exchange messages, one per line (empty for offline runs)
//   ledgers.json      final port ledger of every station
//
// Report tables (written to <run dir>/report/):
//   waits_sorted.csv     truck,wait_minutes          trucks with waiting, ascending
//   station_totals.csv   station,charging_minutes,waiting_minutes,charging_visits,mean_wait
//   residual_battery.csv truck,residual_battery,threshold,residual_percent,stranded
//                        (threshold = e_safe; percent of e_full)
//   port_timeline.csv    station,port,truck,start,end
//
// CSV numbers are rounded to 0.01.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fleetcharge/sim_engine.hpp"
#include "fleetcharge/station_scheduler.hpp"

namespace fleetcharge {

std::string format_report_number(double v);

void write_trips_csv(std::ostream& out, const RunMetrics& m);
void write_stations_csv(std::ostream& out, const RunMetrics& m);
/// scope,id,baseline_wait,proposed_wait,delta_wait,baseline_charge,proposed_charge,reduction_pct
/// with scope in {truck, station, total}; waits and charges in minutes.
void write_compare_csv(std::ostream& out, const ComparisonReport& r);

void write_waits_sorted_csv(std::ostream& out, const RunMetrics& m);
void write_residual_battery_csv(std::ostream& out, const RunMetrics& m);
void write_port_timeline_csv(std::ostream& out, const std::vector<PortLedger>& ledgers);

nlohmann::ordered_json ledgers_to_json(const std::vector<PortLedger>& ledgers);
std::vector<PortLedger> ledgers_from_json(const nlohmann::json& j);

void write_run_outputs(const std::filesystem::path& dir, const RunResult& run);

RunMetrics load_metrics(const std::filesystem::path& metrics_json);

/// Reads metrics.json and ledgers.json from `run_dir` and writes the four
/// report tables into `run_dir`/report.
void write_report(const std::filesystem::path& run_dir);

}  // namespace fleetcharge
