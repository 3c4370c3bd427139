#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fleetcharge/core_model.hpp"

namespace fleetcharge::cli {

// Process exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kValidationError = 2;
inline constexpr int kInvariantError = 3;

struct RunConfig {
    std::filesystem::path scenario;
    std::string strategy = "both";  // proposed | offline | both
    std::filesystem::path out_dir = "run";
    std::vector<std::pair<std::string, std::string>> overrides;
};

/// Applies `key=value` overrides to every truck (p_max, p_bar, e_full,
/// e_safe, kappa, rho, w_hat, budget) or every station (epsilon).
/// Throws std::invalid_argument on unknown keys or non-numeric values.
void apply_overrides(Scenario& s, const std::vector<std::pair<std::string, std::string>>& overrides);

std::pair<std::string, std::string> parse_override(const std::string& text);

int cmd_generate(const std::filesystem::path& template_path, std::uint64_t seed,
                 const std::filesystem::path& out, std::ostream& err);
int cmd_run(const RunConfig& config, std::ostream& err);
int cmd_compare(const std::filesystem::path& baseline_metrics,
                const std::filesystem::path& proposed_metrics, const std::filesystem::path& out,
                std::ostream& err);
int cmd_report(const std::filesystem::path& run_dir, std::ostream& err);
int cmd_plan(const std::filesystem::path& input, const std::filesystem::path& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace fleetcharge::cli
