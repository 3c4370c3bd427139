#include "fleetcharge/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "fleetcharge/charge_planner.hpp"
#include "fleetcharge/reports.hpp"
#include "fleetcharge/scenario_generator.hpp"
#include "fleetcharge/sim_engine.hpp"

namespace fleetcharge::cli {

namespace {

nlohmann::json read_json_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    return nlohmann::json::parse(in);
}

double parse_number(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("override " + key + ": '" + text + "' is not a number");
}

void print_violations(std::ostream& err, const std::vector<Violation>& violations) {
    for (const auto& v : violations) err << "  " << v.entity << ": " << v.message << '\n';
}

}  // namespace

std::pair<std::string, std::string> parse_override(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw std::invalid_argument("override '" + text + "' must look like key=value");
    }
    return {text.substr(0, eq), text.substr(eq + 1)};
}

void apply_overrides(Scenario& s, const std::vector<std::pair<std::string, std::string>>& overrides) {
    for (const auto& [key, text] : overrides) {
        const double v = parse_number(key, text);
        if (key == "epsilon") {
            for (auto& st : s.stations) st.electricity_price_energy = v;
            continue;
        }
        for (auto& t : s.trucks) {
            if (key == "p_max") t.params.p_max = v;
            else if (key == "p_bar") t.params.p_bar = v;
            else if (key == "e_full") t.params.e_full = v;
            else if (key == "e_safe") t.params.e_safe = v;
            else if (key == "kappa") t.params.kappa = v;
            else if (key == "rho") t.params.rho = v;
            else if (key == "w_hat") t.w_hat_default = v;
            else if (key == "budget") t.extra_time_budget = v;
            else throw std::invalid_argument("unknown override key '" + key + "'");
        }
        if (s.trucks.empty() && key != "p_max" && key != "p_bar" && key != "e_full"
            && key != "e_safe" && key != "kappa" && key != "rho" && key != "w_hat" && key != "budget") {
            throw std::invalid_argument("unknown override key '" + key + "'");
        }
    }
}

int cmd_generate(const std::filesystem::path& template_path, std::uint64_t seed,
                 const std::filesystem::path& out, std::ostream& err) {
    ScenarioTemplate tmpl;
    try {
        tmpl = template_from_json(read_json_file(template_path));
    } catch (const TemplateError& e) {
        err << "invalid template field " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "cannot read template: " << e.what() << '\n';
        return kUsageError;
    }

    Scenario s;
    try {
        s = generate_scenario(tmpl, seed);
    } catch (const TemplateError& e) {
        err << "generation failed: " << e.what() << '\n';
        return kUsageError;
    }
    const auto violations = validate_scenario(s);
    if (!violations.empty()) {
        err << "generated scenario fails validation:\n";
        print_violations(err, violations);
        return kValidationError;
    }
    try {
        if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
        save_scenario(s, out.string());
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return kUsageError;
    }
    return kOk;
}

int cmd_run(const RunConfig& config, std::ostream& err) {
    Scenario s;
    std::vector<Strategy> strategies;
    try {
        if (config.strategy == "both") {
            strategies = {Strategy::offline, Strategy::proposed};
        } else {
            strategies = {strategy_from_string(config.strategy)};
        }
        s = load_scenario(config.scenario.string());
        apply_overrides(s, config.overrides);
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return kUsageError;
    }
    const auto violations = validate_scenario(s);
    if (!violations.empty()) {
        err << "scenario " << config.scenario << " fails validation:\n";
        print_violations(err, violations);
        return kValidationError;
    }

    std::vector<RunResult> runs;
    for (Strategy strategy : strategies) {
        RunResult run = run_strategy(s, strategy);
        const auto problems = audit_run(s, run);
        if (!problems.empty()) {
            err << to_string(strategy) << " run violated internal invariants:\n";
            for (const auto& p : problems) err << "  " << p << '\n';
            return kInvariantError;
        }
        try {
            write_run_outputs(config.out_dir / to_string(strategy), run);
        } catch (const std::exception& e) {
            err << e.what() << '\n';
            return kUsageError;
        }
        runs.push_back(std::move(run));
    }
    if (runs.size() == 2) {
        std::ofstream out(config.out_dir / "compare.csv", std::ios::binary);
        write_compare_csv(out, compare(runs[0].metrics, runs[1].metrics));
    }
    return kOk;
}

int cmd_compare(const std::filesystem::path& baseline_metrics,
                const std::filesystem::path& proposed_metrics, const std::filesystem::path& out,
                std::ostream& err) {
    try {
        const RunMetrics a = load_metrics(baseline_metrics);
        const RunMetrics b = load_metrics(proposed_metrics);
        const ComparisonReport report = compare(a, b);
        std::ofstream f(out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + out.string());
        write_compare_csv(f, report);
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return kUsageError;
    }
    return kOk;
}

int cmd_report(const std::filesystem::path& run_dir, std::ostream& err) {
    std::vector<std::filesystem::path> dirs;
    if (std::filesystem::exists(run_dir / "metrics.json")) {
        dirs.push_back(run_dir);
    } else {
        for (const char* sub : {"offline", "proposed"}) {
            if (std::filesystem::exists(run_dir / sub / "metrics.json")) dirs.push_back(run_dir / sub);
        }
    }
    if (dirs.empty()) {
        err << "no run artifacts (metrics.json) under " << run_dir << '\n';
        return kUsageError;
    }
    try {
        for (const auto& d : dirs) write_report(d);
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return kUsageError;
    }
    return kOk;
}

int cmd_plan(const std::filesystem::path& input, const std::filesystem::path& out, std::ostream& err) {
    try {
        const PlannerInput in = planner_input_from_json(read_json_file(input));
        const PlannerSolution sol = solve_charging_problem(in);
        const std::string text = to_json(sol).dump(2) + "\n";
        if (out.empty() || out == "-") {
            std::cout << text;
        } else {
            std::ofstream f(out, std::ios::binary);
            if (!f) throw std::runtime_error("cannot write " + out.string());
            f << text;
        }
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return kUsageError;
    }
    return kOk;
}

int main(int argc, char** argv) {
    CLI::App app{"Distributed charging coordination simulator for electric truck fleets"};
    app.require_subcommand(1);

    std::filesystem::path template_path;
    std::uint64_t seed = 1;
    std::filesystem::path out;
    auto* gen = app.add_subcommand("generate", "Generate a synthetic scenario from a template");
    gen->add_option("--template", template_path, "Scenario template JSON")->required();
    gen->add_option("--seed", seed, "Random seed");
    gen->add_option("--out", out, "Scenario file to write")->required();

    RunConfig config;
    std::vector<std::string> sets;
    auto* run = app.add_subcommand("run", "Simulate a scenario");
    run->add_option("--scenario", config.scenario, "Scenario JSON")->required();
    run->add_option("--strategy", config.strategy, "proposed, offline or both")
        ->check(CLI::IsMember({"proposed", "offline", "both"}));
    run->add_option("--out", config.out_dir, "Output directory");
    run->add_option("--set", sets, "Parameter override key=value (repeatable)");

    std::filesystem::path baseline;
    std::filesystem::path proposed;
    auto* cmp = app.add_subcommand("compare", "Compare two metrics.json files");
    cmp->add_option("baseline", baseline, "Reference run metrics.json")->required();
    cmp->add_option("proposed", proposed, "Compared run metrics.json")->required();
    cmp->add_option("--out", out, "compare.csv to write")->required();

    std::filesystem::path run_dir;
    auto* rep = app.add_subcommand("report", "Write report tables for a run directory");
    rep->add_option("run_dir", run_dir, "Directory written by 'run'")->required();

    std::filesystem::path plan_input;
    auto* plan = app.add_subcommand("plan", "Solve one charging problem from a PlannerInput JSON");
    plan->add_option("--input", plan_input, "PlannerInput JSON")->required();
    plan->add_option("--out", out, "PlannerSolution JSON (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsageError;
    }

    if (*gen) return cmd_generate(template_path, seed, out, std::cerr);
    if (*run) {
        try {
            for (const auto& s : sets) config.overrides.push_back(parse_override(s));
        } catch (const std::exception& e) {
            std::cerr << e.what() << '\n';
            return kUsageError;
        }
        return cmd_run(config, std::cerr);
    }
    if (*cmp) return cmd_compare(baseline, proposed, out, std::cerr);
    if (*rep) return cmd_report(run_dir, std::cerr);
    if (*plan) return cmd_plan(plan_input, out, std::cerr);
    return kUsageError;
}

}  // namespace fleetcharge::cli
