#include <doctest.h>

#include <cstdlib>

#include "fixtures.hpp"
#include "fleetcharge/cli.hpp"

using namespace fleetcharge;
using fleetcharge::testing::read_file;

// Golden artifacts for a seeded 10-truck scenario. Set FLEETCHARGE_UPDATE_GOLDEN=1
// to rewrite them after an intentional, audited behavior change.

namespace {

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "fleetcharge");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli::main(static_cast<int>(argv.size()), argv.data());
}

const std::vector<std::string> kArtifacts = {
    "compare.csv",
    "offline/metrics.json",  "offline/trips.csv",  "offline/stations.csv",  "offline/transcript.jsonl",
    "offline/ledgers.json",  "proposed/metrics.json", "proposed/trips.csv", "proposed/stations.csv",
    "proposed/transcript.jsonl", "proposed/ledgers.json",
    "proposed/report/waits_sorted.csv", "proposed/report/station_totals.csv",
    "proposed/report/residual_battery.csv", "proposed/report/port_timeline.csv"};

}  // namespace

TEST_CASE("seeded 10-truck run matches the committed goldens") {
    const auto golden = testing::data_dir() / "golden";
    const auto scenario = golden / "scenario.json";
    const bool update = std::getenv("FLEETCHARGE_UPDATE_GOLDEN") != nullptr;
    const auto out = update ? golden / "run" : testing::scratch_dir("golden");
    if (update) std::filesystem::remove_all(out);

    REQUIRE(run_cli({"run", "--scenario", scenario.string(), "--strategy", "both", "--out", out.string()}) == 0);
    REQUIRE(run_cli({"report", out.string()}) == 0);
    if (update) {
        std::filesystem::remove_all(out / "offline" / "report");
        MESSAGE("goldens rewritten under " << out.string());
        return;
    }
    for (const auto& f : kArtifacts) {
        CAPTURE(f);
        CHECK(read_file(out / f) == read_file(golden / "run" / f));
    }
}

TEST_CASE("golden scenario is the generator output for its template and seed") {
    const auto golden = testing::data_dir() / "golden";
    const auto dir = testing::scratch_dir("golden_gen");
    REQUIRE(run_cli({"generate", "--template", (testing::templates_dir() / "golden.json").string(), "--seed", "7",
                     "--out", (dir / "s.json").string()}) == 0);
    CHECK(read_file(dir / "s.json") == read_file(golden / "scenario.json"));
}
