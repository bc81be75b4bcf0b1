#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "spatial_sir/output.hpp"

using namespace spatial_sir;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("spatial_sir_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("empty config gives the calibrated baseline") {
    const auto s = parse_scenario("");
    CHECK(s.epidemic.n_agents == 26600);
    CHECK(s.epidemic.initial_infected == 30);
    CHECK(s.epidemic.recovery_prob == 0.154);
    CHECK(s.epidemic.contagion_radius == 0.013);
    CHECK(s.epidemic.contagion_prob == 0.054);
    CHECK(s.epidemic.move_distance == 0.034);
    CHECK(s.seeds.size() == 20);
    CHECK(s == ScenarioSpec{});
}

TEST_CASE("unknown keys and sections are rejected by name") {
    CHECK_THROWS_WITH_AS(parse_scenario("[epidemic]\ncontagion_probability = 0.05\n"),
                         doctest::Contains("contagion_probability"), ConfigError);
    CHECK_THROWS_AS(parse_scenario("[weather]\nrain = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_scenario("[epidemic]\nn_agents = many\n"), ConfigError);
    CHECK_THROWS_AS(parse_scenario("[epidemic]\ncontagion_prob = 1.5\n"), ValidationError);
}

TEST_CASE("serialization round trip") {
    ScenarioSpec s;
    s.scenario_id = "odd_city";
    s.epidemic.contagion_prob = 0.1 + 0.2;
    s.geography.city_side = std::sqrt(2.0);
    s.geography.density_mode = DensityMode::heterogeneous;
    s.geography.cluster_anchor = {0.5, 0.5};
    s.behavior.kind = BehaviorKind::local;
    s.behavior.params.phi = 0.7;
    s.lockdown = LockdownPolicy{0.3, 15, LockdownSelection::by_risk_aversion};
    s.seeds = {1, 2, 3, 9, 11, 12};
    s.notes = "round trip";
    s.stream_salt = 77;
    const auto text = serialize_scenario(s);
    const auto back = parse_scenario(text);
    CHECK(back == s);
    CHECK(serialize_scenario(back) == text);
    CHECK(spec_hash(back) == spec_hash(s));
    auto other = s;
    other.epidemic.move_distance = 0.035;
    CHECK(spec_hash(other) != spec_hash(s));
}

TEST_CASE("dotted keys and seed lists") {
    ScenarioSpec s;
    set_scenario_value(s, "epidemic.contagion_prob", "0.07");
    CHECK(s.epidemic.contagion_prob == 0.07);
    set_scenario_value(s, "lockdown.start_day", "12");
    REQUIRE(s.lockdown);
    CHECK(s.lockdown->start_day == 12);
    CHECK_THROWS_AS(set_scenario_value(s, "epidemic.speed", "1"), ConfigError);
    CHECK(parse_seed_list("1-3,9") == std::vector<std::uint64_t>{1, 2, 3, 9});
    CHECK(format_seed_list({1, 2, 3, 9}) == "1-3,9");
    CHECK_THROWS_AS(parse_seed_list("3-1"), ValidationError);
}

TEST_CASE("every preset expands to validated scenarios with unique ids") {
    CHECK(preset_ids().size() == 16);
    for (const auto& id : preset_ids()) {
        const auto specs = preset_scenarios(id);
        CHECK(!specs.empty());
        std::set<std::string> ids;
        for (const auto& s : specs) {
            CHECK_NOTHROW(validate_scenario(s));
            ids.insert(s.scenario_id);
        }
        CHECK(ids.size() == specs.size());
    }
    CHECK_THROWS_AS(preset_scenarios("fig99"), ValidationError);
    CHECK_THROWS_AS(run_preset("fig99"), ValidationError);
}

TEST_CASE("CSV schemas") {
    CHECK(trace_csv(std::vector<RunTrace>{}) == std::string(kTraceHeader) + "\n");
    CHECK(panel_csv(PanelDataset{}) == std::string(kPanelHeader) + "\n");
    CHECK(std::string(kTraceHeader) ==
          "scenario_id,seed,day,s,i,r,isolated_share,locked_share,avg_contacts,new_infections,lambda_hat");
    CHECK(std::string(kPanelHeader) == "city_id,day,density,n,treated,i_count,s_count,r_count,i_frac,s_frac,growth,contacts");

    PanelDataset panel;
    for (int t = 0; t < 3; ++t) {
        PanelRow r;
        r.city_id = 4;
        r.day = t;
        r.density = 0.7;
        r.n = 100;
        r.treated = t > 0;
        r.i_count = 10 - t;
        r.s_count = 80;
        r.r_count = 10 + t;
        r.i_frac = r.i_count / 100.0;
        r.s_frac = 0.8;
        if (t < 2) r.growth = -0.1 / 3.0;
        r.contacts = t > 0 ? 0.75 : 1.0;
        panel.push_back(r);
    }
    const auto path = scratch("panel.csv");
    write_text(path, panel_csv(panel));
    const auto back = read_panel_csv(path);
    REQUIRE(back.size() == 3);
    CHECK(back[1].growth == panel[1].growth);
    CHECK_FALSE(back[2].growth.has_value());
    CHECK(back[2].contacts == 0.75);
    CHECK(panel_csv(back) == panel_csv(panel));
    write_text(path, "day,growth\n1,2\n");
    CHECK_THROWS_AS(read_panel_csv(path), ValidationError);
    fs::remove(path);
}

TEST_CASE("output directory errors") {
    const auto file = scratch("blocker");
    write_text(file, "x");
    PresetOutcome empty;
    empty.preset = "none";
    CHECK_THROWS_AS(write_outputs(empty, file / "sub", OutputFormat::csv), ValidationError);
    fs::remove(file);
    CHECK_THROWS_AS(parse_output_format("png"), ValidationError);
}

TEST_CASE("reproduce is byte-for-byte deterministic") {
    PresetOptions o;
    o.seeds = std::vector<std::uint64_t>{1, 2};
    const auto a = scratch("repro_a");
    const auto b = scratch("repro_b");
    write_outputs(run_preset("fig4_random_outbreak", o), a, OutputFormat::csv_svg);
    write_outputs(run_preset("fig4_random_outbreak", o), b, OutputFormat::csv_svg);
    for (const char* f : {"traces.csv", "averaged.csv", "summary.csv", "manifest.json", "infected.svg"}) {
        CHECK(fs::exists(a / f));
        CHECK(read_file(a / f) == read_file(b / f));
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("SVG chart is well formed") {
    std::vector<ChartSeries> s{{"a", {0.0, 0.5, 1.0}}, {"b", {1.0, 0.2}}};
    const auto svg = svg_chart("t", s);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
}
