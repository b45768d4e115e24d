#include <doctest.h>

#include <sstream>

#include "evplatoon/scenario_file.hpp"

using namespace evp;

namespace {

const char* kFullScenario = R"(# platoon benchmark with a battery chain
[model]
alpha = 2
beta = 3
kappa = 0.03
epsilon = 1e-6
v_max = 1.964

[lead]
kind = table
breakpoints = 0:0.5, 2:-0.25, 5:0

[platoon]
lead_position = 0
lead_velocity = 1.0
follower = -2.5 1.0
follower = -6.0 0.9

[sim]
t0 = 0
tf = 20
dt = 0.001

[battery]
R_s = 0.01
C_n = 2.3
eta = 0.85
ocv = 0:3.2, 0.5:3.6, 1:3.9

[body]
m = 1200
theta = 0.01

[scaling]
length_scale = 5
time_scale = 1
)";

Scenario parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in, "test.ini");
}

}  // namespace

TEST_CASE("full scenario file parses") {
    const Scenario sc = parse_text(kFullScenario);
    CHECK(sc.params.alpha == 2.0);
    CHECK(sc.params.beta == 3.0);
    CHECK(sc.params.kappa == 0.03);
    CHECK(sc.params.v_max == 1.964);
    REQUIRE(sc.lead.kind == LeadProfile::Kind::table);
    REQUIRE(sc.lead.breakpoints.size() == 3);
    CHECK(sc.lead.breakpoints[1] == std::pair<double, double>{2.0, -0.25});
    REQUIRE(sc.initial.followers.size() == 2);
    CHECK(sc.initial.followers[1].position == -6.0);
    CHECK(sc.initial.followers[1].velocity == 0.9);
    CHECK(sc.tf == 20.0);
    REQUIRE(sc.battery.has_value());
    CHECK(sc.battery->cell.eta == 0.85);
    CHECK(sc.eta == 0.85);  // the battery efficiency drives the energy metric
    CHECK(sc.battery->cell.R_1 == 0.015);  // unset keys keep their defaults
    REQUIRE(sc.battery->cell.ocv_curve.size() == 3);
    CHECK(sc.battery->cell.ocv_curve[1].volts == 3.6);
    CHECK(sc.battery->body.m == 1200.0);
    CHECK(sc.battery->body.rho == 1.2);
    CHECK(sc.battery->scaling.length_scale == 5.0);
    CHECK(sc.follower_models == std::vector<ModelKind>(2, ModelKind::proposed));
}

TEST_CASE("defaults fill optional keys") {
    const Scenario sc = parse_text(
        "[model]\nalpha = 2\nbeta = 3\nkappa = 0\n"
        "[lead]\nkind = constant\n"
        "[platoon]\nlead_position = 0\nlead_velocity = 1\nfollower = -3 1\n"
        "[sim]\ntf = 10\n");
    CHECK(sc.params.epsilon == 1e-6);
    CHECK(sc.params.v_max == v_max_supremum());
    CHECK(sc.lead.accel == 0.0);
    CHECK(sc.t0 == 0.0);
    CHECK(sc.dt == 1e-3);
    CHECK(sc.eta == 0.8);
    CHECK_FALSE(sc.battery.has_value());
}

TEST_CASE("spacing rule expands to explicit followers") {
    const Scenario rule = parse_text(
        "[model]\nalpha = 2\nbeta = 3\nkappa = 0.03\n"
        "[lead]\nkind = paper_fluctuating\n"
        "[platoon]\nlead_position = 0\nlead_velocity = 1.7\ncount = 5\n"
        "first_spacing = 0.3\nspacing = 3.5\nfollower_velocity = 1.87\n"
        "[sim]\ntf = 70\n");
    const Scenario builtin = builtin_scenario("table1");
    CHECK(rule.initial == builtin.initial);
    CHECK(rule.lead == builtin.lead);
}

TEST_CASE("parse errors carry position and reason") {
    auto expect_error = [&](const std::string& text, const std::string& needle, int line = 0) {
        try {
            parse_text(text);
            FAIL("expected ParseError for: " << needle);
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
            if (line > 0) CHECK(e.line == line);
        }
    };

    expect_error("[mdel]\n", "unknown section", 1);
    expect_error("[model]\nalpha = 2\ngamma = 3\n", "unknown key 'gamma'", 3);
    expect_error("[model]\nalpha = 2\nalpha = 2\n", "duplicate key", 3);
    expect_error("[model]\nalpha = two\n", "invalid number", 2);
    expect_error("[model]\nalpha\n", "expected 'key = value'", 2);
    expect_error("alpha = 2\n", "outside of any section", 1);
    expect_error("[model]\n[model]\n", "duplicate section", 2);
    expect_error("[model]\nalpha = 2\nbeta = 3\nkappa = 0\n", "missing required section");
    expect_error(
        "[model]\nalpha = 2\nbeta = 3\nkappa = 0\n[lead]\nkind = constant\n"
        "[platoon]\nlead_position = 0\nlead_velocity = 1\nfollower = -3 1\n[sim]\n",
        "missing required key 'tf'");
    expect_error(
        "[model]\nalpha = 2\nbeta = 3\nkappa = 0\n[lead]\nkind = warp\n"
        "[platoon]\nlead_position = 0\nlead_velocity = 1\nfollower = -3 1\n[sim]\ntf = 1\n",
        "unknown lead kind");
    expect_error(
        "[model]\nalpha = 2\nbeta = 3\nkappa = 0\n[lead]\nkind = constant\nbreakpoints = 0:1\n"
        "[platoon]\nlead_position = 0\nlead_velocity = 1\nfollower = -3 1\n[sim]\ntf = 1\n",
        "only valid for kind = table");
    expect_error(
        "[model]\nalpha = 2\nbeta = 3\nkappa = 0\n[lead]\nkind = table\nbreakpoints = 2:1, 1:0\n"
        "[platoon]\nlead_position = 0\nlead_velocity = 1\nfollower = -3 1\n[sim]\ntf = 1\n",
        "strictly increasing");
    expect_error(
        "[model]\nalpha = 2\nbeta = 3\nkappa = 0\n[lead]\nkind = constant\n"
        "[platoon]\nlead_position = 0\nlead_velocity = 1\nfollower = -3 1\ncount = 2\n"
        "first_spacing = 1\nspacing = 1\nfollower_velocity = 1\n[sim]\ntf = 1\n",
        "not both");
    expect_error(
        "[model]\nalpha = 2\nbeta = 3\nkappa = 0\n[lead]\nkind = constant\n"
        "[platoon]\nlead_position = 0\nlead_velocity = 1\nfollower = -3\n[sim]\ntf = 1\n",
        "expected 'follower = <position> <velocity>'");
    expect_error(
        "[body]\nm = 1000\n[model]\nalpha = 2\nbeta = 3\nkappa = 0\n[lead]\nkind = constant\n"
        "[platoon]\nlead_position = 0\nlead_velocity = 1\nfollower = -3 1\n[sim]\ntf = 1\n",
        "requires a [battery] section");
}

TEST_CASE("validation failures surface the violated rules") {
    auto expect_validation = [&](const std::string& text, const std::string& needle) {
        try {
            parse_text(text);
            FAIL("expected ValidationError for: " << needle);
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_validation(
        "[model]\nalpha = 3\nbeta = 2\nkappa = 0\n[lead]\nkind = constant\n"
        "[platoon]\nlead_position = 0\nlead_velocity = 1\nfollower = -3 1\n[sim]\ntf = 1\n",
        "beta must exceed alpha");
    expect_validation(
        "[model]\nalpha = 2\nbeta = 3\nkappa = 0\n[lead]\nkind = constant\n"
        "[platoon]\nlead_position = 0\nlead_velocity = 1\nfollower = 3 1\n[sim]\ntf = 1\n",
        "spacing");
    expect_validation(
        "[model]\nalpha = 2\nbeta = 3\nkappa = 0\n[lead]\nkind = constant\n"
        "[platoon]\nlead_position = 0\nlead_velocity = 1\nfollower = -3 1\n[sim]\ntf = 1\n"
        "[battery]\nocv = 0:3.9, 1:3.2\n",
        "monotone");
}

TEST_CASE("builtin scenarios") {
    CHECK(is_builtin_scenario("fig1a"));
    CHECK(is_builtin_scenario("table1"));
    CHECK_FALSE(is_builtin_scenario("fig1c"));
    CHECK(builtin_scenario_names().size() == 3);
    CHECK_THROWS_AS(builtin_scenario("bogus"), std::invalid_argument);

    const Scenario fig1a = builtin_scenario("fig1a");
    CHECK(fig1a.initial.lead == VehicleState{0.1, 0.1});
    CHECK(fig1a.initial.followers == std::vector<VehicleState>{{0.0, 1.9}});
    CHECK(fig1a.tf == 700.0);

    const Scenario table1 = builtin_scenario("table1");
    REQUIRE(table1.initial.followers.size() == 5);
    CHECK(table1.initial.lead.velocity == 1.7);
    CHECK(table1.initial.lead.position - table1.initial.followers[0].position == 0.3);
    for (int i = 1; i < 5; ++i) {
        CHECK(table1.initial.followers[i - 1].position -
                  table1.initial.followers[i].position ==
              3.5);
        CHECK(table1.initial.followers[i].velocity == 1.1 * 1.7);
    }
    CHECK(table1.lead.kind == LeadProfile::Kind::paper_fluctuating);
    CHECK(table1.eta == 0.8);

    for (const auto& name : builtin_scenario_names()) {
        CHECK(scenario_violations(builtin_scenario(name)).empty());
    }
}

TEST_CASE("dump and reparse round trip") {
    for (const auto& name : builtin_scenario_names()) {
        const Scenario original = builtin_scenario(name);
        std::ostringstream out;
        dump_scenario(out, original);
        const Scenario back = parse_text(out.str());
        CHECK(back == original);
    }

    Scenario with_battery = parse_text(kFullScenario);
    std::ostringstream out;
    dump_scenario(out, with_battery);
    CHECK(parse_text(out.str()) == with_battery);
}

TEST_CASE("load_scenario resolves builtins then paths") {
    const Scenario sc = load_scenario("fig1b");
    CHECK(sc.initial.lead.position == 10.0);
    CHECK_THROWS_WITH_AS(load_scenario("no_such_file.ini"),
                         "cannot open scenario file 'no_such_file.ini'", std::runtime_error);
}
