#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "evplatoon/energy.hpp"
#include "evplatoon/scenario_file.hpp"
#include "evplatoon/verify.hpp"

using namespace evp;

TEST_CASE("leaky rectifier") {
    CHECK(g_leaky(0.0, 0.8) == 0.0);
    CHECK(g_leaky(1.0, 0.8) == 1.25);
    CHECK(g_leaky(-1.0, 0.8) == -0.8);
    CHECK_THROWS_AS(g_leaky(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(g_leaky(1.0, 1.5), std::invalid_argument);

    // continuity at zero and slope ratio 1/eta^2
    const double h = 1e-9;
    CHECK(std::abs(g_leaky(h, 0.8)) < 2e-9);
    CHECK(std::abs(g_leaky(-h, 0.8)) < 1e-9);
    const double up = g_leaky(h, 0.8) / h;
    const double down = g_leaky(-h, 0.8) / -h;
    CHECK(up / down == doctest::Approx(1.0 / 0.64).epsilon(1e-12));
}

TEST_CASE("instantaneous energy cost") {
    CHECK(instantaneous_energy(0.0, 3.0, 0.8) == 0.0);
    CHECK(instantaneous_energy(1.0, 1.0, 0.8) == 1.25);
    CHECK(instantaneous_energy(2.0, -0.5, 0.8) == doctest::Approx(-0.8).epsilon(1e-15));
}

TEST_CASE("energy quadrature") {
    std::vector<double> t, v, a;
    for (int k = 0; k <= 100; ++k) {
        t.push_back(0.1 * k);
        v.push_back(1.4);
        a.push_back(0.0);
    }
    CHECK(energy_per_unit_mass(t, v, a, 0.8) == 0.0);

    t.assign({0.0, 4.0, 10.0});  // non-uniform steps
    v.assign(3, 1.0);
    a.assign(3, 1.0);
    CHECK(energy_per_unit_mass(t, v, a, 0.8) == 12.5);

    std::vector<double> one{0.0}, vv{1.0}, aa{1.0};
    CHECK_THROWS_AS(energy_per_unit_mass(one, vv, aa, 0.8), std::invalid_argument);
    std::vector<double> two{0.0, 1.0};
    CHECK_THROWS_AS(energy_per_unit_mass(two, vv, aa, 0.8), std::invalid_argument);
}

TEST_CASE("quadrature is second order in the step") {
    // smooth trajectory staying on the accelerating branch of g
    auto omega_at = [](double dt) {
        std::vector<double> t, v, a;
        for (double s = 0.0; s <= 4.8 + 1e-12; s += dt) {
            t.push_back(s);
            v.push_back(s + 0.3 * std::sin(s));
            a.push_back(1.0 + 0.3 * std::cos(s));
        }
        return energy_per_unit_mass(t, v, a, 0.8);
    };
    const double c1 = omega_at(0.1) - omega_at(0.05);
    const double c2 = omega_at(0.05) - omega_at(0.025);
    CHECK(c1 / c2 == doctest::Approx(4.0).epsilon(0.12));
}

TEST_CASE("energy report covers every follower") {
    Scenario sc = builtin_scenario("table1");
    sc.tf = 3.0;
    const Trajectory traj = integrate_platoon(sc);
    const EnergyReport report = energy_report(traj, "proposed", sc.eta);
    CHECK(report.model_label == "proposed");
    CHECK(report.eta == 0.8);
    CHECK(report.t0 == 0.0);
    CHECK(report.tf == 3.0);
    REQUIRE(report.per_vehicle.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(report.per_vehicle[i].first == i + 1);
}

TEST_CASE("model comparison coincides exactly at kappa zero") {
    Scenario sc = builtin_scenario("table1");
    sc.tf = 5.0;
    sc.params.kappa = 0.0;
    const ModelComparison cmp = compare_models(sc, {ModelKind::ovfl, ModelKind::proposed});
    REQUIRE(cmp.labels.size() == 2);
    CHECK(cmp.labels[0] == "ovfl");
    CHECK(cmp.labels[1] == "proposed");
    REQUIRE(cmp.vehicles.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(cmp.omega[0][i] == cmp.omega[1][i]);  // bitwise: the laws coincide
        CHECK(cmp.pct_change[1][i] == 0.0);
        CHECK(cmp.pct_change[0][i] == 0.0);
    }
}

TEST_CASE("model comparison annotates failures with the model label") {
    Scenario sc = builtin_scenario("fig1b");
    sc.tf = 4.0;
    sc.dt = 0.5;  // coarse enough to drive the close start into contact
    sc.initial.lead = {0.35, 0.0};
    sc.initial.followers = {{0.0, 1.9}};
    try {
        compare_models(sc, {ModelKind::ovfl, ModelKind::proposed});
        FAIL("expected a propagated simulation error");
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        const bool labeled =
            what.rfind("ovfl: ", 0) == 0 || what.rfind("proposed: ", 0) == 0;
        CHECK(labeled);
        CHECK(what.find("collision") != std::string::npos);
    }
}

TEST_CASE("energy ordering holds on the two-vehicle benchmark") {
    Scenario proposed = builtin_scenario("fig1b");
    proposed.tf = 70.0;
    Scenario as_ovfl = proposed;
    as_ovfl.follower_models = {ModelKind::ovfl};
    const Trajectory tp = integrate_platoon(proposed);
    const Trajectory to = integrate_platoon(as_ovfl);
    const double op =
        energy_per_unit_mass(tp.time, tp.vehicles[1].velocity, tp.vehicles[1].acceleration, 0.8);
    const double oo =
        energy_per_unit_mass(to.time, to.vehicles[1].velocity, to.vehicles[1].acceleration, 0.8);
    CHECK(op <= oo + kOmegaOrderingSlack);
    CHECK(oo - op > 0.01);  // the margin is macroscopic here
}

TEST_CASE("energy ordering fails on a converged counterexample") {
    // The ordering claim does not hold everywhere: this seeded two-vehicle
    // case (velocities inside [0, v_max] throughout) has the proposed law
    // costing more, stable under dt refinement and confirmed with an
    // independent high-order integrator. Kept as a characterization test.
    const TheoremCase tc = random_theorem_case(1, 5, 70.0, 1e-3);
    REQUIRE(tc.scenario.initial.followers.size() == 1);
    REQUIRE(tc.switched_follower == 1);
    Scenario as_ovfl = tc.scenario;
    as_ovfl.follower_models[0] = ModelKind::ovfl;
    const Trajectory tp = integrate_platoon(tc.scenario);
    const Trajectory to = integrate_platoon(as_ovfl);
    const double op =
        energy_per_unit_mass(tp.time, tp.vehicles[1].velocity, tp.vehicles[1].acceleration, 0.8);
    const double oo =
        energy_per_unit_mass(to.time, to.vehicles[1].velocity, to.vehicles[1].acceleration, 0.8);
    CHECK(op - oo == doctest::Approx(4.413e-3).epsilon(0.01));
    for (double v : tp.vehicles[1].velocity) {
        CHECK(v >= 0.0);
        CHECK(v <= tc.scenario.params.v_max);
    }
}

TEST_CASE("comparison csv layout") {
    Scenario sc = builtin_scenario("fig1b");
    sc.tf = 2.0;
    const ModelComparison cmp = compare_models(sc, {ModelKind::ovfl, ModelKind::proposed});
    std::ostringstream out;
    write_comparison_csv(out, cmp);
    const std::string text = out.str();
    CHECK(text.rfind("vehicle,model,omega,pct_change\n", 0) == 0);
    CHECK(text.find("1,ovfl,") != std::string::npos);
    CHECK(text.find("1,proposed,") != std::string::npos);
}
