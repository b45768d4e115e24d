#include <doctest.h>

#include <cmath>
#include <numbers>

#include "evplatoon/models.hpp"
#include "evplatoon/verify.hpp"

using namespace evp;

namespace {

const ModelParams kParams{2.0, 3.0, 0.03, 1e-6, 1.964};

// Analytic partial derivatives of the proposed law, the oracle for the
// smoothness check.
struct Gradient {
    double d_xl, d_x, d_vl, d_v;
};

Gradient proposed_gradient(const FollowerInput& in, const ModelParams& p) {
    const double z = in.lead_position - in.ego_position;
    const double w = in.lead_velocity - in.ego_velocity;
    const double v = in.ego_velocity;
    const double th = std::tanh(z - 2.0);
    const double v_prime = 1.0 - th * th;
    const double w2 = w * w;
    const double denom = w2 + p.epsilon;
    // d/dw of w^2/(w^2+eps)
    const double ratio_dw = 2.0 * w * p.epsilon / (denom * denom);

    Gradient g{};
    g.d_xl = p.alpha * v_prime - 2.0 * p.beta * w / (z * z * z);
    g.d_x = -g.d_xl;
    g.d_vl = p.beta / (z * z) - p.kappa * v * v * ratio_dw;
    g.d_v = -p.alpha - p.beta / (z * z) - 2.0 * p.kappa * v * (w2 / denom) +
            p.kappa * v * v * ratio_dw;
    return g;
}

}  // namespace

TEST_CASE("energy control term") {
    CHECK(energy_control_term(0.0, 1.3, 0.03, 1e-6) == 0.0);
    CHECK(energy_control_term(1.3, 1.3, 0.03, 1e-6) == 0.0);
    CHECK(energy_control_term(1.0, 2.0, 0.03, 1e-6) ==
          doctest::Approx(-0.03 * (1.0 / (1.0 + 1e-6))).epsilon(1e-15));
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const double v = rng.range(0.0, 2.0);
        const double vl = rng.range(0.0, 2.0);
        CHECK(energy_control_term(v, vl, 0.03, 1e-6) <= 0.0);
    }
    CHECK_THROWS_AS(energy_control_term(1.0, 1.0, 0.03, 0.0), std::invalid_argument);
}

TEST_CASE("acceleration laws at equilibrium and rest") {
    // v_l built from V(z) so every term cancels bit-exactly
    const double z = 3.7;
    const double v_eq = optimal_velocity(z);
    FollowerInput eq{10.0 + z, v_eq, 10.0, v_eq};
    CHECK(proposed_accel(eq, kParams) == 0.0);
    CHECK(ovfl_accel(eq, kParams) == 0.0);

    // at rest the control term vanishes, leaving the two-term law
    FollowerInput rest{5.0, 0.8, 0.0, 0.0};
    const double expected = kParams.alpha * optimal_velocity(5.0) + kParams.beta * 0.8 / 25.0;
    CHECK(proposed_accel(rest, kParams) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("acceleration law reference values") {
    // two-vehicle benchmark state, hand-evaluated
    FollowerInput in{10.0, 1.0, 0.0, 0.5};
    const double ovfl = ovfl_accel(in, kParams);
    const double hand_ovfl =
        2.0 * (optimal_velocity(10.0) - 0.5) + 3.0 * (1.0 - 0.5) / 100.0;
    CHECK(ovfl == doctest::Approx(hand_ovfl).epsilon(1e-15));

    const double control = -0.03 * 0.25 * (0.25 / (0.25 + 1e-6));
    CHECK(proposed_accel(in, kParams) == doctest::Approx(ovfl + control).epsilon(1e-15));

    FollowerInput close{0.1, 0.1, 0.0, 1.9};
    const double hand_close =
        2.0 * (optimal_velocity(0.1) - 1.9) + 3.0 * (0.1 - 1.9) / 0.01;
    CHECK(ovfl_accel(close, kParams) == doctest::Approx(hand_close).epsilon(1e-15));
}

TEST_CASE("ovfl equals proposed with kappa zero") {
    ModelParams no_kappa = kParams;
    no_kappa.kappa = 0.0;
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        FollowerInput in{rng.range(1.0, 20.0), rng.range(0.0, 1.9), 0.0, rng.range(0.0, 1.9)};
        CHECK(proposed_accel(in, no_kappa) == ovfl_accel(in, no_kappa));
    }
}

TEST_CASE("decomposition and sign dominance") {
    Rng rng(13);
    for (int i = 0; i < 1000; ++i) {
        FollowerInput in{rng.range(0.2, 20.0), rng.range(0.0, 1.96), 0.0, rng.range(0.0, 1.96)};
        const double ovfl = ovfl_accel(in, kParams);
        const double control = energy_control_term(in.ego_velocity, in.lead_velocity,
                                                   kParams.kappa, kParams.epsilon);
        // exact by construction
        CHECK(proposed_accel(in, kParams) == ovfl + control);
        CHECK(proposed_accel(in, kParams) <= ovfl);
    }
}

TEST_CASE("proposed law is smooth: finite differences match the analytic gradient") {
    Rng rng(17);
    const double h = 1e-6;
    for (int i = 0; i < 100; ++i) {
        FollowerInput in{rng.range(1.0, 15.0), rng.range(0.05, 1.9), 0.0, rng.range(0.05, 1.9)};
        const Gradient g = proposed_gradient(in, kParams);

        auto central = [&](auto bump) {
            FollowerInput up = in, dn = in;
            bump(up, h);
            bump(dn, -h);
            return (proposed_accel(up, kParams) - proposed_accel(dn, kParams)) / (2.0 * h);
        };
        const double d_xl = central([](FollowerInput& s, double d) { s.lead_position += d; });
        const double d_x = central([](FollowerInput& s, double d) { s.ego_position += d; });
        const double d_vl = central([](FollowerInput& s, double d) { s.lead_velocity += d; });
        const double d_v = central([](FollowerInput& s, double d) { s.ego_velocity += d; });

        auto rel = [](double got, double want) {
            return std::abs(got - want) / std::max(1.0, std::abs(want));
        };
        CHECK(rel(d_xl, g.d_xl) < 1e-5);
        CHECK(rel(d_x, g.d_x) < 1e-5);
        CHECK(rel(d_vl, g.d_vl) < 1e-5);
        CHECK(rel(d_v, g.d_v) < 1e-5);
    }
}

TEST_CASE("collision guard") {
    FollowerInput touching{1.0, 0.5, 1.0, 0.5};
    CHECK_THROWS_AS(ovfl_accel(touching, kParams), CollisionError);
    FollowerInput passed{0.0, 0.5, 1.0, 0.5};
    CHECK_THROWS_AS(proposed_accel(passed, kParams), CollisionError);
    FollowerInput hair{1.0 + 5e-10, 0.5, 1.0, 0.5};
    CHECK_THROWS_AS(proposed_accel(hair, kParams), CollisionError);
}

TEST_CASE("lead profiles") {
    const auto fluct = LeadProfile::paper_fluctuating();
    CHECK(lead_accel(fluct, 0.0) == doctest::Approx(-1.65 / 1.37).epsilon(1e-15));
    CHECK(lead_accel(fluct, 25.0) == 0.0);
    CHECK(lead_accel(fluct, -1.0) == 0.0);
    // mid-window value against the closed form
    const double t = 3.7;
    const double expected = -(1.65 / 1.37) * (std::sin(0.5 * std::numbers::pi * t) +
                                              std::cos(3.2 * std::numbers::pi * t));
    CHECK(lead_accel(fluct, t) == doctest::Approx(expected).epsilon(1e-15));

    const auto still = LeadProfile::constant(0.0);
    CHECK(lead_accel(still, 0.0) == 0.0);
    CHECK(lead_accel(still, 123.0) == 0.0);

    const auto table = LeadProfile::table({{0.0, 0.5}, {2.0, -0.25}, {5.0, 0.0}});
    CHECK(lead_accel(table, -0.5) == 0.0);
    CHECK(lead_accel(table, 0.0) == 0.5);
    CHECK(lead_accel(table, 1.99) == 0.5);
    CHECK(lead_accel(table, 2.0) == -0.25);
    CHECK(lead_accel(table, 4.0) == -0.25);
    CHECK(lead_accel(table, 50.0) == 0.0);

    CHECK_THROWS_AS(LeadProfile::table({{0.0, 1.0}, {0.0, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(LeadProfile::table({{3.0, 1.0}, {1.0, 2.0}}), std::invalid_argument);
}

TEST_CASE("lead profile quiet time") {
    CHECK(lead_profile_quiet_time(LeadProfile::paper_fluctuating()) == 20.0);
    CHECK(lead_profile_quiet_time(LeadProfile::table({{0.0, 1.0}, {4.0, 0.0}})) == 4.0);
    CHECK(lead_profile_quiet_time(LeadProfile::constant(0.0)) ==
          -std::numeric_limits<double>::infinity());
}
