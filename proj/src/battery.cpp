#include "evplatoon/battery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace evp {

namespace {

std::string capability_message(double demanded, double max_deliverable) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "power demand %.6g W exceeds battery capability (max deliverable %.6g W)",
                  demanded, max_deliverable);
    return buf;
}

}  // namespace

PowerCapabilityError::PowerCapabilityError(double demanded_, double max_deliverable_)
    : std::runtime_error(capability_message(demanded_, max_deliverable_)),
      demanded(demanded_),
      max_deliverable(max_deliverable_) {}

std::vector<std::string> battery_violations(const BatteryParams& p) {
    std::vector<std::string> out;
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0)) out.push_back(std::string(name) + " must be positive");
    };
    positive(p.R_s, "R_s");
    positive(p.R_1, "R_1");
    positive(p.C_1, "C_1");
    positive(p.R_2, "R_2");
    positive(p.C_2, "C_2");
    positive(p.C_n, "C_n");
    if (p.N_s < 1) out.push_back("N_s must be at least 1");
    if (p.N_p < 1) out.push_back("N_p must be at least 1");
    if (!(p.eta > 0.0 && p.eta <= 1.0)) out.push_back("eta must be in (0, 1]");
    if (p.ocv_curve.empty()) out.push_back("ocv curve must have at least one breakpoint");
    for (std::size_t i = 1; i < p.ocv_curve.size(); ++i) {
        if (!(p.ocv_curve[i].soc > p.ocv_curve[i - 1].soc)) {
            out.push_back("ocv breakpoints must have strictly increasing SOC");
            break;
        }
    }
    for (std::size_t i = 1; i < p.ocv_curve.size(); ++i) {
        if (p.ocv_curve[i].volts < p.ocv_curve[i - 1].volts) {
            out.push_back("ocv curve must be monotone non-decreasing in SOC");
            break;
        }
    }
    return out;
}

std::vector<std::string> body_violations(const VehicleBodyParams& b) {
    std::vector<std::string> out;
    if (!(b.m > 0.0)) out.push_back("m must be positive");
    if (!(b.rho > 0.0)) out.push_back("rho must be positive");
    if (!(b.A > 0.0)) out.push_back("A must be positive");
    if (!(b.C_d >= 0.0)) out.push_back("C_d must be non-negative");
    if (!(b.C_r >= 0.0)) out.push_back("C_r must be non-negative");
    if (!(std::abs(b.theta) < std::asin(1.0))) out.push_back("theta must satisfy |theta| < pi/2");
    if (!(b.g > 0.0)) out.push_back("g must be positive");
    return out;
}

double open_circuit_voltage(const BatteryParams& params, double soc) {
    const auto& pts = params.ocv_curve;
    if (pts.empty()) throw std::invalid_argument("ocv curve is empty");
    if (soc <= pts.front().soc) return pts.front().volts;
    if (soc >= pts.back().soc) return pts.back().volts;
    auto it = std::upper_bound(pts.begin(), pts.end(), soc,
                               [](double s, const OcvPoint& p) { return s < p.soc; });
    const auto& hi = *it;
    const auto& lo = *std::prev(it);
    const double w = (soc - lo.soc) / (hi.soc - lo.soc);
    return lo.volts + w * (hi.volts - lo.volts);
}

double terminal_voltage(const BatteryState& state, double current, const BatteryParams& params) {
    return open_circuit_voltage(params, state.S) - state.V_1 - state.V_2 - current * params.R_s;
}

std::pair<double, double> rc_derivatives(const BatteryState& state, double current,
                                         const BatteryParams& params) {
    return {-state.V_1 / (params.R_1 * params.C_1) + current / params.C_1,
            -state.V_2 / (params.R_2 * params.C_2) + current / params.C_2};
}

double soc_derivative(double current, const BatteryParams& params) {
    return -current / (3600.0 * params.C_n);
}

HeatRate power_loss(const BatteryState& state, double current, const BatteryParams& params) {
    const double raw = current * (state.V_1 + state.V_2 + params.R_s * current);
    if (raw >= 0.0) return {raw, false};
    if (raw >= -kHeatBreachTolerance) return {0.0, false};
    return {raw, true};
}

double resistive_force(double v, const VehicleBodyParams& body) {
    return 0.5 * body.rho * body.A * body.C_d * v * v + body.C_r * body.m * body.g +
           body.m * body.g * std::sin(body.theta);
}

double motor_power_from_dynamics(double v, double a, const VehicleBodyParams& body) {
    return (body.m * a + resistive_force(v, body)) * v;
}

double cell_power_from_motor(double p_motor, const BatteryParams& params) {
    const double cells = static_cast<double>(params.N_s) * static_cast<double>(params.N_p);
    if (p_motor > 0.0) return p_motor / (params.eta * cells);
    return params.eta * p_motor / cells;
}

double solve_cell_current(double p_output, const BatteryState& state,
                          const BatteryParams& params) {
    // R_s I^2 - V_eff I + p_output = 0, with V_eff the no-ohmic-drop voltage.
    const double v_eff = open_circuit_voltage(params, state.S) - state.V_1 - state.V_2;
    const double disc = v_eff * v_eff - 4.0 * params.R_s * p_output;
    if (disc < 0.0) {
        throw PowerCapabilityError(p_output, v_eff * v_eff / (4.0 * params.R_s));
    }
    const double root = std::sqrt(disc);
    // Smaller-magnitude root, written to avoid cancellation.
    if (v_eff > 0.0) return 2.0 * p_output / (v_eff + root);
    if (v_eff < 0.0) return 2.0 * p_output / (v_eff - root);
    return p_output == 0.0 ? 0.0 : -std::sqrt(-p_output / params.R_s);
}

BatteryState step_battery(const BatteryState& state, double current, double dt,
                          const BatteryParams& params) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_battery: dt must be positive");
    auto relax = [current, dt](double v0, double r, double c) {
        const double decay = std::exp(-dt / (r * c));
        return v0 * decay + r * current * (1.0 - decay);
    };
    BatteryState next;
    next.V_1 = relax(state.V_1, params.R_1, params.C_1);
    next.V_2 = relax(state.V_2, params.R_2, params.C_2);
    next.S = state.S - current * dt / (3600.0 * params.C_n);
    return next;
}

ZeroCurrentReport verify_zero_current_optimality(double horizon, const std::vector<double>& grid,
                                                 int steps, const BatteryState& start,
                                                 const BatteryParams& params) {
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (steps < 1) throw std::invalid_argument("steps must be at least 1");
    if (grid.empty()) throw std::invalid_argument("grid must not be empty");
    if (std::find(grid.begin(), grid.end(), 0.0) == grid.end()) {
        throw std::invalid_argument("grid must include 0");
    }

    const double seg_dt = horizon / steps;
    constexpr int kSamplesPerSegment = 256;

    std::size_t total = 1;
    for (int s = 0; s < steps; ++s) total *= grid.size();

    ZeroCurrentReport report;
    std::vector<std::size_t> digits(static_cast<std::size_t>(steps), 0);

    for (std::size_t index = 0; index < total; ++index) {
        CurrentProfileResult result;
        result.profile.reserve(digits.size());
        for (auto d : digits) result.profile.push_back(grid[d]);

        BatteryState st = start;
        double integral = 0.0;
        bool feasible = st.S >= 0.0 && st.S <= 1.0;
        for (double current : result.profile) {
            // Exact RC solution sampled densely within the segment; trapezoid
            // for the integral, pointwise minimum for the Q >= 0 check.
            double prev_q = current * (st.V_1 + st.V_2 + params.R_s * current);
            if (prev_q < -kHeatBreachTolerance) feasible = false;
            for (int j = 1; j <= kSamplesPerSegment; ++j) {
                const double u = seg_dt * j / kSamplesPerSegment;
                const double d1 = std::exp(-u / (params.R_1 * params.C_1));
                const double d2 = std::exp(-u / (params.R_2 * params.C_2));
                const double v1 = st.V_1 * d1 + params.R_1 * current * (1.0 - d1);
                const double v2 = st.V_2 * d2 + params.R_2 * current * (1.0 - d2);
                const double q = current * (v1 + v2 + params.R_s * current);
                if (q < -kHeatBreachTolerance) feasible = false;
                integral += 0.5 * (prev_q + q) * (seg_dt / kSamplesPerSegment);
                prev_q = q;
            }
            st = step_battery(st, current, seg_dt, params);
            if (!(st.S >= 0.0 && st.S <= 1.0)) feasible = false;
        }
        result.heat_integral = integral;
        result.feasible = feasible;
        (feasible ? report.ranking : report.infeasible).push_back(std::move(result));

        for (std::size_t pos = 0; pos < digits.size(); ++pos) {
            if (++digits[pos] < grid.size()) break;
            digits[pos] = 0;
        }
    }

    std::stable_sort(report.ranking.begin(), report.ranking.end(),
                     [](const auto& a, const auto& b) { return a.heat_integral < b.heat_integral; });

    auto is_zero = [](const CurrentProfileResult& r) {
        return std::all_of(r.profile.begin(), r.profile.end(), [](double c) { return c == 0.0; });
    };
    report.zero_profile_optimal = !report.ranking.empty() && is_zero(report.ranking.front());
    report.zero_profile_unique =
        report.zero_profile_optimal &&
        std::all_of(report.ranking.begin() + 1, report.ranking.end(), [&](const auto& r) {
            return r.heat_integral > report.ranking.front().heat_integral;
        });
    return report;
}

}  // namespace evp
