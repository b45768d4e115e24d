#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace evp {

// One breakpoint of the open-circuit-voltage curve.
struct OcvPoint {
    double soc = 0.0;
    double volts = 0.0;

    bool operator==(const OcvPoint&) const = default;
};

// 2RC equivalent-circuit cell constants plus pack layout and motor efficiency.
// Defaults describe a representative small Li-ion cell; they are engineering
// placeholders, not measured values, and every field is configurable.
struct BatteryParams {
    double R_s = 0.01;     // series resistance [ohm]
    double R_1 = 0.015;    // first RC branch [ohm]
    double C_1 = 2400.0;   //                 [farad]   (tau_1 = 36 s)
    double R_2 = 0.002;    // second RC branch [ohm]
    double C_2 = 50000.0;  //                  [farad]  (tau_2 = 100 s)
    double C_n = 2.3;      // nominal capacity [ampere-hour]
    int N_s = 100;         // cells in series
    int N_p = 10;          // parallel strings
    double eta = 0.8;      // motor efficiency, in (0, 1]
    std::vector<OcvPoint> ocv_curve = {{0.0, 3.2}, {1.0, 3.9}};  // piecewise linear

    bool operator==(const BatteryParams&) const = default;
};

// Dynamic cell state: RC branch voltages and state of charge.
struct BatteryState {
    double V_1 = 0.0;
    double V_2 = 0.0;
    double S = 0.5;

    bool operator==(const BatteryState&) const = default;
};

struct VehicleBodyParams {
    double m = 1500.0;   // mass [kg]
    double rho = 1.2;    // air density [kg/m^3]
    double A = 2.0;      // frontal area [m^2]
    double C_d = 0.3;    // drag coefficient
    double C_r = 0.01;   // rolling-resistance coefficient
    double theta = 0.0;  // road grade [rad], |theta| < pi/2
    double g = 9.81;     // gravitational acceleration [m/s^2]

    bool operator==(const VehicleBodyParams&) const = default;
};

// Bridge between the dimensionless traffic units and the SI battery chain.
struct UnitScaling {
    double length_scale = 10.0;  // meters per model length unit
    double time_scale = 1.0;     // seconds per model time unit

    double velocity_si(double v) const { return v * length_scale / time_scale; }
    double accel_si(double a) const { return a * length_scale / (time_scale * time_scale); }
    double seconds(double t) const { return t * time_scale; }

    bool operator==(const UnitScaling&) const = default;
};

// Demanded cell power exceeds what the cell can deliver at this state.
class PowerCapabilityError : public std::runtime_error {
  public:
    PowerCapabilityError(double demanded, double max_deliverable);

    double demanded = 0.0;
    double max_deliverable = 0.0;
};

// Raw heat rate below this (negative) threshold breaches the Q >= 0
// constraint; values inside [-tolerance, 0) are treated as float noise.
inline constexpr double kHeatBreachTolerance = 1e-9;

struct HeatRate {
    double value = 0.0;  // clamped to 0 when within noise of zero
    bool breach = false;
};

std::vector<std::string> battery_violations(const BatteryParams& params);
std::vector<std::string> body_violations(const VehicleBodyParams& body);

// Piecewise-linear OCV lookup; clamps to the end breakpoints outside their range.
double open_circuit_voltage(const BatteryParams& params, double soc);

// V_OCV(S) - V_1 - V_2 - I R_s. Current is positive on discharge.
double terminal_voltage(const BatteryState& state, double current, const BatteryParams& params);

// dV_i/dt = -V_i / (R_i C_i) + I / C_i, for both RC branches.
std::pair<double, double> rc_derivatives(const BatteryState& state, double current,
                                         const BatteryParams& params);

// dS/dt = -I / (3600 C_n).
double soc_derivative(double current, const BatteryParams& params);

// Heat rate I (V_1 + V_2 + R_s I). Flags a breach when the raw value drops
// below -kHeatBreachTolerance (the value then carries the raw number so the
// caller can log its magnitude).
HeatRate power_loss(const BatteryState& state, double current, const BatteryParams& params);

// Drag + rolling resistance + grade: 0.5 rho A C_d v^2 + C_r m g + m g sin(theta).
double resistive_force(double v, const VehicleBodyParams& body);

// Mechanical power (m a + resistive force) v. Negative during regeneration.
double motor_power_from_dynamics(double v, double a, const VehicleBodyParams& body);

// Per-cell electrical power for a demanded motor power. Discharge pays the
// efficiency, regeneration is credited only the eta fraction.
double cell_power_from_motor(double p_motor, const BatteryParams& params);

// Solves I (V_OCV - V_1 - V_2 - I R_s) = p_output for the smaller-magnitude
// (physical) root. Throws PowerCapabilityError when the demand exceeds
// V_eff^2 / (4 R_s).
double solve_cell_current(double p_output, const BatteryState& state,
                          const BatteryParams& params);

// Advances the cell by dt seconds under constant current, using the exact
// exponential solution for the RC branches and the exact linear SOC step.
BatteryState step_battery(const BatteryState& state, double current, double dt,
                          const BatteryParams& params);

struct CurrentProfileResult {
    std::vector<double> profile;  // one current level per step
    double heat_integral = 0.0;   // integral of the raw heat rate
    bool feasible = true;         // heat rate and SOC constraints held throughout
};

struct ZeroCurrentReport {
    std::vector<CurrentProfileResult> ranking;     // feasible, sorted by heat integral
    std::vector<CurrentProfileResult> infeasible;  // discarded profiles
    bool zero_profile_optimal = false;  // all-zero attains the feasible minimum
    bool zero_profile_unique = false;   // strictly below every other feasible profile
};

// Brute-force enumeration of piecewise-constant current profiles over the
// grid (which must contain 0), integrating the heat rate for each and
// ranking the feasible ones. The all-zero profile is expected to win.
ZeroCurrentReport verify_zero_current_optimality(double horizon, const std::vector<double>& grid,
                                                 int steps, const BatteryState& start,
                                                 const BatteryParams& params);

}  // namespace evp
