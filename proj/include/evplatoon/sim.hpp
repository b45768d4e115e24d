#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "evplatoon/battery.hpp"
#include "evplatoon/core.hpp"
#include "evplatoon/models.hpp"

namespace evp {

enum class ModelKind { proposed, ovfl };

const char* model_label(ModelKind kind);

// Battery chain attached to every vehicle of a scenario. The chain is driven
// one-way by the accepted kinematics; it never feeds back into the dynamics.
struct BatteryBlock {
    BatteryParams cell;
    VehicleBodyParams body;
    UnitScaling scaling;
    BatteryState initial;

    bool operator==(const BatteryBlock&) const = default;
};

struct Scenario {
    ModelParams params;
    std::vector<ModelKind> follower_models;  // one entry per follower
    LeadProfile lead;
    PlatoonState initial;
    double t0 = 0.0;
    double tf = 70.0;
    double dt = 1e-3;
    double eta = 0.8;  // efficiency used by the energy accounting
    std::optional<BatteryBlock> battery;
    bool fatal_negative_velocity = false;

    bool operator==(const Scenario&) const = default;
};

std::vector<std::string> scenario_violations(const Scenario& scenario);
Scenario validate_scenario(const Scenario& scenario);  // throws ValidationError

// Lead vehicle left [0, v_max]; the acceleration profile is unusable.
class LeadVelocityError : public std::runtime_error {
  public:
    LeadVelocityError(double time, double velocity);
    double time = 0.0;
    double velocity = 0.0;
};

enum class EventType {
    negative_velocity,  // follower velocity dropped below zero
    over_v_max,         // follower velocity exceeded the cap
    soc_out_of_range,   // battery SOC left [0, 1]
    heat_negative,      // raw heat rate breached Q >= 0
};

const char* event_name(EventType type);

// Logged at episode onset only; value carries the offending quantity.
struct Event {
    double time = 0.0;
    int vehicle = 0;
    EventType type = EventType::negative_velocity;
    double value = 0.0;
};

struct VehicleSeries {
    std::vector<double> position;
    std::vector<double> velocity;
    std::vector<double> acceleration;
    // battery channels, present only when the scenario carries a battery block
    std::vector<double> current;
    std::vector<double> terminal_volts;
    std::vector<double> soc;
    std::vector<double> heat;
    std::vector<double> v1;
    std::vector<double> v2;
};

struct Trajectory {
    std::vector<double> time;
    std::vector<VehicleSeries> vehicles;  // [0] is the lead
    std::vector<Event> events;
    bool has_battery_channels = false;

    bool has_event(EventType type) const;
};

// Classical fixed-step RK4 over the coupled lead + follower states. Each
// follower couples only to its immediate predecessor. Collisions are fatal;
// velocity-bound violations are logged (negative follower velocity is fatal
// only when the scenario says so); the lead leaving [0, v_max] is fatal.
Trajectory integrate_platoon(const Scenario& scenario);

// (z_eq, y_eq) = (V^-1(v_bar), 0).
std::pair<double, double> equilibrium(double v_bar);

struct StabilityReport {
    double z_eq = 0.0;
    double y_eq = 0.0;
    double jacobian[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    std::complex<double> eigenvalues[2];
    // filled by stability_metrics, one entry per follower
    std::vector<double> peak_spacing_dev;
    std::vector<double> peak_relative_velocity;
    std::vector<double> attenuation_ratio;  // peak(n+1) / peak(n), spacing peaks
    std::vector<double> terminal_spacing_dev;
    std::vector<double> terminal_relative_velocity;
};

// Analytic Jacobian of the relative (spacing, relative-velocity) system at
// the equilibrium for a constant lead speed v_bar. The energy-control term
// contributes exactly zero to every entry. v_bar = 0 has zero equilibrium
// spacing and is reported as a degenerate equilibrium.
StabilityReport linearize_at_equilibrium(const ModelParams& params, double v_bar);

// Peak deviations from equilibrium over t > t_star, attenuation ratios
// between consecutive followers, and terminal deviations at the end.
StabilityReport stability_metrics(const Trajectory& trajectory, double v_bar, double t_star);

struct SweepRow {
    double kappa = 0.0;
    int vehicle = 0;
    double omega = 0.0;
    double convergence_time = 0.0;  // +inf when the run never settles
    bool stall = false;
    std::string error;  // per-run failure; empty when the run succeeded
};

// The convergence tolerance is coarser than the stability-metrics default on
// purpose: the platoon's slowest mode leaves ~5e-2 deviations at the end of
// the benchmark horizon, so a 1e-3 settle test would read "never" everywhere.
// The stall window must exceed the lead's own low-speed dips (~5 time units).
struct SweepOptions {
    double convergence_tol = 0.1;  // max deviation that counts as settled
    double stall_floor = -1.0;     // < 0 resolves to 0.4 * v_max at run time
    double stall_window = 10.0;    // sustained time below the floor
    unsigned jobs = 1;
};

// Runs the proposed model once per kappa value, recording energy, time to
// settle, and whether any follower stalled. Per-run errors land in the row.
// Kappa values beyond the stability rule are allowed here on purpose: probing
// the unstable regime is what the sweep is for.
std::vector<SweepRow> sweep_kappa(const Scenario& base, const std::vector<double>& kappas,
                                  const SweepOptions& options = {});

// CSV with header t,vehicle,x,v,a[,I,V_T,S,Q,V1,V2], one row per
// (time, vehicle), all values to 9 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

void write_events_log(std::ostream& out, const Trajectory& trajectory);

// CSV with header kappa,vehicle,omega,convergence_time,stall.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace evp
