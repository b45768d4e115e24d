#include "evplatoon/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "evplatoon/energy.hpp"
#include "evplatoon/format.hpp"
#include "evplatoon/parallel.hpp"

namespace evp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string lead_velocity_message(double time, double velocity) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "lead profile drove the lead velocity to %.9g at t=%.9g, outside [0, v_max]",
                  velocity, time);
    return buf;
}

}  // namespace

const char* model_label(ModelKind kind) {
    return kind == ModelKind::proposed ? "proposed" : "ovfl";
}

LeadVelocityError::LeadVelocityError(double time_, double velocity_)
    : std::runtime_error(lead_velocity_message(time_, velocity_)),
      time(time_),
      velocity(velocity_) {}

const char* event_name(EventType type) {
    switch (type) {
        case EventType::negative_velocity: return "negative_velocity";
        case EventType::over_v_max: return "over_v_max";
        case EventType::soc_out_of_range: return "soc_out_of_range";
        case EventType::heat_negative: return "heat_negative";
    }
    return "unknown";
}

bool Trajectory::has_event(EventType type) const {
    return std::any_of(events.begin(), events.end(),
                       [type](const Event& e) { return e.type == type; });
}

std::vector<std::string> scenario_violations(const Scenario& sc) {
    std::vector<std::string> out = param_violations(sc.params);
    if (!(sc.dt > 0.0)) out.push_back("dt must be positive");
    if (!(sc.tf > sc.t0)) out.push_back("tf must exceed t0");
    if (!(sc.eta > 0.0 && sc.eta <= 1.0)) out.push_back("eta must be in (0, 1]");
    if (sc.follower_models.size() != sc.initial.followers.size()) {
        out.push_back("follower model list must match the follower count");
    }
    auto platoon = platoon_violations(sc.initial, sc.params.v_max);
    out.insert(out.end(), platoon.begin(), platoon.end());
    if (sc.battery) {
        auto cell = battery_violations(sc.battery->cell);
        out.insert(out.end(), cell.begin(), cell.end());
        auto body = body_violations(sc.battery->body);
        out.insert(out.end(), body.begin(), body.end());
        if (!(sc.battery->scaling.length_scale > 0.0)) out.push_back("length_scale must be positive");
        if (!(sc.battery->scaling.time_scale > 0.0)) out.push_back("time_scale must be positive");
        if (!(sc.battery->initial.S >= 0.0 && sc.battery->initial.S <= 1.0)) {
            out.push_back("initial SOC must be in [0, 1]");
        }
    }
    return out;
}

Scenario validate_scenario(const Scenario& sc) {
    auto violations = scenario_violations(sc);
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return sc;
}

namespace {

// Flat state layout: [x0, v0, x1, v1, ...] with vehicle 0 the lead.
class PlatoonSystem {
  public:
    explicit PlatoonSystem(const Scenario& sc) : sc_(sc), n_(sc.initial.followers.size()) {}

    std::size_t dim() const { return 2 * (n_ + 1); }

    void derivative(double t, const std::vector<double>& y, std::vector<double>& dy) const {
        dy[0] = y[1];
        dy[1] = lead_accel(sc_.lead, t);
        for (std::size_t i = 1; i <= n_; ++i) {
            const double spacing = y[2 * (i - 1)] - y[2 * i];
            if (!(spacing > kCollisionSpacing)) {
                throw CollisionError(t, static_cast<int>(i - 1), static_cast<int>(i), spacing);
            }
            FollowerInput in{y[2 * (i - 1)], y[2 * (i - 1) + 1], y[2 * i], y[2 * i + 1]};
            dy[2 * i] = y[2 * i + 1];
            dy[2 * i + 1] = sc_.follower_models[i - 1] == ModelKind::proposed
                                ? proposed_accel(in, sc_.params)
                                : ovfl_accel(in, sc_.params);
        }
    }

  private:
    const Scenario& sc_;
    std::size_t n_;
};

// One classical RK4 step; deriv_start must already hold f(t, y).
void rk4_step(const PlatoonSystem& sys, double t, double h, std::vector<double>& y,
              const std::vector<double>& deriv_start, std::vector<double>& k2,
              std::vector<double>& k3, std::vector<double>& k4, std::vector<double>& scratch) {
    const std::size_t dim = y.size();
    for (std::size_t j = 0; j < dim; ++j) scratch[j] = y[j] + 0.5 * h * deriv_start[j];
    sys.derivative(t + 0.5 * h, scratch, k2);
    for (std::size_t j = 0; j < dim; ++j) scratch[j] = y[j] + 0.5 * h * k2[j];
    sys.derivative(t + 0.5 * h, scratch, k3);
    for (std::size_t j = 0; j < dim; ++j) scratch[j] = y[j] + h * k3[j];
    sys.derivative(t + h, scratch, k4);
    for (std::size_t j = 0; j < dim; ++j) {
        y[j] += h / 6.0 * (deriv_start[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
}

// Tracks onset-only event logging per (vehicle, event type).
class EventLogger {
  public:
    EventLogger(std::size_t vehicles, std::vector<Event>& log) : log_(log) {
        for (auto& flags : active_) flags.assign(vehicles, 0);
    }

    void update(EventType type, std::size_t vehicle, bool violated, double t, double value) {
        char& flag = active_[static_cast<std::size_t>(type)][vehicle];
        if (violated && !flag) log_.push_back({t, static_cast<int>(vehicle), type, value});
        flag = violated ? 1 : 0;
    }

  private:
    std::array<std::vector<char>, 4> active_;
    std::vector<Event>& log_;
};

}  // namespace

Trajectory integrate_platoon(const Scenario& sc) {
    const std::size_t n_follow = sc.initial.followers.size();
    const std::size_t n_vehicles = n_follow + 1;
    PlatoonSystem sys(sc);

    std::vector<double> y(sys.dim());
    y[0] = sc.initial.lead.position;
    y[1] = sc.initial.lead.velocity;
    for (std::size_t i = 0; i < n_follow; ++i) {
        y[2 * (i + 1)] = sc.initial.followers[i].position;
        y[2 * (i + 1) + 1] = sc.initial.followers[i].velocity;
    }

    const double span = sc.tf - sc.t0;
    const auto n_steps = static_cast<std::size_t>(std::ceil(span / sc.dt - 1e-12));

    Trajectory traj;
    traj.time.reserve(n_steps + 1);
    traj.vehicles.resize(n_vehicles);
    for (auto& v : traj.vehicles) {
        v.position.reserve(n_steps + 1);
        v.velocity.reserve(n_steps + 1);
        v.acceleration.reserve(n_steps + 1);
    }
    traj.has_battery_channels = sc.battery.has_value();

    std::vector<BatteryState> cells;
    std::vector<double> prev_current(n_vehicles, 0.0);
    if (sc.battery) {
        cells.assign(n_vehicles, sc.battery->initial);
        for (auto& v : traj.vehicles) {
            v.current.reserve(n_steps + 1);
            v.terminal_volts.reserve(n_steps + 1);
            v.soc.reserve(n_steps + 1);
            v.heat.reserve(n_steps + 1);
            v.v1.reserve(n_steps + 1);
            v.v2.reserve(n_steps + 1);
        }
    }

    EventLogger logger(n_vehicles, traj.events);
    std::vector<double> deriv(sys.dim()), k2(sys.dim()), k3(sys.dim()), k4(sys.dim()),
        scratch(sys.dim());

    auto record = [&](double t, double h_from_prev) {
        traj.time.push_back(t);
        for (std::size_t i = 0; i < n_vehicles; ++i) {
            traj.vehicles[i].position.push_back(y[2 * i]);
            traj.vehicles[i].velocity.push_back(y[2 * i + 1]);
            traj.vehicles[i].acceleration.push_back(deriv[2 * i + 1]);
        }

        const double v_lead = y[1];
        if (v_lead < -kVelocityTolerance || v_lead > sc.params.v_max + kVelocityTolerance) {
            throw LeadVelocityError(t, v_lead);
        }
        for (std::size_t i = 1; i < n_vehicles; ++i) {
            const double v = y[2 * i + 1];
            logger.update(EventType::negative_velocity, i, v < -kVelocityTolerance, t, v);
            if (v < -kVelocityTolerance && sc.fatal_negative_velocity) {
                std::ostringstream msg;
                msg << "negative velocity " << v << " for vehicle " << i << " at t=" << t;
                throw std::runtime_error(msg.str());
            }
            logger.update(EventType::over_v_max, i, v > sc.params.v_max + kVelocityTolerance, t, v);
        }

        if (sc.battery) {
            const auto& blk = *sc.battery;
            for (std::size_t i = 0; i < n_vehicles; ++i) {
                if (h_from_prev > 0.0) {
                    cells[i] = step_battery(cells[i], prev_current[i],
                                            blk.scaling.seconds(h_from_prev), blk.cell);
                }
                const double v_si = blk.scaling.velocity_si(y[2 * i + 1]);
                const double a_si = blk.scaling.accel_si(deriv[2 * i + 1]);
                const double p_motor = motor_power_from_dynamics(v_si, a_si, blk.body);
                const double p_cell = cell_power_from_motor(p_motor, blk.cell);
                const double current = solve_cell_current(p_cell, cells[i], blk.cell);
                const HeatRate q = power_loss(cells[i], current, blk.cell);
                auto& series = traj.vehicles[i];
                series.current.push_back(current);
                series.terminal_volts.push_back(terminal_voltage(cells[i], current, blk.cell));
                series.soc.push_back(cells[i].S);
                series.heat.push_back(q.value);
                series.v1.push_back(cells[i].V_1);
                series.v2.push_back(cells[i].V_2);
                prev_current[i] = current;
                logger.update(EventType::heat_negative, i, q.breach, t, q.value);
                const bool soc_bad = cells[i].S < 0.0 || cells[i].S > 1.0;
                logger.update(EventType::soc_out_of_range, i, soc_bad, t, cells[i].S);
            }
        }
    };

    double t = sc.t0;
    sys.derivative(t, y, deriv);
    record(t, 0.0);
    for (std::size_t step = 0; step < n_steps; ++step) {
        const double t_next = step + 1 == n_steps ? sc.tf : sc.t0 + (step + 1) * sc.dt;
        const double h = t_next - t;
        rk4_step(sys, t, h, y, deriv, k2, k3, k4, scratch);
        t = t_next;
        sys.derivative(t, y, deriv);
        record(t, h);
    }
    return traj;
}

std::pair<double, double> equilibrium(double v_bar) {
    return {optimal_velocity_inverse(v_bar), 0.0};
}

StabilityReport linearize_at_equilibrium(const ModelParams& params, double v_bar) {
    StabilityReport report;
    report.z_eq = optimal_velocity_inverse(v_bar);
    report.y_eq = 0.0;
    if (!(report.z_eq > kCollisionSpacing)) {
        throw std::domain_error(
            "degenerate equilibrium: spacing is zero, the 1/z^2 term is singular");
    }
    const double th = std::tanh(report.z_eq - 2.0);
    const double v_prime = 1.0 - th * th;  // sech^2(z_eq - 2)
    report.jacobian[0][0] = 0.0;
    report.jacobian[0][1] = 1.0;
    report.jacobian[1][0] = -params.alpha * v_prime;
    report.jacobian[1][1] = -params.alpha - params.beta / (report.z_eq * report.z_eq);

    const double tr = report.jacobian[0][0] + report.jacobian[1][1];
    const double det = report.jacobian[0][0] * report.jacobian[1][1] -
                       report.jacobian[0][1] * report.jacobian[1][0];
    const double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        report.eigenvalues[0] = {(tr + root) / 2.0, 0.0};
        report.eigenvalues[1] = {(tr - root) / 2.0, 0.0};
    } else {
        const double imag = std::sqrt(-disc) / 2.0;
        report.eigenvalues[0] = {tr / 2.0, imag};
        report.eigenvalues[1] = {tr / 2.0, -imag};
    }
    return report;
}

StabilityReport stability_metrics(const Trajectory& traj, double v_bar, double t_star) {
    StabilityReport report;
    report.z_eq = optimal_velocity_inverse(v_bar);
    report.y_eq = 0.0;
    if (traj.vehicles.size() < 2 || traj.time.empty()) return report;

    const std::size_t n_follow = traj.vehicles.size() - 1;
    const std::size_t last = traj.time.size() - 1;
    std::size_t first = 0;
    while (first < last && traj.time[first] < t_star) ++first;

    for (std::size_t i = 1; i <= n_follow; ++i) {
        const auto& ahead = traj.vehicles[i - 1];
        const auto& ego = traj.vehicles[i];
        double peak_z = 0.0;
        double peak_y = 0.0;
        for (std::size_t k = first; k <= last; ++k) {
            peak_z = std::max(peak_z, std::abs(ahead.position[k] - ego.position[k] - report.z_eq));
            peak_y = std::max(peak_y, std::abs(ahead.velocity[k] - ego.velocity[k]));
        }
        report.peak_spacing_dev.push_back(peak_z);
        report.peak_relative_velocity.push_back(peak_y);
        report.terminal_spacing_dev.push_back(
            std::abs(ahead.position[last] - ego.position[last] - report.z_eq));
        report.terminal_relative_velocity.push_back(
            std::abs(ahead.velocity[last] - ego.velocity[last]));
    }
    for (std::size_t i = 1; i < n_follow; ++i) {
        const double denom = report.peak_spacing_dev[i - 1];
        report.attenuation_ratio.push_back(
            denom > 0.0 ? report.peak_spacing_dev[i] / denom
                        : std::numeric_limits<double>::quiet_NaN());
    }
    return report;
}

namespace {

// First time from which every follower's deviation stays below tol; +inf when
// the run never settles.
double convergence_time(const Trajectory& traj, double z_eq, double tol) {
    const std::size_t last = traj.time.size() - 1;
    std::size_t settle = 0;
    for (std::size_t k = last + 1; k-- > 0;) {
        double dev = 0.0;
        for (std::size_t i = 1; i < traj.vehicles.size(); ++i) {
            const auto& ahead = traj.vehicles[i - 1];
            const auto& ego = traj.vehicles[i];
            dev = std::max(dev, std::abs(ahead.position[k] - ego.position[k] - z_eq));
            dev = std::max(dev, std::abs(ahead.velocity[k] - ego.velocity[k]));
        }
        if (dev >= tol) {
            settle = k + 1;
            break;
        }
        if (k == 0) return traj.time[0];
    }
    return settle > last ? kInf : traj.time[settle];
}

bool any_stall(const Trajectory& traj, double floor, double window) {
    for (std::size_t i = 1; i < traj.vehicles.size(); ++i) {
        const auto& v = traj.vehicles[i].velocity;
        double run_start = 0.0;
        bool below = false;
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (v[k] < floor) {
                if (!below) {
                    below = true;
                    run_start = traj.time[k];
                } else if (traj.time[k] - run_start >= window) {
                    return true;
                }
            } else {
                below = false;
            }
        }
    }
    return false;
}

}  // namespace

std::vector<SweepRow> sweep_kappa(const Scenario& base, const std::vector<double>& kappas,
                                  const SweepOptions& options) {
    for (double k : kappas) {
        if (!(k >= 0.0)) throw std::invalid_argument("kappa grid values must be non-negative");
    }
    const std::size_t n_follow = base.initial.followers.size();
    std::vector<std::vector<SweepRow>> blocks(kappas.size());

    parallel_for(kappas.size(), options.jobs, [&](std::size_t idx) {
        Scenario sc = base;
        sc.params.kappa = kappas[idx];
        sc.follower_models.assign(n_follow, ModelKind::proposed);
        auto& rows = blocks[idx];
        rows.resize(n_follow);
        for (std::size_t i = 0; i < n_follow; ++i) {
            rows[i].kappa = kappas[idx];
            rows[i].vehicle = static_cast<int>(i + 1);
        }
        try {
            const Trajectory traj = integrate_platoon(sc);
            const double v_bar = traj.vehicles[0].velocity.back();
            const double z_eq = optimal_velocity_inverse(v_bar);
            const double conv = convergence_time(traj, z_eq, options.convergence_tol);
            const double floor =
                options.stall_floor >= 0.0 ? options.stall_floor : 0.4 * sc.params.v_max;
            const bool stall = any_stall(traj, floor, options.stall_window);
            for (std::size_t i = 0; i < n_follow; ++i) {
                const auto& ego = traj.vehicles[i + 1];
                rows[i].omega = energy_per_unit_mass(traj.time, ego.velocity, ego.acceleration,
                                                     sc.eta);
                rows[i].convergence_time = conv;
                rows[i].stall = stall;
            }
        } catch (const std::exception& e) {
            for (auto& row : rows) {
                row.omega = std::numeric_limits<double>::quiet_NaN();
                row.convergence_time = std::numeric_limits<double>::quiet_NaN();
                row.error = e.what();
            }
        }
    });

    std::vector<SweepRow> out;
    out.reserve(kappas.size() * n_follow);
    for (auto& block : blocks) {
        for (auto& row : block) out.push_back(std::move(row));
    }
    return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,vehicle,x,v,a";
    if (traj.has_battery_channels) out << ",I,V_T,S,Q,V1,V2";
    out << "\n";
    for (std::size_t k = 0; k < traj.time.size(); ++k) {
        for (std::size_t i = 0; i < traj.vehicles.size(); ++i) {
            const auto& v = traj.vehicles[i];
            out << num9(traj.time[k]) << ',' << i << ',' << num9(v.position[k]) << ','
                << num9(v.velocity[k]) << ',' << num9(v.acceleration[k]);
            if (traj.has_battery_channels) {
                out << ',' << num9(v.current[k]) << ',' << num9(v.terminal_volts[k]) << ','
                    << num9(v.soc[k]) << ',' << num9(v.heat[k]) << ',' << num9(v.v1[k]) << ','
                    << num9(v.v2[k]);
            }
            out << "\n";
        }
    }
}

void write_events_log(std::ostream& out, const Trajectory& traj) {
    for (const auto& e : traj.events) {
        out << "t=" << num9(e.time) << " vehicle=" << e.vehicle << " event=" << event_name(e.type)
            << " value=" << num9(e.value) << "\n";
    }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "kappa,vehicle,omega,convergence_time,stall\n";
    for (const auto& row : rows) {
        out << num9(row.kappa) << ',' << row.vehicle << ',' << num9(row.omega) << ','
            << num9(row.convergence_time) << ',' << (row.stall ? "true" : "false") << "\n";
    }
}

}  // namespace evp
