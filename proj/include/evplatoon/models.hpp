#pragma once

#include <utility>
#include <vector>

#include "evplatoon/core.hpp"

namespace evp {

// Instantaneous inputs to a follower's acceleration law.
struct FollowerInput {
    double lead_position = 0.0;
    double lead_velocity = 0.0;
    double ego_position = 0.0;
    double ego_velocity = 0.0;
};

// Acceleration schedule of the lead vehicle.
//   constant           a(t) = accel
//   table              hold-last over (time, accel) breakpoints; 0 before the first
//   paper_fluctuating  the fluctuating benchmark profile, active on [0, 20]
struct LeadProfile {
    enum class Kind { constant, table, paper_fluctuating };

    Kind kind = Kind::constant;
    double accel = 0.0;
    std::vector<std::pair<double, double>> breakpoints;

    static LeadProfile constant(double accel);
    static LeadProfile table(std::vector<std::pair<double, double>> breakpoints);
    static LeadProfile paper_fluctuating();

    bool operator==(const LeadProfile&) const = default;
};

// Deceleration term trading speed for energy savings:
// -kappa v^2 (v_l - v)^2 / ((v_l - v)^2 + epsilon). Never positive; exactly
// zero at rest and at matched speeds.
double energy_control_term(double v, double v_l, double kappa, double epsilon);

// Follow-the-leader baseline:
// alpha [V(x_l - x) - v] + beta (v_l - v) / (x_l - x)^2.
double ovfl_accel(const FollowerInput& input, const ModelParams& params);

// The energy-aware law: ovfl_accel plus the control term. The decomposition
// proposed = ovfl + energy_control_term holds exactly, by construction.
double proposed_accel(const FollowerInput& input, const ModelParams& params);

double lead_accel(const LeadProfile& profile, double t);

// Time after which the profile applies no further acceleration, used as the
// start of post-perturbation analysis windows. Constant profiles with a != 0
// never go quiet; the caller gets the largest representable time for those.
double lead_profile_quiet_time(const LeadProfile& profile);

}  // namespace evp
