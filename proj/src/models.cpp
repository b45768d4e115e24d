#include "evplatoon/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace evp {

namespace {

// Fluctuating benchmark profile: amplitude 1.65/1.37, a slow half-pi sine
// plus a fast 3.2-pi cosine, active on [0, 20].
constexpr double kFluctAmplitude = 1.65 / 1.37;
constexpr double kFluctSlowFreq = 0.5 * std::numbers::pi;
constexpr double kFluctFastFreq = 3.2 * std::numbers::pi;
constexpr double kFluctWindowEnd = 20.0;

}  // namespace

LeadProfile LeadProfile::constant(double accel) {
    LeadProfile p;
    p.kind = Kind::constant;
    p.accel = accel;
    return p;
}

LeadProfile LeadProfile::table(std::vector<std::pair<double, double>> breakpoints) {
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
        if (!(breakpoints[i].first > breakpoints[i - 1].first)) {
            throw std::invalid_argument(
                "lead profile breakpoints must be strictly increasing in time");
        }
    }
    LeadProfile p;
    p.kind = Kind::table;
    p.breakpoints = std::move(breakpoints);
    return p;
}

LeadProfile LeadProfile::paper_fluctuating() {
    LeadProfile p;
    p.kind = Kind::paper_fluctuating;
    return p;
}

double energy_control_term(double v, double v_l, double kappa, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("energy_control_term: epsilon must be positive");
    const double dv = v_l - v;
    const double dv2 = dv * dv;
    return -kappa * v * v * (dv2 / (dv2 + epsilon));
}

double ovfl_accel(const FollowerInput& input, const ModelParams& params) {
    const double spacing = input.lead_position - input.ego_position;
    if (!(spacing > kCollisionSpacing)) throw CollisionError(spacing);
    const double dv = input.lead_velocity - input.ego_velocity;
    return params.alpha * (optimal_velocity(spacing) - input.ego_velocity) +
           params.beta * dv / (spacing * spacing);
}

double proposed_accel(const FollowerInput& input, const ModelParams& params) {
    return ovfl_accel(input, params) +
           energy_control_term(input.ego_velocity, input.lead_velocity, params.kappa,
                               params.epsilon);
}

double lead_accel(const LeadProfile& profile, double t) {
    switch (profile.kind) {
        case LeadProfile::Kind::constant:
            return profile.accel;
        case LeadProfile::Kind::paper_fluctuating:
            if (t < 0.0 || t > kFluctWindowEnd) return 0.0;
            return -kFluctAmplitude *
                   (std::sin(kFluctSlowFreq * t) + std::cos(kFluctFastFreq * t));
        case LeadProfile::Kind::table: {
            // hold-last: value of the latest breakpoint at or before t
            const auto& pts = profile.breakpoints;
            auto it = std::upper_bound(pts.begin(), pts.end(), t,
                                       [](double v, const auto& p) { return v < p.first; });
            if (it == pts.begin()) return 0.0;
            return std::prev(it)->second;
        }
    }
    return 0.0;
}

double lead_profile_quiet_time(const LeadProfile& profile) {
    switch (profile.kind) {
        case LeadProfile::Kind::constant:
            return profile.accel == 0.0 ? -std::numeric_limits<double>::infinity()
                                        : std::numeric_limits<double>::max();
        case LeadProfile::Kind::paper_fluctuating:
            return kFluctWindowEnd;
        case LeadProfile::Kind::table: {
            // quiet from the last breakpoint on, provided it holds zero
            if (profile.breakpoints.empty()) return -std::numeric_limits<double>::infinity();
            const auto& last = profile.breakpoints.back();
            return last.second == 0.0 ? last.first : std::numeric_limits<double>::max();
        }
    }
    return 0.0;
}

}  // namespace evp
