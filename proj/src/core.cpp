#include "evplatoon/core.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace evp {

namespace {

const double kTanh2 = std::tanh(2.0);

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

std::string collision_message(double time, int lead_index, int follower_index, double spacing) {
    char buf[160];
    if (time >= 0.0) {
        std::snprintf(buf, sizeof(buf),
                      "collision: vehicle %d reached vehicle %d at t=%.9g (spacing %.3g)",
                      follower_index, lead_index, time, spacing);
    } else {
        std::snprintf(buf, sizeof(buf), "collision: spacing %.3g at or below guard %.1g",
                      spacing, kCollisionSpacing);
    }
    return buf;
}

}  // namespace

CollisionError::CollisionError(double time_, int lead_index_, int follower_index_, double spacing_)
    : std::runtime_error(collision_message(time_, lead_index_, follower_index_, spacing_)),
      time(time_),
      lead_index(lead_index_),
      follower_index(follower_index_),
      spacing(spacing_) {}

CollisionError::CollisionError(double spacing_)
    : std::runtime_error(collision_message(-1.0, -1, -1, spacing_)), spacing(spacing_) {}

ValidationError::ValidationError(std::vector<std::string> violations_)
    : std::invalid_argument(join(violations_, "; ")), violations(std::move(violations_)) {}

double v_max_supremum() { return kTanh2 + 1.0; }

std::pair<double, double> optimal_velocity_range() { return {kTanh2 - 1.0, kTanh2 + 1.0}; }

double optimal_velocity(double headway) {
    if (!std::isfinite(headway)) {
        throw std::domain_error("optimal_velocity: headway must be finite");
    }
    return std::tanh(headway - 2.0) + kTanh2;
}

double optimal_velocity_inverse(double v_bar) {
    const auto [lo, hi] = optimal_velocity_range();
    if (!std::isfinite(v_bar) || v_bar <= lo || v_bar >= hi) {
        std::ostringstream msg;
        msg << "optimal_velocity_inverse: " << v_bar << " outside the open interval (" << lo
            << ", " << hi << ")";
        throw std::domain_error(msg.str());
    }
    return 2.0 + std::atanh(v_bar - kTanh2);
}

std::vector<std::string> param_violations(const ModelParams& params) {
    std::vector<std::string> out;
    if (!(params.alpha > 0.0)) out.push_back("alpha must be positive");
    if (!(params.beta > 0.0)) out.push_back("beta must be positive");
    if (!(params.kappa >= 0.0)) out.push_back("kappa must be non-negative");
    if (!(params.epsilon > 0.0)) out.push_back("epsilon must be positive");
    if (!(params.beta > params.alpha)) out.push_back("beta must exceed alpha");
    if (!(params.kappa < params.alpha && params.kappa < params.beta)) {
        out.push_back("kappa must be below alpha and beta");
    }
    if (!(params.v_max > 0.0)) out.push_back("v_max must be positive");
    return out;
}

ModelParams validate_params(const ModelParams& params) {
    auto violations = param_violations(params);
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return params;
}

std::vector<std::string> platoon_violations(const PlatoonState& state, double v_max) {
    std::vector<std::string> out;
    auto check_velocity = [&](int index, double v) {
        if (!(v >= 0.0 && v <= v_max)) {
            std::ostringstream msg;
            msg << "initial velocity of vehicle " << index << " (" << v << ") outside [0, "
                << v_max << "]";
            out.push_back(msg.str());
        }
    };
    check_velocity(0, state.lead.velocity);
    double ahead = state.lead.position;
    for (std::size_t i = 0; i < state.followers.size(); ++i) {
        const auto& f = state.followers[i];
        if (!(ahead - f.position > 0.0)) {
            std::ostringstream msg;
            msg << "spacing between vehicle " << i << " and vehicle " << (i + 1)
                << " must be positive";
            out.push_back(msg.str());
        }
        check_velocity(static_cast<int>(i + 1), f.velocity);
        ahead = f.position;
    }
    return out;
}

}  // namespace evp
