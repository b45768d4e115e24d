#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace evp {

// Spacing at or below this value counts as contact. Keeps the 1/spacing^2
// terms away from the floating-point blowup one step before true contact.
inline constexpr double kCollisionSpacing = 1e-9;

// Slack applied to velocity-bound checks during integration.
inline constexpr double kVelocityTolerance = 1e-9;

// Car-following coefficients shared by every acceleration law.
struct ModelParams {
    double alpha = 2.0;     // relaxation gain toward the target speed  [1/time]
    double beta = 3.0;      // follow-the-leader gain                   [length^2/time]
    double kappa = 0.03;    // energy-control gain                      [1/length]
    double epsilon = 1e-6;  // smoothing constant of the control term
    double v_max = 0.0;     // speed cap; 0 requests the default (supremum of V)

    bool operator==(const ModelParams&) const = default;
};

struct VehicleState {
    double position = 0.0;
    double velocity = 0.0;

    bool operator==(const VehicleState&) const = default;
};

// Snapshot of the whole platoon. Vehicle 0 is the lead, followers are ordered
// front to back; spacing between consecutive vehicles must stay positive.
struct PlatoonState {
    double time = 0.0;
    VehicleState lead;
    std::vector<VehicleState> followers;

    bool operator==(const PlatoonState&) const = default;
};

// Fatal contact between a vehicle and its predecessor.
class CollisionError : public std::runtime_error {
  public:
    CollisionError(double time, int lead_index, int follower_index, double spacing);
    explicit CollisionError(double spacing);

    double time = -1.0;       // < 0 when unknown (raised outside an integration)
    int lead_index = -1;
    int follower_index = -1;
    double spacing = 0.0;
};

// Carries the complete list of violated parameter/state rules.
class ValidationError : public std::invalid_argument {
  public:
    explicit ValidationError(std::vector<std::string> violations);

    std::vector<std::string> violations;
};

// Supremum of the optimal velocity function, tanh(2) + 1. Used as the default
// speed cap since V never reaches it.
double v_max_supremum();

// Open range (lower, upper) of the optimal velocity function.
std::pair<double, double> optimal_velocity_range();

// Target speed for a given headway: tanh(u - 2) + tanh(2). Strictly
// increasing, bounded in (tanh(2) - 1, tanh(2) + 1).
double optimal_velocity(double headway);

// Headway whose target speed equals v_bar: 2 + artanh(v_bar - tanh(2)).
// v_bar must lie strictly inside the range of optimal_velocity.
double optimal_velocity_inverse(double v_bar);

// Every violated parameter rule, one message per rule; empty when valid.
std::vector<std::string> param_violations(const ModelParams& params);

// Returns the params unchanged when valid, otherwise throws a ValidationError
// listing every violated rule.
ModelParams validate_params(const ModelParams& params);

// Initial-state rules: positive spacing between consecutive vehicles and all
// velocities inside [0, v_max].
std::vector<std::string> platoon_violations(const PlatoonState& state, double v_max);

}  // namespace evp
