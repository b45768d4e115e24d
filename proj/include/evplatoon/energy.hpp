#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "evplatoon/sim.hpp"

namespace evp {

// Leaky rectifier weighting accelerations at 1/eta and crediting
// decelerations at eta (regenerative braking recovers only that fraction).
double g_leaky(double u, double eta);

// Instantaneous energy cost per unit mass, v * g_leaky(v_dot).
double instantaneous_energy(double v, double v_dot, double eta);

// Trapezoidal quadrature of the instantaneous cost over the sampled window.
// Needs at least two samples; steps may be non-uniform.
double energy_per_unit_mass(std::span<const double> t, std::span<const double> v,
                            std::span<const double> v_dot, double eta);

struct EnergyReport {
    std::string model_label;
    double eta = 0.8;
    double t0 = 0.0;
    double tf = 0.0;
    std::vector<std::pair<int, double>> per_vehicle;  // follower index, omega
};

// Energy per unit mass of every follower in an integrated trajectory.
EnergyReport energy_report(const Trajectory& trajectory, std::string label, double eta);

struct ModelComparison {
    std::vector<std::string> labels;  // [0] is the baseline of the percent change
    std::vector<int> vehicles;
    std::vector<std::vector<double>> omega;       // [model][vehicle]
    std::vector<std::vector<double>> pct_change;  // [model][vehicle], zeros for the baseline
};

// Runs every model kind on the identical scenario and tabulates omega per
// follower plus percent change relative to the first model listed.
// Simulation errors are rethrown annotated with the model label.
ModelComparison compare_models(const Scenario& scenario, const std::vector<ModelKind>& models,
                               unsigned jobs = 1);

// CSV with header vehicle,model,omega,pct_change.
void write_comparison_csv(std::ostream& out, const ModelComparison& comparison);

}  // namespace evp
