#include "evplatoon/energy.hpp"

#include <ostream>
#include <sstream>
#include <stdexcept>

#include "evplatoon/format.hpp"
#include "evplatoon/parallel.hpp"

namespace evp {

double g_leaky(double u, double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("g_leaky: eta must be in (0, 1]");
    return u >= 0.0 ? u / eta : eta * u;
}

double instantaneous_energy(double v, double v_dot, double eta) {
    return v * g_leaky(v_dot, eta);
}

double energy_per_unit_mass(std::span<const double> t, std::span<const double> v,
                            std::span<const double> v_dot, double eta) {
    if (t.size() < 2) {
        throw std::invalid_argument("energy_per_unit_mass: need at least 2 samples");
    }
    if (v.size() != t.size() || v_dot.size() != t.size()) {
        throw std::invalid_argument("energy_per_unit_mass: series lengths must match");
    }
    double sum = 0.0;
    double prev = instantaneous_energy(v[0], v_dot[0], eta);
    for (std::size_t k = 1; k < t.size(); ++k) {
        const double cur = instantaneous_energy(v[k], v_dot[k], eta);
        sum += 0.5 * (prev + cur) * (t[k] - t[k - 1]);
        prev = cur;
    }
    return sum;
}

EnergyReport energy_report(const Trajectory& traj, std::string label, double eta) {
    EnergyReport report;
    report.model_label = std::move(label);
    report.eta = eta;
    report.t0 = traj.time.front();
    report.tf = traj.time.back();
    for (std::size_t i = 1; i < traj.vehicles.size(); ++i) {
        const auto& ego = traj.vehicles[i];
        report.per_vehicle.emplace_back(
            static_cast<int>(i),
            energy_per_unit_mass(traj.time, ego.velocity, ego.acceleration, eta));
    }
    return report;
}

ModelComparison compare_models(const Scenario& scenario, const std::vector<ModelKind>& models,
                               unsigned jobs) {
    if (models.empty()) throw std::invalid_argument("compare_models: no models given");
    validate_scenario(scenario);

    ModelComparison cmp;
    cmp.labels.reserve(models.size());
    for (auto kind : models) cmp.labels.emplace_back(model_label(kind));
    for (std::size_t i = 1; i <= scenario.initial.followers.size(); ++i) {
        cmp.vehicles.push_back(static_cast<int>(i));
    }
    cmp.omega.resize(models.size());

    parallel_for(models.size(), jobs, [&](std::size_t m) {
        Scenario sc = scenario;
        sc.follower_models.assign(sc.initial.followers.size(), models[m]);
        try {
            const Trajectory traj = integrate_platoon(sc);
            auto& omega = cmp.omega[m];
            for (std::size_t i = 1; i < traj.vehicles.size(); ++i) {
                const auto& ego = traj.vehicles[i];
                omega.push_back(
                    energy_per_unit_mass(traj.time, ego.velocity, ego.acceleration, sc.eta));
            }
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << cmp.labels[m] << ": " << e.what();
            throw std::runtime_error(msg.str());
        }
    });

    cmp.pct_change.resize(models.size());
    for (std::size_t m = 0; m < models.size(); ++m) {
        for (std::size_t i = 0; i < cmp.vehicles.size(); ++i) {
            const double base = cmp.omega[0][i];
            cmp.pct_change[m].push_back((cmp.omega[m][i] - base) / base * 100.0);
        }
    }
    return cmp;
}

void write_comparison_csv(std::ostream& out, const ModelComparison& cmp) {
    out << "vehicle,model,omega,pct_change\n";
    for (std::size_t i = 0; i < cmp.vehicles.size(); ++i) {
        for (std::size_t m = 0; m < cmp.labels.size(); ++m) {
            out << cmp.vehicles[i] << ',' << cmp.labels[m] << ',' << num9(cmp.omega[m][i]) << ','
                << num9(cmp.pct_change[m][i]) << "\n";
        }
    }
}

}  // namespace evp
