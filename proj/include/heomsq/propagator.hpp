// propagator.hpp: Fixed-step RK4 integration of the hierarchy with diagnostics

#pragma once

#include <functional>
#include <vector>

#include "heomsq/bath_model.hpp"
#include "heomsq/hierarchy.hpp"

namespace heomsq::prop {

struct IntegrationConfig {
    double dt{0.01};
    double t_max{60.0};
    int sample_stride{10};
    // Every error_check_stride steps one dt step is compared with two dt/2 steps.
    int error_check_stride{100};
    double step_err_ceiling{1e-6};
    int threads{1};

    void validate() const;
};

struct TrajectoryPoint {
    double t{0.0};
    Eigen::MatrixXcd rho;  // tier-0 ADO
    double trace_err{0.0};
    double herm_err{0.0};
    double step_err{0.0};
};

// Largest step allowed for a model/expansion: 0.1 / max(omega0, nu_M).
double max_stable_step(const heom::SystemModel& model, const bath::MatsubaraExpansion& exp);

using SampleSink = std::function<void(const TrajectoryPoint&)>;

// Integrates from t = 0 to t_max with classical RK4 and returns the sampled
// trajectory (first sample at t = 0, last at t_max). When a sink is given,
// each sample is also handed to it as soon as it is produced.
// Throws ConfigError on precondition failures and NumericalError when an
// ADO entry becomes non-finite or step_err exceeds the ceiling.
std::vector<TrajectoryPoint> integrate(heom::HierarchyState state, const heom::SystemModel& model,
                                       const bath::MatsubaraExpansion& exp,
                                       const heom::HierarchyLayout& layout,
                                       const IntegrationConfig& cfg, const SampleSink& sink = {});

}  // namespace heomsq::prop
