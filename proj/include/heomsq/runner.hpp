// runner.hpp: Simulation configuration, single runs, sweeps and the oracle battery

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "heomsq/hierarchy.hpp"
#include "heomsq/observables.hpp"
#include "heomsq/propagator.hpp"

namespace heomsq::cli {

struct SimulationConfig {
    double omega0{1.0};
    double lambda{0.03};
    double gamma{0.15};
    double beta{4.0};
    int n_spins{10};
    double theta{0.3141592653589793};  // pi / 10
    int matsubara_terms{2};
    int hierarchy_depth{6};
    heom::CouplingAxis coupling_axis{heom::CouplingAxis::x};
    // dt <= 0 selects min(0.01, 0.1 / max(omega0, nu_M)).
    double dt{0.0};
    double t_max{60.0};
    int sample_stride{10};
    int error_check_stride{100};
    double step_err_ceiling{1e-6};
    std::size_t max_ados{heom::kDefaultMaxAdos};
    std::string output_path{"trajectory.csv"};
    int threads{1};

    void validate() const;
};

// Names accepted by apply_setting / config files / --key overrides.
const std::vector<std::string>& config_keys();

// Throws ConfigError on unknown keys or malformed values. Angles accept
// plain numbers as well as "pi", "pi/10", "0.1*pi" forms.
void apply_setting(SimulationConfig& cfg, const std::string& key, const std::string& value);

// Flat "key = value" lines, '#' starts a comment.
SimulationConfig parse_config(std::istream& in, SimulationConfig base = {});
SimulationConfig load_config_file(const std::string& path, SimulationConfig base = {});

bath::BathSpectrum spectrum_of(const SimulationConfig& cfg);
double resolved_dt(const SimulationConfig& cfg, const bath::MatsubaraExpansion& exp);

struct RunResult {
    std::vector<prop::TrajectoryPoint> points;
    std::vector<obs::SqueezingSample> samples;
    std::size_t leakage_warnings{0};
};

// Integrates the configured two-qubit hierarchy and evaluates every sample.
RunResult simulate(const SimulationConfig& cfg);

inline constexpr const char* kCsvHeader =
    "t,zeta_ku_sq,zeta_t_sq,xi_ku_sq,xi_t_sq,varsigma_sq,concurrence,c_r,sigma_z,sigma_zz,y,u_re,u_im,"
    "sigma_dot,trace_err,herm_err,parity_err,step_err";

void write_csv(std::ostream& out, const RunResult& result);

// simulate() followed by write_csv() to cfg.output_path.
RunResult run(const SimulationConfig& cfg);

// ---------------------------------------------------------------------------
// Feature extraction

inline constexpr double kVanishThreshold = 1e-4;
inline constexpr double kReviveThreshold = 2e-4;

// First time at which values drop to <= threshold.
std::optional<double> first_vanishing(std::span<const double> t, std::span<const double> values,
                                      double threshold = kVanishThreshold);

// Number of times the curve, after vanishing (<= threshold), rises back
// above rearm.
int count_revivals(std::span<const double> values, double threshold = kVanishThreshold,
                   double rearm = kReviveThreshold);

struct TrajectoryFeatures {
    std::optional<double> first_vanish_zeta_t;
    std::optional<double> first_vanish_zeta_ku;
    std::optional<double> first_vanish_c_r;
    int c_r_revivals{0};
    int zeta_t_revivals{0};
    double min_zeta_ku{0.0};
    double final_zeta_ku{0.0};
    double initial_c_r{0.0};
};

TrajectoryFeatures extract_features(const std::vector<obs::SqueezingSample>& samples);

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepAxis { beta, n_spins };

SweepAxis parse_axis(const std::string& name);
std::vector<double> parse_values(const std::string& list);

struct SweepEntry {
    double value{0.0};
    std::string csv_path;
    TrajectoryFeatures features;
};

// Worker count: HEOM_THREADS if set and positive, otherwise the hardware concurrency.
int thread_budget();

// One CSV per value in out_dir plus out_dir/summary.csv. Runs members
// concurrently on up to `workers` threads. Throws ConfigError on an empty list.
std::vector<SweepEntry> sweep(const SimulationConfig& base, SweepAxis axis, const std::vector<double>& values,
                              const std::string& out_dir, int workers);

void write_summary(std::ostream& out, SweepAxis axis, const std::vector<SweepEntry>& entries);

// Gnuplot script plotting the squeezing/concurrence columns on a log time axis.
void write_gnuplot_script(std::ostream& out, const std::string& csv_path);

// ---------------------------------------------------------------------------
// Oracle battery

struct VerifyOptions {
    int max_spins{12};
    // Mutation switch used to demonstrate that the dephasing check is sensitive
    // to the terminator coefficient.
    bool flip_terminator_sign{false};
};

struct VerifyCheck {
    std::string name;
    bool passed{false};
    std::string detail;
};

// Throws ConfigError if max_spins exceeds the brute-force limit.
std::vector<VerifyCheck> verify(const VerifyOptions& opts = {});

// Single-qubit sigma_z-coupled hierarchy vs the analytic envelope over
// [0, t_max]; returns the largest relative error of |rho_01(t)/rho_01(0)|.
struct DephasingComparison {
    double max_rel_err{0.0};
    double t_at_max{0.0};
};
DephasingComparison compare_dephasing(const bath::BathSpectrum& spec, int heom_terms, int depth,
                                      int reference_terms, double t_max, double dt,
                                      bool flip_terminator_sign = false);

}  // namespace heomsq::cli
