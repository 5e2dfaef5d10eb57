// runner.cpp

#include "heomsq/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "heomsq/oracle.hpp"
#include "heomsq/spin_ensemble.hpp"

namespace heomsq::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string v = trim(text);
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x))
        throw ConfigError("config: '" + key + "' expects a number, got '" + text + "'");
    return x;
}

long parse_int(const std::string& key, const std::string& text) {
    const std::string v = trim(text);
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size())
        throw ConfigError("config: '" + key + "' expects an integer, got '" + text + "'");
    return x;
}

// "1.2", "pi", "pi/10", "0.1*pi", "2pi"
double parse_angle(const std::string& key, const std::string& text) {
    const std::string v = trim(text);
    const auto at = v.find("pi");
    if (at == std::string::npos) return parse_double(key, v);
    std::string factor = trim(v.substr(0, at));
    if (!factor.empty() && factor.back() == '*') factor = trim(factor.substr(0, factor.size() - 1));
    double value = std::numbers::pi * (factor.empty() ? 1.0 : parse_double(key, factor));
    const std::string tail = trim(v.substr(at + 2));
    if (!tail.empty()) {
        if (tail.front() != '/') throw ConfigError("config: cannot parse angle '" + text + "'");
        value /= parse_double(key, tail.substr(1));
    }
    return value;
}

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void SimulationConfig::validate() const {
    if (!(omega0 > 0.0)) throw ConfigError("config: omega0 must be > 0");
    if (!(lambda >= 0.0)) throw ConfigError("config: lambda must be >= 0");
    if (!(gamma > 0.0)) throw ConfigError("config: gamma must be > 0");
    if (!(beta > 0.0)) throw ConfigError("config: beta must be > 0");
    if (n_spins < 2) throw ConfigError("config: N must be >= 2");
    if (!std::isfinite(theta)) throw ConfigError("config: theta must be finite");
    if (matsubara_terms < 0) throw ConfigError("config: matsubara_terms must be >= 0");
    if (hierarchy_depth < 0) throw ConfigError("config: hierarchy_depth must be >= 0");
    if (!(t_max > 0.0)) throw ConfigError("config: t_max must be > 0");
    if (!std::isfinite(dt)) throw ConfigError("config: dt must be finite");
    if (sample_stride < 1) throw ConfigError("config: sample_stride must be >= 1");
    if (error_check_stride < 1) throw ConfigError("config: error_check_stride must be >= 1");
    if (!(step_err_ceiling > 0.0)) throw ConfigError("config: step_err_ceiling must be > 0");
    if (threads < 1) throw ConfigError("config: threads must be >= 1");
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "omega0", "lambda", "gamma", "beta", "N", "theta", "matsubara_terms", "hierarchy_depth",
        "coupling_axis", "dt", "t_max", "sample_stride", "error_check_stride", "step_err_ceiling",
        "max_ados", "output_path", "threads"};
    return keys;
}

void apply_setting(SimulationConfig& cfg, const std::string& raw_key, const std::string& value) {
    const std::string key = trim(raw_key);
    if (key == "omega0") cfg.omega0 = parse_double(key, value);
    else if (key == "lambda") cfg.lambda = parse_double(key, value);
    else if (key == "gamma") cfg.gamma = parse_double(key, value);
    else if (key == "beta") cfg.beta = parse_double(key, value);
    else if (key == "N") cfg.n_spins = static_cast<int>(parse_int(key, value));
    else if (key == "theta") cfg.theta = parse_angle(key, value);
    else if (key == "matsubara_terms" || key == "M") cfg.matsubara_terms = static_cast<int>(parse_int(key, value));
    else if (key == "hierarchy_depth" || key == "N_c") cfg.hierarchy_depth = static_cast<int>(parse_int(key, value));
    else if (key == "coupling_axis") {
        const std::string v = trim(value);
        if (v == "x") cfg.coupling_axis = heom::CouplingAxis::x;
        else if (v == "z") cfg.coupling_axis = heom::CouplingAxis::z;
        else throw ConfigError("config: coupling_axis must be 'x' or 'z', got '" + value + "'");
    }
    else if (key == "dt") cfg.dt = parse_double(key, value);
    else if (key == "t_max") cfg.t_max = parse_double(key, value);
    else if (key == "sample_stride") cfg.sample_stride = static_cast<int>(parse_int(key, value));
    else if (key == "error_check_stride") cfg.error_check_stride = static_cast<int>(parse_int(key, value));
    else if (key == "step_err_ceiling") cfg.step_err_ceiling = parse_double(key, value);
    else if (key == "max_ados") {
        const long n = parse_int(key, value);
        if (n < 1) throw ConfigError("config: max_ados must be >= 1");
        cfg.max_ados = static_cast<std::size_t>(n);
    }
    else if (key == "output_path") cfg.output_path = trim(value);
    else if (key == "threads") cfg.threads = static_cast<int>(parse_int(key, value));
    else throw ConfigError("config: unknown key '" + key + "'");
}

SimulationConfig parse_config(std::istream& in, SimulationConfig base) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not 'key = value'");
        apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
    }
    return base;
}

SimulationConfig load_config_file(const std::string& path, SimulationConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return parse_config(in, std::move(base));
}

bath::BathSpectrum spectrum_of(const SimulationConfig& cfg) {
    return {cfg.lambda, cfg.gamma, cfg.beta};
}

double resolved_dt(const SimulationConfig& cfg, const bath::MatsubaraExpansion& exp) {
    if (cfg.dt > 0.0) return cfg.dt;
    heom::SystemModel model;
    model.omega0 = cfg.omega0;
    return std::min(0.01, prop::max_stable_step(model, exp));
}

// ---------------------------------------------------------------------------
// Single run

RunResult simulate(const SimulationConfig& cfg) {
    cfg.validate();
    const bath::BathSpectrum spec = spectrum_of(cfg);
    const bath::MatsubaraExpansion exp = bath::build_expansion(spec, cfg.matsubara_terms);

    heom::SystemModel model;
    model.omega0 = cfg.omega0;
    model.n_qubits = 2;
    model.axis = cfg.coupling_axis;

    const heom::HierarchyLayout layout(cfg.matsubara_terms, cfg.hierarchy_depth, 2, cfg.max_ados);
    const spin::XStateMatrix rho0 = spin::correlators_to_matrix(spin::twisted_correlators(cfg.n_spins, cfg.theta));
    heom::HierarchyState state = heom::initialize_state(layout, rho0.computational());

    prop::IntegrationConfig icfg;
    icfg.dt = resolved_dt(cfg, exp);
    icfg.t_max = cfg.t_max;
    icfg.sample_stride = cfg.sample_stride;
    icfg.error_check_stride = cfg.error_check_stride;
    icfg.step_err_ceiling = cfg.step_err_ceiling;
    icfg.threads = cfg.threads;

    RunResult result;
    result.points = prop::integrate(std::move(state), model, exp, layout, icfg);
    result.samples.reserve(result.points.size());
    for (const auto& p : result.points) {
        result.samples.push_back(obs::evaluate_sample(p.t, p.rho, cfg.n_spins));
        if (result.samples.back().leakage > spin::CorrelatorReadout::kLeakageWarn) ++result.leakage_warnings;
    }
    return result;
}

void write_csv(std::ostream& out, const RunResult& result) {
    out << kCsvHeader << '\n';
    for (std::size_t i = 0; i < result.samples.size(); ++i) {
        const auto& s = result.samples[i];
        const auto& p = result.points[i];
        const double fields[] = {s.t,           s.zeta_ku_sq,       s.zeta_t_sq,      s.xi_ku_sq,
                                 s.xi_t_sq,     s.varsigma_sq,      s.concurrence,    s.c_r,
                                 s.correlators.sz, s.correlators.szz, s.correlators.y, s.correlators.u.real(),
                                 s.correlators.u.imag(), s.sigma_dot, p.trace_err,    p.herm_err,
                                 s.parity_err,  p.step_err};
        bool first = true;
        for (double f : fields) {
            if (!first) out << ',';
            out << format_number(f);
            first = false;
        }
        out << '\n';
    }
}

RunResult run(const SimulationConfig& cfg) {
    RunResult result = simulate(cfg);
    std::ofstream out(cfg.output_path);
    if (!out) throw ConfigError("run: cannot write '" + cfg.output_path + "'");
    write_csv(out, result);
    if (!out) throw ConfigError("run: failed writing '" + cfg.output_path + "'");
    return result;
}

// ---------------------------------------------------------------------------
// Features

std::optional<double> first_vanishing(std::span<const double> t, std::span<const double> values, double threshold) {
    for (std::size_t i = 0; i < values.size() && i < t.size(); ++i)
        if (values[i] <= threshold) return t[i];
    return std::nullopt;
}

int count_revivals(std::span<const double> values, double threshold, double rearm) {
    int revivals = 0;
    bool vanished = false;
    for (double v : values) {
        if (!vanished && v <= threshold) {
            vanished = true;
        } else if (vanished && v > rearm) {
            ++revivals;
            vanished = false;
        }
    }
    return revivals;
}

TrajectoryFeatures extract_features(const std::vector<obs::SqueezingSample>& samples) {
    TrajectoryFeatures f;
    if (samples.empty()) return f;
    std::vector<double> t, zt, zku, cr;
    for (const auto& s : samples) {
        t.push_back(s.t);
        zt.push_back(s.zeta_t_sq);
        zku.push_back(s.zeta_ku_sq);
        cr.push_back(s.c_r);
    }
    f.first_vanish_zeta_t = first_vanishing(t, zt);
    f.first_vanish_zeta_ku = first_vanishing(t, zku);
    f.first_vanish_c_r = first_vanishing(t, cr);
    f.c_r_revivals = count_revivals(cr);
    f.zeta_t_revivals = count_revivals(zt);
    f.min_zeta_ku = *std::min_element(zku.begin(), zku.end());
    f.final_zeta_ku = zku.back();
    f.initial_c_r = cr.front();
    return f;
}

// ---------------------------------------------------------------------------
// Sweeps

SweepAxis parse_axis(const std::string& name) {
    if (name == "beta") return SweepAxis::beta;
    if (name == "N") return SweepAxis::n_spins;
    throw ConfigError("sweep: axis must be 'beta' or 'N', got '" + name + "'");
}

std::vector<double> parse_values(const std::string& list) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(parse_double("values", item));
    }
    return out;
}

int thread_budget() {
    if (const char* env = std::getenv("HEOM_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && n > 0) return static_cast<int>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<SweepEntry> sweep(const SimulationConfig& base, SweepAxis axis, const std::vector<double>& values,
                              const std::string& out_dir, int workers) {
    if (values.empty()) throw ConfigError("sweep: value list is empty");
    std::vector<SimulationConfig> jobs;
    std::vector<SweepEntry> entries(values.size());
    std::filesystem::create_directories(out_dir);
    for (std::size_t i = 0; i < values.size(); ++i) {
        SimulationConfig cfg = base;
        const std::string tag = axis == SweepAxis::beta ? "beta" : "N";
        if (axis == SweepAxis::beta) {
            cfg.beta = values[i];
        } else {
            if (values[i] != std::floor(values[i])) throw ConfigError("sweep: N values must be integers");
            cfg.n_spins = static_cast<int>(values[i]);
        }
        cfg.threads = 1;
        cfg.output_path = (std::filesystem::path(out_dir) / (tag + "_" + format_number(values[i]) + ".csv")).string();
        cfg.validate();
        // Reject bad members before any job starts.
        (void)bath::build_expansion(spectrum_of(cfg), cfg.matsubara_terms);
        entries[i].value = values[i];
        entries[i].csv_path = cfg.output_path;
        jobs.push_back(std::move(cfg));
    }

    const int n_workers = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
    if (n_workers == 1 && workers >= 1) {
        // Sequential sweeps may still use the thread budget inside each RHS.
        for (auto& job : jobs) job.threads = std::max(1, workers);
    }

    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                const RunResult r = run(jobs[i]);
                entries[i].features = extract_features(r.samples);
            } catch (...) {
                std::lock_guard lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);

    std::ofstream summary(std::filesystem::path(out_dir) / "summary.csv");
    if (!summary) throw ConfigError("sweep: cannot write summary in '" + out_dir + "'");
    write_summary(summary, axis, entries);
    return entries;
}

void write_summary(std::ostream& out, SweepAxis axis, const std::vector<SweepEntry>& entries) {
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("nan"); };
    out << "axis,value,csv,first_vanish_zeta_t,first_vanish_zeta_ku,first_vanish_c_r,c_r_revivals,"
           "zeta_t_revivals,initial_c_r,min_zeta_ku,final_zeta_ku\n";
    for (const auto& e : entries) {
        const auto& f = e.features;
        out << (axis == SweepAxis::beta ? "beta" : "N") << ',' << format_number(e.value) << ',' << e.csv_path
            << ',' << opt(f.first_vanish_zeta_t) << ',' << opt(f.first_vanish_zeta_ku) << ','
            << opt(f.first_vanish_c_r) << ',' << f.c_r_revivals << ',' << f.zeta_t_revivals << ','
            << format_number(f.initial_c_r) << ',' << format_number(f.min_zeta_ku) << ','
            << format_number(f.final_zeta_ku) << '\n';
    }
}

void write_gnuplot_script(std::ostream& out, const std::string& csv_path) {
    out << "set datafile separator ','\n"
           "set key autotitle columnhead\n"
           "set logscale x\n"
           "set xlabel 't {/Symbol w}_0'\n"
           "set yrange [0:*]\n"
           "plot '" << csv_path << "' using 1:2 with lines title 'zeta_KU^2', \\\n"
           "     '' using 1:3 with lines title 'zeta_T^2', \\\n"
           "     '' using 1:8 with lines title 'C_r'\n";
}

// ---------------------------------------------------------------------------
// Oracle battery

DephasingComparison compare_dephasing(const bath::BathSpectrum& spec, int heom_terms, int depth,
                                      int reference_terms, double t_max, double dt,
                                      bool flip_terminator_sign) {
    bath::MatsubaraExpansion exp = bath::build_expansion(spec, heom_terms);
    if (flip_terminator_sign) exp.delta = -exp.delta;

    heom::SystemModel model;
    model.n_qubits = 1;
    model.axis = heom::CouplingAxis::z;
    const heom::HierarchyLayout layout(heom_terms, depth, 1);
    Eigen::Matrix2cd plus;
    plus << 0.5, 0.5, 0.5, 0.5;
    heom::HierarchyState state = heom::initialize_state(layout, plus);

    prop::IntegrationConfig icfg;
    icfg.dt = dt;
    icfg.t_max = t_max;
    icfg.sample_stride = 1;
    icfg.error_check_stride = 1000;
    const auto traj = prop::integrate(std::move(state), model, exp, layout, icfg);

    const bath::MatsubaraExpansion ref_exp =
        reference_terms > 0 ? bath::build_expansion(spec, reference_terms) : bath::build_expansion(spec, heom_terms);
    DephasingComparison cmp;
    for (const auto& p : traj) {
        const double heom_env = std::abs(p.rho(0, 1)) / 0.5;
        const double ref = oracle::dephasing_oracle(spec, ref_exp, p.t, reference_terms <= 0);
        const double rel = std::abs(heom_env - ref) / ref;
        if (rel > cmp.max_rel_err) {
            cmp.max_rel_err = rel;
            cmp.t_at_max = p.t;
        }
    }
    return cmp;
}

std::vector<VerifyCheck> verify(const VerifyOptions& opts) {
    if (opts.max_spins > oracle::kMaxBruteForceSpins || opts.max_spins < 2) {
        std::ostringstream msg;
        msg << "verify: brute-force oracle supports 2 <= N <= " << oracle::kMaxBruteForceSpins
            << ", requested N=" << opts.max_spins;
        throw ConfigError(msg.str());
    }
    std::vector<VerifyCheck> checks;
    auto add = [&](std::string name, bool ok, double value, double tol) {
        std::ostringstream d;
        d << "value=" << value << " tol=" << tol;
        checks.push_back({std::move(name), ok, d.str()});
    };

    // Closed forms and reduced formulas against the statevector oracle.
    {
        double dev = 0.0;
        for (int n = 2; n <= opts.max_spins; ++n)
            for (int k = 0; k < 20; ++k) {
                const double theta = 0.95 * std::numbers::pi * k / 19.0;
                const auto bf = oracle::brute_force_twisted(n, theta);
                const auto c = spin::twisted_correlators(n, theta);
                const auto rho = spin::correlators_to_matrix(c);
                dev = std::max({dev, std::abs(c.sz - bf.correlators.sz), std::abs(c.szz - bf.correlators.szz),
                                std::abs(c.y - bf.correlators.y), std::abs(c.u - bf.correlators.u),
                                (rho.computational() - bf.pair_rho).cwiseAbs().maxCoeff(),
                                std::abs(obs::xi_ku_squared(c, n) - bf.xi_ku_sq),
                                std::abs(obs::xi_t_squared(c, n) - bf.xi_t_sq),
                                std::abs(obs::concurrence_x(rho) - bf.concurrence)});
            }
        add("twisted state: closed forms vs statevector oracle", dev < 1e-10, dev, 1e-10);
    }

    {
        std::mt19937_64 rng(20240611);
        double dev = 0.0;
        for (int i = 0; i < 100; ++i) dev = std::max(dev, oracle::partial_trace_identity_check(rng));
        add("partial-trace identity (100 random tuples)", dev < 1e-12, dev, 1e-12);
    }

    {
        std::mt19937_64 rng(7);
        double dev = 0.0;
        for (int i = 0; i < 5; ++i) {
            auto setup = oracle::random_reduction_setup(rng, i == 0);
            dev = std::max(dev, oracle::reduction_theorem_check(setup));
        }
        add("two-qubit reduction of a three-qubit system", dev < 1e-9, dev, 1e-9);
    }

    {
        const bath::BathSpectrum spec{0.03, 0.15, 4.0};
        const auto cmp = compare_dephasing(spec, 2, 12, 4000, 20.0, 0.01, opts.flip_terminator_sign);
        add("pure-dephasing hierarchy vs analytic envelope", cmp.max_rel_err < 1e-3, cmp.max_rel_err, 1e-3);
    }

    {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        double dev = 0.0;
        for (int i = 0; i < 1000; ++i) {
            spin::XStateMatrix x;
            const double a = uni(rng), b = uni(rng), c = uni(rng), d = uni(rng);
            const double s = a + b + c + d;
            x.m(0, 0) = a / s;
            x.m(1, 1) = b / s;
            x.m(2, 2) = c / s;
            x.m(3, 3) = d / s;
            const double umax = std::sqrt(a * b) / s;
            const double ymax = std::sqrt(c * d) / s;
            const cplx u = std::polar(umax * uni(rng), 2.0 * std::numbers::pi * uni(rng));
            const cplx y = std::polar(ymax * uni(rng), 2.0 * std::numbers::pi * uni(rng));
            x.m(0, 1) = u;
            x.m(1, 0) = std::conj(u);
            x.m(2, 3) = y;
            x.m(3, 2) = std::conj(y);
            dev = std::max(dev, std::abs(obs::concurrence_x(x) - obs::concurrence_wootters(x.computational())));
        }
        add("X-state concurrence vs Wootters (1000 random states)", dev < 1e-10, dev, 1e-10);
    }

    {
        double worst = 0.0;
        bool monotone = true;
        const bath::BathSpectrum spec{0.03, 0.15, 4.0};
        double prev = bath::build_expansion(spec, 0).delta.real();
        for (int m = 0; m <= 50; ++m) {
            const auto e = bath::build_expansion(spec, m);
            worst = std::max(worst, std::abs(e.delta.imag()));
            if (e.delta.real() > prev + 1e-15) monotone = false;
            prev = e.delta.real();
        }
        add("terminator is real and decreasing in M", worst < 1e-15 && monotone, worst, 1e-15);
    }
    return checks;
}

}  // namespace heomsq::cli
