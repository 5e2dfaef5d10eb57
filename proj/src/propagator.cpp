// propagator.cpp

#include "heomsq/propagator.hpp"

#include <cmath>
#include <sstream>

namespace heomsq::prop {

void IntegrationConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("propagator: dt must be > 0");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("propagator: t_max must be > 0");
    if (sample_stride < 1) throw ConfigError("propagator: sample_stride must be >= 1");
    if (error_check_stride < 1) throw ConfigError("propagator: error_check_stride must be >= 1");
    if (!(step_err_ceiling > 0.0)) throw ConfigError("propagator: step_err_ceiling must be > 0");
}

double max_stable_step(const heom::SystemModel& model, const bath::MatsubaraExpansion& exp) {
    return 0.1 / std::max(std::abs(model.omega0), exp.max_frequency());
}

namespace {

class Rk4Stepper {
public:
    explicit Rk4Stepper(const heom::HeomGenerator& gen)
        : gen_(gen), n_(static_cast<Eigen::Index>(gen.size()) * gen.dim() * gen.dim()),
          k_(n_), acc_(n_), tmp_(n_) {}

    // y <- y + h/6 (k1 + 2 k2 + 2 k3 + k4)
    void step(Eigen::VectorXcd& y, double h) {
        gen_.apply(y.data(), k_.data());
        acc_ = k_;
        tmp_ = y + (0.5 * h) * k_;
        gen_.apply(tmp_.data(), k_.data());
        acc_ += 2.0 * k_;
        tmp_ = y + (0.5 * h) * k_;
        gen_.apply(tmp_.data(), k_.data());
        acc_ += 2.0 * k_;
        tmp_ = y + h * k_;
        gen_.apply(tmp_.data(), k_.data());
        acc_ += k_;
        y += (h / 6.0) * acc_;
    }

private:
    const heom::HeomGenerator& gen_;
    Eigen::Index n_;
    Eigen::VectorXcd k_;
    Eigen::VectorXcd acc_;
    Eigen::VectorXcd tmp_;
};

TrajectoryPoint make_point(double t, const Eigen::VectorXcd& y, int dim, double step_err) {
    TrajectoryPoint p;
    p.t = t;
    p.rho = Eigen::Map<const Eigen::MatrixXcd>(y.data(), dim, dim);
    p.trace_err = std::abs(p.rho.trace() - cplx(1.0, 0.0));
    p.herm_err = (p.rho - p.rho.adjoint()).cwiseAbs().maxCoeff();
    p.step_err = step_err;
    return p;
}

}  // namespace

std::vector<TrajectoryPoint> integrate(heom::HierarchyState state, const heom::SystemModel& model,
                                       const bath::MatsubaraExpansion& exp,
                                       const heom::HierarchyLayout& layout,
                                       const IntegrationConfig& cfg, const SampleSink& sink) {
    cfg.validate();
    const double limit = max_stable_step(model, exp);
    if (cfg.dt > limit * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "propagator: dt = " << cfg.dt << " does not resolve the fastest scale; need dt <= "
            << limit;
        throw ConfigError(msg.str());
    }

    heom::HeomGenerator gen(model, exp, layout);
    gen.set_threads(cfg.threads);
    if (state.dim != gen.dim() || state.count != gen.size())
        throw ConfigError("propagator: initial state does not conform to the layout");

    const int dim = state.dim;
    const long steps = std::lround(std::ceil(cfg.t_max / cfg.dt - 1e-9));
    Rk4Stepper stepper(gen);
    Eigen::VectorXcd& y = state.data;
    Eigen::VectorXcd half;
    const Eigen::Index dd = static_cast<Eigen::Index>(dim) * dim;

    std::vector<TrajectoryPoint> out;
    out.reserve(static_cast<std::size_t>(steps / cfg.sample_stride + 2));
    double step_err = 0.0;
    auto emit = [&](double t) {
        out.push_back(make_point(t, y, dim, step_err));
        if (sink) sink(out.back());
    };
    emit(0.0);

    // The final step is shortened so the trajectory ends exactly at t_max.
    auto time_at = [&](long s) { return s == steps ? cfg.t_max : s * cfg.dt; };
    for (long s = 1; s <= steps; ++s) {
        const double h = time_at(s) - time_at(s - 1);
        const bool check = s % cfg.error_check_stride == 0;
        if (check) half = y;
        stepper.step(y, h);
        if (check) {
            stepper.step(half, 0.5 * h);
            stepper.step(half, 0.5 * h);
            step_err = (y.head(dd) - half.head(dd)).cwiseAbs().maxCoeff();
            if (!y.allFinite()) {
                std::ostringstream msg;
                msg << "propagator: non-finite ADO entry at t = " << s * cfg.dt;
                throw NumericalError(msg.str());
            }
            if (!(step_err <= cfg.step_err_ceiling)) {
                std::ostringstream msg;
                msg << "propagator: step-doubling error " << step_err << " exceeds ceiling "
                    << cfg.step_err_ceiling << " at t = " << s * cfg.dt;
                throw NumericalError(msg.str());
            }
        }
        if (s % cfg.sample_stride == 0 || s == steps) {
            if (!y.head(dd).allFinite()) {
                std::ostringstream msg;
                msg << "propagator: non-finite density matrix at t = " << s * cfg.dt;
                throw NumericalError(msg.str());
            }
            emit(time_at(s));
        }
    }
    if (!y.allFinite()) throw NumericalError("propagator: non-finite ADO entry at final time");
    return out;
}

}  // namespace heomsq::prop
