// oracle.cpp

#include "heomsq/oracle.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>

#include "heomsq/observables.hpp"

namespace heomsq::oracle {

namespace {

using Vec = Eigen::VectorXcd;

// In-place Walsh-Hadamard transform; H^{(x)N} is its own inverse.
void hadamard_all(Vec& psi, int n_spins) {
    const double s = 1.0 / std::numbers::sqrt2;
    const Eigen::Index size = psi.size();
    for (int q = 0; q < n_spins; ++q) {
        const Eigen::Index bit = Eigen::Index{1} << q;
        for (Eigen::Index i = 0; i < size; ++i) {
            if (i & bit) continue;
            const cplx a = psi(i);
            const cplx b = psi(i | bit);
            psi(i) = s * (a + b);
            psi(i | bit) = s * (a - b);
        }
    }
}

// J_axis |psi>, axis 0/1/2 = x/y/z. Spin q sits at bit N-1-q; bit value 0 is up.
Vec apply_j(const Vec& psi, int n_spins, int axis) {
    Vec out = Vec::Zero(psi.size());
    for (int q = 0; q < n_spins; ++q) {
        const Eigen::Index bit = Eigen::Index{1} << (n_spins - 1 - q);
        for (Eigen::Index s = 0; s < psi.size(); ++s) {
            const bool down = (s & bit) != 0;
            switch (axis) {
                case 0: out(s) += 0.5 * psi(s ^ bit); break;
                case 1: out(s) += 0.5 * (down ? I_UNIT : -I_UNIT) * psi(s ^ bit); break;
                default: out(s) += 0.5 * (down ? -1.0 : 1.0) * psi(s); break;
            }
        }
    }
    return out;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Kronecker product of identities on every factor except those in ops.
Eigen::MatrixXcd embed(const std::vector<int>& dims, const std::vector<std::pair<int, Eigen::MatrixXcd>>& ops) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int f = 0; f < static_cast<int>(dims.size()); ++f) {
        Eigen::MatrixXcd factor = Eigen::MatrixXcd::Identity(dims[f], dims[f]);
        for (const auto& [which, op] : ops)
            if (which == f) factor = op;
        out = kron(out, factor);
    }
    return out;
}

Eigen::MatrixXcd number_op(int levels) {
    Eigen::MatrixXcd n = Eigen::MatrixXcd::Zero(levels, levels);
    for (int k = 0; k < levels; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

Eigen::MatrixXcd position_op(int levels) {
    Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(levels, levels);
    for (int k = 1; k < levels; ++k) {
        q(k - 1, k) = std::sqrt(static_cast<double>(k));
        q(k, k - 1) = std::sqrt(static_cast<double>(k));
    }
    return q;
}

Eigen::MatrixXcd thermal_mode(int levels, double beta, double freq) {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(levels, levels);
    double z = 0.0;
    for (int k = 0; k < levels; ++k) z += std::exp(-beta * freq * k);
    for (int k = 0; k < levels; ++k) rho(k, k) = std::exp(-beta * freq * k) / z;
    return rho;
}

Eigen::MatrixXcd evolve(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& rho, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    const Eigen::VectorXd& e = es.eigenvalues();
    Eigen::VectorXcd phase(e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) phase(i) = std::exp(-I_UNIT * e(i) * t);
    const Eigen::MatrixXcd u = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    return u * rho * u.adjoint();
}

Eigen::MatrixXcd random_matrix(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

Eigen::MatrixXcd random_density(std::mt19937_64& rng, int n) {
    const Eigen::MatrixXcd a = random_matrix(rng, n);
    Eigen::MatrixXcd rho = a * a.adjoint();
    return rho / rho.trace();
}

Eigen::MatrixXcd random_pure(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::VectorXcd psi(n);
    for (int i = 0; i < n; ++i) psi(i) = cplx(g(rng), g(rng));
    psi.normalize();
    return psi * psi.adjoint();
}

}  // namespace

Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& rho, const std::vector<int>& dims,
                               const std::vector<int>& keep) {
    const int nf = static_cast<int>(dims.size());
    std::vector<Eigen::Index> stride(nf);
    Eigen::Index total = 1;
    for (int f = nf - 1; f >= 0; --f) {
        stride[f] = total;
        total *= dims[f];
    }
    if (rho.rows() != total || rho.cols() != total)
        throw ConfigError("oracle: partial_trace dimension mismatch");

    std::vector<bool> kept(nf, false);
    for (int f : keep) kept[f] = true;

    // Offsets of every configuration of the kept / traced factors.
    auto offsets = [&](bool want_kept) {
        std::vector<Eigen::Index> off{0};
        for (int f = 0; f < nf; ++f) {
            if (kept[f] != want_kept) continue;
            std::vector<Eigen::Index> next;
            next.reserve(off.size() * dims[f]);
            for (Eigen::Index base : off)
                for (int d = 0; d < dims[f]; ++d) next.push_back(base + d * stride[f]);
            off = std::move(next);
        }
        return off;
    };
    const auto keep_off = offsets(true);
    const auto trace_off = offsets(false);

    const auto n = static_cast<Eigen::Index>(keep_off.size());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            cplx acc{0.0, 0.0};
            for (Eigen::Index r : trace_off) acc += rho(keep_off[i] + r, keep_off[j] + r);
            out(i, j) = acc;
        }
    return out;
}

TwistedOracle brute_force_twisted(int n_spins, double theta) {
    if (n_spins < 2 || n_spins > kMaxBruteForceSpins) {
        std::ostringstream msg;
        msg << "oracle: brute force supports 2 <= N <= " << kMaxBruteForceSpins << ", got N=" << n_spins;
        throw ConfigError(msg.str());
    }
    const Eigen::Index size = Eigen::Index{1} << n_spins;

    // exp(-i theta Jx^2/2) is diagonal in the sigma_x product basis, where
    // Jx takes the value (N - 2 popcount(b)) / 2 on the Hadamard image of |b>.
    Vec psi = Vec::Zero(size);
    psi(size - 1) = 1.0;  // all down
    hadamard_all(psi, n_spins);
    for (Eigen::Index b = 0; b < size; ++b) {
        const double m = 0.5 * (n_spins - 2 * std::popcount(static_cast<std::uint64_t>(b)));
        psi(b) *= std::exp(-I_UNIT * theta * m * m / 2.0);
    }
    hadamard_all(psi, n_spins);

    TwistedOracle out;
    out.state = psi;

    // Reduced state of spins 1 and 2 (the two most significant bits).
    const Eigen::Index rest = size / 4;
    Matrix4c pair = Matrix4c::Zero();
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            cplx acc{0.0, 0.0};
            for (Eigen::Index r = 0; r < rest; ++r) acc += psi(a * rest + r) * std::conj(psi(b * rest + r));
            pair(a, b) = acc;
        }
    out.pair_rho = pair;

    const Matrix4c sz1 = pauli::kron(pauli::z(), pauli::id());
    const Matrix4c szz = pauli::kron(pauli::z(), pauli::z());
    const Matrix4c sp_sm = pauli::kron(pauli::plus(), pauli::minus());
    const Matrix4c sm_sm = pauli::kron(pauli::minus(), pauli::minus());
    out.correlators.sz = (pair * sz1).trace().real();
    out.correlators.szz = (pair * szz).trace().real();
    out.correlators.y = (pair * sp_sm).trace().real();
    out.correlators.u = (pair * sm_sm).trace();

    // Collective moments from J_a |psi>.
    std::array<Vec, 3> jpsi;
    for (int a = 0; a < 3; ++a) jpsi[a] = apply_j(psi, n_spins, a);
    CollectiveMoments& mom = out.moments;
    for (int a = 0; a < 3; ++a) mom.mean_j(a) = psi.dot(jpsi[a]).real();
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) mom.corr(k, l) = jpsi[k].dot(jpsi[l]).real();
    mom.cov = mom.corr - mom.mean_j * mom.mean_j.transpose();
    mom.j2 = mom.corr.trace();
    mom.gamma_matrix = (n_spins - 1) * mom.cov + mom.corr;

    // Kitagawa-Ueda: minimal variance in the plane orthogonal to the mean spin.
    Eigen::Vector3d n0 = mom.mean_j.norm() > 0.0 ? Eigen::Vector3d(mom.mean_j.normalized())
                                                 : Eigen::Vector3d::UnitZ();
    Eigen::Vector3d helper = std::abs(n0.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    const Eigen::Vector3d n1 = (helper - helper.dot(n0) * n0).normalized();
    const Eigen::Vector3d n2 = n0.cross(n1);
    Eigen::Matrix2d plane;
    plane << n1.dot(mom.cov * n1), n1.dot(mom.cov * n2), n2.dot(mom.cov * n1), n2.dot(mom.cov * n2);
    const double min_var = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(plane).eigenvalues()(0);
    out.xi_ku_sq = 4.0 * min_var / n_spins;

    // Toth: lambda_min(Gamma) / (<J^2> - N/2)
    const double lambda_min = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(mom.gamma_matrix).eigenvalues()(0);
    out.xi_t_sq = lambda_min / (mom.j2 - 0.5 * n_spins);

    out.concurrence = obs::concurrence_wootters(pair);
    return out;
}

double dephasing_oracle(const bath::BathSpectrum& spec, const bath::MatsubaraExpansion& exp, double t,
                        bool include_terminator) {
    spec.validate();
    double gamma_t = 0.0;
    for (int n = 0; n <= exp.terms; ++n) {
        const double nu = exp.nu[n];
        // (nu t - 1 + e^{-nu t}) / nu^2 with a series for small nu t
        const double x = nu * t;
        const double g = x < 1e-4 ? t * t * (0.5 - x / 6.0 + x * x / 24.0)
                                  : (x - 1.0 + std::exp(-x)) / (nu * nu);
        gamma_t += 4.0 * exp.c[n].real() * g;
    }
    if (include_terminator) gamma_t += 4.0 * exp.delta.real() * t;
    return std::exp(-gamma_t);
}

ReductionSetup random_reduction_setup(std::mt19937_64& rng, bool entangled_system) {
    std::uniform_real_distribution<double> uni(0.5, 1.5);
    std::uniform_real_distribution<double> cpl(0.05, 0.4);
    std::uniform_real_distribution<double> time(0.5, 3.0);
    ReductionSetup s;
    for (int i = 0; i < 3; ++i) {
        s.omega[i] = uni(rng);
        s.mode_freq[i] = uni(rng);
        s.coupling[i] = cpl(rng);
        s.bath_beta[i] = 2.0 * uni(rng);
    }
    s.t = time(rng);
    if (entangled_system) {
        s.system_rho = random_pure(rng, 8);
    } else {
        s.system_rho = kron(kron(random_density(rng, 2), random_density(rng, 2)), random_density(rng, 2));
    }
    return s;
}

double reduction_theorem_check(const ReductionSetup& setup) {
    const int nf = setup.fock_cutoff;
    if (nf < 1) throw ConfigError("oracle: fock_cutoff must be >= 1");
    if (setup.system_rho.rows() != 8 || setup.system_rho.cols() != 8)
        throw ConfigError("oracle: reduction check needs an 8x8 three-qubit state");

    const Eigen::MatrixXcd sz = pauli::z();
    const Eigen::MatrixXcd sx = pauli::x();
    const Eigen::MatrixXcd num = number_op(nf);
    const Eigen::MatrixXcd pos = position_op(nf);

    // Factors ordered as qubits first, then their modes.
    auto hamiltonian = [&](int n_pairs) {
        std::vector<int> dims(n_pairs, 2);
        dims.insert(dims.end(), n_pairs, nf);
        const Eigen::Index total = (Eigen::Index{1} << n_pairs) * static_cast<Eigen::Index>(std::pow(nf, n_pairs));
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(total, total);
        for (int i = 0; i < n_pairs; ++i) {
            h += 0.5 * setup.omega[i] * embed(dims, {{i, sz}});
            h += setup.mode_freq[i] * embed(dims, {{n_pairs + i, num}});
            h += setup.coupling[i] * embed(dims, {{i, sx}, {n_pairs + i, pos}});
        }
        return std::make_pair(h, dims);
    };

    // (a) three qubits with three modes
    auto [h3, dims3] = hamiltonian(3);
    Eigen::MatrixXcd rho3 = setup.system_rho;
    for (int i = 0; i < 3; ++i) rho3 = kron(rho3, thermal_mode(nf, setup.bath_beta[i], setup.mode_freq[i]));
    const Eigen::MatrixXcd full = partial_trace(evolve(h3, rho3, setup.t), dims3, {0, 1});

    // (b) two qubits with two modes, starting from the reduced pair state
    auto [h2, dims2] = hamiltonian(2);
    Eigen::MatrixXcd rho2 = partial_trace(setup.system_rho, {2, 2, 2}, {0, 1});
    for (int i = 0; i < 2; ++i) rho2 = kron(rho2, thermal_mode(nf, setup.bath_beta[i], setup.mode_freq[i]));
    const Eigen::MatrixXcd reduced = partial_trace(evolve(h2, rho2, setup.t), dims2, {0, 1});

    return (full - reduced).cwiseAbs().maxCoeff();
}

double partial_trace_identity_deviation(const Matrix2c& a1, const Matrix2c& a2, const Matrix2c& b1,
                                        const Matrix2c& b2, const Matrix4c& rho12) {
    const std::vector<int> dims{2, 2};
    const Eigen::MatrixXcd lhs = partial_trace(pauli::kron(a1, a2) * rho12 * pauli::kron(b1, b2), dims, {0});
    const Eigen::MatrixXcd rhs =
        partial_trace(pauli::kron(a1, b2 * a2) * rho12 * pauli::kron(b1, pauli::id()), dims, {0});
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

double partial_trace_identity_check(std::mt19937_64& rng) {
    const Matrix2c a1 = random_matrix(rng, 2);
    const Matrix2c a2 = random_matrix(rng, 2);
    const Matrix2c b1 = random_matrix(rng, 2);
    const Matrix2c b2 = random_matrix(rng, 2);
    const Matrix4c rho = random_density(rng, 4);
    return partial_trace_identity_deviation(a1, a2, b1, b2, rho);
}

}  // namespace heomsq::oracle
