// oracle.hpp: Independent references for the reduced-formula solver
//
// None of these routines share code paths with the production solver:
//  * brute_force_twisted works on the full N-spin statevector and evaluates
//    the squeezing parameters from their collective-operator definitions;
//  * dephasing_oracle is the closed-form decoherence envelope of a single
//    qubit coupled through sigma_z (independent-boson model);
//  * reduction_theorem_check evolves explicit qubit + bosonic-mode systems by
//    exact diagonalization;
//  * partial_trace_identity_deviation evaluates both sides of the
//    partial-trace identity that underlies the two-qubit reduction.

#pragma once

#include <array>
#include <random>
#include <vector>

#include "heomsq/bath_model.hpp"
#include "heomsq/spin_ensemble.hpp"
#include "heomsq/types.hpp"

namespace heomsq::oracle {

inline constexpr int kMaxBruteForceSpins = 12;

struct CollectiveMoments {
    Eigen::Vector3d mean_j;      // <J_a>
    Eigen::Matrix3d corr;        // (<J_k J_l> + <J_l J_k>) / 2
    Eigen::Matrix3d cov;         // corr - <J_k><J_l>
    double j2{0.0};              // <J^2>
    Eigen::Matrix3d gamma_matrix;  // (N - 1) cov + corr
};

struct TwistedOracle {
    Eigen::VectorXcd state;
    Matrix4c pair_rho;  // spins 1 and 2, computational basis
    spin::PairCorrelators correlators;
    CollectiveMoments moments;
    double xi_ku_sq{1.0};
    double xi_t_sq{1.0};
    double concurrence{0.0};
};

// exp(-i theta Jx^2 / 2)|down ... down> built on the 2^N statevector, with all
// quantities evaluated from their collective definitions. Throws ConfigError
// for N < 2 or N > kMaxBruteForceSpins.
TwistedOracle brute_force_twisted(int n_spins, double theta);

// |rho_01(t) / rho_01(0)| = exp(-Gamma(t)),
// Gamma(t) = 4 sum_n Re(c_n) (nu_n t - 1 + exp(-nu_n t)) / nu_n^2,
// optionally with the terminator's Markovian contribution 4 Re(delta) t.
double dephasing_oracle(const bath::BathSpectrum& spec, const bath::MatsubaraExpansion& exp, double t,
                        bool include_terminator = false);

// Qubit i carries H_i = (omega_i/2) sz + mode_freq_i a^dag a + g_i sx (a + a^dag)
// and its own bosonic mode truncated at fock_cutoff levels, initially thermal.
struct ReductionSetup {
    int fock_cutoff{4};
    double t{1.0};
    std::array<double, 3> omega{1.0, 1.0, 1.0};
    std::array<double, 3> mode_freq{1.0, 1.0, 1.0};
    std::array<double, 3> coupling{0.1, 0.1, 0.1};
    std::array<double, 3> bath_beta{1.0, 1.0, 1.0};
    Eigen::MatrixXcd system_rho;  // 8 x 8 initial state of the three qubits
};

ReductionSetup random_reduction_setup(std::mt19937_64& rng, bool entangled_system);

// Max-norm difference between rho_12(t) obtained from the full three-qubit,
// three-mode evolution and from the two-qubit, two-mode evolution.
double reduction_theorem_check(const ReductionSetup& setup);

// || Tr_2[(A1 x A2) rho (B1 x B2)] - Tr_2[(A1 x B2 A2) rho (B1 x I)] ||_max
double partial_trace_identity_deviation(const Matrix2c& a1, const Matrix2c& a2, const Matrix2c& b1,
                                        const Matrix2c& b2, const Matrix4c& rho12);

double partial_trace_identity_check(std::mt19937_64& rng);

// Partial trace over the factors not listed in keep; factor 0 is the most
// significant in the Kronecker ordering.
Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& rho, const std::vector<int>& dims,
                               const std::vector<int>& keep);

}  // namespace heomsq::oracle
