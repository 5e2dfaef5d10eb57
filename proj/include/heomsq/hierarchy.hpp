// hierarchy.hpp: Truncated ADO index space and the HEOM right-hand side
//
// The hierarchy couples the physical reduced density matrix (tier 0) to
// auxiliary density operators rho_n indexed by a multi-index n over
// (qubit alpha, Matsubara term k). For every index n:
//
//   d/dt rho_n = -[i H_S^x + (n . nu)] rho_n
//                - delta * sum_alpha V_alpha^x V_alpha^x rho_n
//                - i sum_{alpha,k} n_{alpha k} (c_k V_alpha rho_{n-e} - c_k^* rho_{n-e} V_alpha)
//                - i sum_{alpha,k} V_alpha^x rho_{n+e}
//
// with A^x B = AB - BA. ADOs beyond the tier cutoff are treated as zero.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "heomsq/bath_model.hpp"
#include "heomsq/types.hpp"

namespace heomsq::heom {

enum class CouplingAxis { x, z };

// H_S = sum_alpha (omega0/2) sigma_alpha^z, one independent bath per qubit
// coupled through V_alpha = coupling_scale[alpha] * sigma_alpha^{x|z}.
struct SystemModel {
    double omega0{1.0};
    int n_qubits{2};
    CouplingAxis axis{CouplingAxis::x};
    std::array<double, 2> coupling_scale{1.0, 1.0};

    void validate() const;
    int dim() const { return 1 << n_qubits; }
    Eigen::MatrixXcd hamiltonian() const;
    Eigen::MatrixXcd coupling(int qubit) const;
};

inline constexpr std::size_t kDefaultMaxAdos = 1'000'000;

class HierarchyLayout {
public:
    static constexpr std::int32_t kAbsent = -1;

    HierarchyLayout(int matsubara_terms, int depth, int n_baths = 2,
                    std::size_t max_ados = kDefaultMaxAdos);

    int matsubara_terms() const { return terms_; }
    int depth() const { return depth_; }
    int n_baths() const { return n_baths_; }
    // Number of multi-index components, n_baths * (M + 1).
    int modes() const { return modes_; }
    std::size_t size() const { return tiers_.size(); }

    std::span<const std::uint16_t> index(std::size_t i) const {
        return {indices_.data() + i * modes_, static_cast<std::size_t>(modes_)};
    }
    int tier(std::size_t i) const { return tiers_[i]; }
    // Position of n - e_mode / n + e_mode, or kAbsent outside the truncation.
    std::int32_t lower(std::size_t i, int mode) const { return lower_[i * modes_ + mode]; }
    std::int32_t raise(std::size_t i, int mode) const { return raise_[i * modes_ + mode]; }

    std::optional<std::size_t> find(std::span<const std::uint16_t> n) const;

    // binomial(modes + depth, depth)
    static std::size_t count(int modes, int depth);

private:
    int terms_;
    int depth_;
    int n_baths_;
    int modes_;
    std::vector<std::uint16_t> indices_;
    std::vector<int> tiers_;
    std::vector<std::int32_t> lower_;
    std::vector<std::int32_t> raise_;
};

// Enumerates every multi-index with tier <= depth in graded lexicographic
// order and builds the neighbour tables. Throws ConfigError when the ADO
// count exceeds max_ados.
HierarchyLayout build_layout(int matsubara_terms, int depth, int n_baths = 2,
                             std::size_t max_ados = kDefaultMaxAdos);

// Dense ADO storage: ADO i is a dim x dim column-major block at offset i*dim*dim.
struct HierarchyState {
    int dim{0};
    std::size_t count{0};
    Eigen::VectorXcd data;

    HierarchyState() = default;
    HierarchyState(int dim_, std::size_t count_)
        : dim(dim_), count(count_), data(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(count_) * dim_ * dim_)) {}

    Eigen::Map<Eigen::MatrixXcd> ado(std::size_t i) {
        return {data.data() + i * dim * dim, dim, dim};
    }
    Eigen::Map<const Eigen::MatrixXcd> ado(std::size_t i) const {
        return {data.data() + i * dim * dim, dim, dim};
    }
    // The tier-0 ADO, i.e. the reduced density matrix of the system.
    Eigen::MatrixXcd physical() const { return ado(0); }
};

// Tier-0 ADO = rho0, all others zero. rho0 must be Hermitian with unit
// trace (tolerance 1e-10) and match the layout's number of baths.
HierarchyState initialize_state(const HierarchyLayout& layout, const Eigen::MatrixXcd& rho0);

// Precomputed HEOM generator. Each output ADO depends only on read-only
// neighbours of the input, so apply() is a deterministic parallel map.
class HeomGenerator {
public:
    HeomGenerator(const SystemModel& model, const bath::MatsubaraExpansion& exp,
                  const HierarchyLayout& layout);

    int dim() const { return dim_; }
    std::size_t size() const { return layout_->size(); }

    void set_threads(int threads) { threads_ = threads < 1 ? 1 : threads; }
    int threads() const { return threads_; }

    // out = L(in); both span size() * dim^2 entries and must not alias.
    void apply(const cplx* in, cplx* out) const;
    void apply(const HierarchyState& in, HierarchyState& out) const;

private:
    template <int D>
    void apply_fixed(const cplx* in, cplx* out) const;

    // V_alpha as a monomial matrix: V(i, perm[i]) = coef[i], perm an involution.
    struct Monomial {
        std::array<int, 4> perm{};
        std::array<cplx, 4> coef{};
    };

    const HierarchyLayout* layout_;
    int dim_;
    int n_baths_;
    int terms_;
    int threads_{1};
    std::array<double, 4> energy_{};
    std::array<Monomial, 2> coupling_{};
    std::vector<cplx> c_;
    cplx delta_;
    std::vector<double> damping_;  // n . nu per ADO
};

HierarchyState heom_rhs(const HierarchyState& state, const SystemModel& model,
                        const bath::MatsubaraExpansion& exp, const HierarchyLayout& layout);

}  // namespace heomsq::heom
