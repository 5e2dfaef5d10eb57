// hierarchy.cpp

#include "heomsq/hierarchy.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace heomsq::heom {

void SystemModel::validate() const {
    if (n_qubits != 1 && n_qubits != 2)
        throw ConfigError("hierarchy: n_qubits must be 1 or 2");
    if (!std::isfinite(omega0)) throw ConfigError("hierarchy: omega0 must be finite");
    for (double s : coupling_scale)
        if (!std::isfinite(s)) throw ConfigError("hierarchy: coupling_scale must be finite");
}

namespace {

// Bit of qubit alpha in a computational index; qubit 0 is the most significant.
int qubit_bit(int n_qubits, int alpha) { return n_qubits - 1 - alpha; }

Eigen::MatrixXcd embed(const Matrix2c& op, int n_qubits, int alpha) {
    if (n_qubits == 1) return op;
    return alpha == 0 ? Eigen::MatrixXcd(pauli::kron(op, pauli::id()))
                      : Eigen::MatrixXcd(pauli::kron(pauli::id(), op));
}

}  // namespace

Eigen::MatrixXcd SystemModel::hamiltonian() const {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim(), dim());
    for (int a = 0; a < n_qubits; ++a) h += 0.5 * omega0 * embed(pauli::z(), n_qubits, a);
    return h;
}

Eigen::MatrixXcd SystemModel::coupling(int qubit) const {
    const Matrix2c op = axis == CouplingAxis::x ? pauli::x() : pauli::z();
    return coupling_scale[qubit] * embed(op, n_qubits, qubit);
}

// ---------------------------------------------------------------------------
// Layout

std::size_t HierarchyLayout::count(int modes, int depth) {
    // binomial(modes + depth, depth) computed incrementally; saturates on overflow.
    long double acc = 1.0L;
    for (int i = 1; i <= depth; ++i) acc = acc * (modes + i) / i;
    if (acc > static_cast<long double>(std::numeric_limits<std::size_t>::max() / 2))
        return std::numeric_limits<std::size_t>::max() / 2;
    return static_cast<std::size_t>(std::llround(acc));
}

HierarchyLayout::HierarchyLayout(int matsubara_terms, int depth, int n_baths, std::size_t max_ados)
    : terms_(matsubara_terms), depth_(depth), n_baths_(n_baths), modes_(n_baths * (matsubara_terms + 1)) {
    if (matsubara_terms < 0) throw ConfigError("hierarchy: Matsubara cutoff M must be >= 0");
    if (depth < 0) throw ConfigError("hierarchy: depth must be >= 0");
    if (n_baths != 1 && n_baths != 2) throw ConfigError("hierarchy: n_baths must be 1 or 2");
    if (depth > std::numeric_limits<std::uint16_t>::max())
        throw ConfigError("hierarchy: depth too large");

    const std::size_t expected = count(modes_, depth_);
    if (expected > max_ados) {
        std::ostringstream msg;
        msg << "hierarchy: " << expected << " ADOs for M=" << terms_ << ", depth=" << depth_
            << " exceeds the budget of " << max_ados;
        throw ConfigError(msg.str());
    }

    indices_.reserve(expected * modes_);
    tiers_.reserve(expected);

    // Graded lexicographic: tiers ascending; within a tier the leading
    // components are filled greedily (largest first).
    std::vector<std::uint16_t> n(modes_, 0);
    auto fill = [&](auto&& self, int pos, int remaining, int tier) -> void {
        if (pos == modes_ - 1) {
            n[pos] = static_cast<std::uint16_t>(remaining);
            indices_.insert(indices_.end(), n.begin(), n.end());
            tiers_.push_back(tier);
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            n[pos] = static_cast<std::uint16_t>(v);
            self(self, pos + 1, remaining - v, tier);
        }
    };
    for (int t = 0; t <= depth_; ++t) fill(fill, 0, t, t);

    std::map<std::vector<std::uint16_t>, std::int32_t> position;
    for (std::size_t i = 0; i < tiers_.size(); ++i) {
        auto idx = index(i);
        position.emplace(std::vector<std::uint16_t>(idx.begin(), idx.end()), static_cast<std::int32_t>(i));
    }

    lower_.assign(tiers_.size() * modes_, kAbsent);
    raise_.assign(tiers_.size() * modes_, kAbsent);
    std::vector<std::uint16_t> key(modes_);
    for (std::size_t i = 0; i < tiers_.size(); ++i) {
        auto idx = index(i);
        for (int m = 0; m < modes_; ++m) {
            key.assign(idx.begin(), idx.end());
            if (key[m] > 0) {
                --key[m];
                lower_[i * modes_ + m] = position.at(key);
                ++key[m];
            }
            if (tiers_[i] < depth_) {
                ++key[m];
                raise_[i * modes_ + m] = position.at(key);
            }
        }
    }
}

std::optional<std::size_t> HierarchyLayout::find(std::span<const std::uint16_t> n) const {
    if (static_cast<int>(n.size()) != modes_) return std::nullopt;
    // Climb from the root along raise links, one component at a time.
    std::size_t pos = 0;
    for (int m = 0; m < modes_; ++m) {
        for (int r = 0; r < n[m]; ++r) {
            const std::int32_t next = raise(pos, m);
            if (next == kAbsent) return std::nullopt;
            pos = static_cast<std::size_t>(next);
        }
    }
    return pos;
}

HierarchyLayout build_layout(int matsubara_terms, int depth, int n_baths, std::size_t max_ados) {
    return HierarchyLayout(matsubara_terms, depth, n_baths, max_ados);
}

// ---------------------------------------------------------------------------
// State

HierarchyState initialize_state(const HierarchyLayout& layout, const Eigen::MatrixXcd& rho0) {
    const int dim = 1 << layout.n_baths();
    if (rho0.rows() != dim || rho0.cols() != dim) {
        std::ostringstream msg;
        msg << "hierarchy: initial state must be " << dim << "x" << dim;
        throw ConfigError(msg.str());
    }
    constexpr double tol = 1e-10;
    if (!rho0.allFinite()) throw ConfigError("hierarchy: initial state has non-finite entries");
    if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw ConfigError("hierarchy: initial state is not Hermitian");
    if (std::abs(rho0.trace() - cplx(1.0, 0.0)) > tol)
        throw ConfigError("hierarchy: initial state does not have unit trace");

    HierarchyState state(dim, layout.size());
    state.ado(0) = rho0;
    return state;
}

// ---------------------------------------------------------------------------
// Generator

HeomGenerator::HeomGenerator(const SystemModel& model, const bath::MatsubaraExpansion& exp,
                             const HierarchyLayout& layout)
    : layout_(&layout), dim_(model.dim()), n_baths_(model.n_qubits), terms_(exp.terms),
      c_(exp.c), delta_(exp.delta) {
    model.validate();
    if (layout.n_baths() != model.n_qubits)
        throw ConfigError("hierarchy: layout bath count does not match the system model");
    if (layout.matsubara_terms() != exp.terms)
        throw ConfigError("hierarchy: layout Matsubara cutoff does not match the expansion");

    for (int i = 0; i < dim_; ++i) {
        double e = 0.0;
        for (int a = 0; a < n_baths_; ++a)
            e += ((i >> qubit_bit(n_baths_, a)) & 1) ? -0.5 * model.omega0 : 0.5 * model.omega0;
        energy_[i] = e;
    }

    for (int a = 0; a < n_baths_; ++a) {
        const int bit = 1 << qubit_bit(n_baths_, a);
        const double s = model.coupling_scale[a];
        Monomial& v = coupling_[a];
        for (int i = 0; i < dim_; ++i) {
            if (model.axis == CouplingAxis::x) {
                v.perm[i] = i ^ bit;
                v.coef[i] = s;
            } else {
                v.perm[i] = i;
                v.coef[i] = (i & bit) ? -s : s;
            }
        }
    }

    damping_.resize(layout.size());
    for (std::size_t i = 0; i < layout.size(); ++i) {
        auto n = layout.index(i);
        double d = 0.0;
        for (int m = 0; m < layout.modes(); ++m) d += n[m] * exp.nu[m % (terms_ + 1)];
        damping_[i] = d;
    }
}

template <int D>
void HeomGenerator::apply_fixed(const cplx* in, cplx* out) const {
    constexpr int DD = D * D;
    const HierarchyLayout& layout = *layout_;
    const int per_bath = terms_ + 1;
    const auto count = static_cast<std::ptrdiff_t>(layout.size());
    const cplx minus_i(0.0, -1.0);

    // Y = V X - X V for monomial V (column-major D x D blocks).
    auto commutator = [](const Monomial& v, const cplx* x, cplx* y) {
        for (int j = 0; j < D; ++j) {
            const int pj = v.perm[j];
            const cplx cj = v.coef[pj];
            for (int a = 0; a < D; ++a)
                y[a + j * D] = v.coef[a] * x[v.perm[a] + j * D] - x[a + pj * D] * cj;
        }
    };

#pragma omp parallel for schedule(static) num_threads(threads_) if (threads_ > 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const cplx* rho = in + i * DD;
        std::array<cplx, DD> acc;
        std::array<cplx, DD> w1;
        std::array<cplx, DD> w2;

        const double damp = damping_[i];
        for (int j = 0; j < D; ++j)
            for (int a = 0; a < D; ++a)
                acc[a + j * D] = cplx(-damp, -(energy_[a] - energy_[j])) * rho[a + j * D];

        const auto n = layout.index(static_cast<std::size_t>(i));
        for (int alpha = 0; alpha < n_baths_; ++alpha) {
            const Monomial& v = coupling_[alpha];

            // Terminator: -delta V^x V^x rho
            commutator(v, rho, w1.data());
            commutator(v, w1.data(), w2.data());
            for (int e = 0; e < DD; ++e) acc[e] -= delta_ * w2[e];

            // Lower neighbours: -i sum_k n_k (c_k V rho_- - c_k^* rho_- V)
            std::array<cplx, DD> left{};
            std::array<cplx, DD> right{};
            bool any_lower = false;
            // Higher neighbours: -i V^x sum_k rho_+
            std::array<cplx, DD> upper{};
            bool any_upper = false;
            for (int k = 0; k < per_bath; ++k) {
                const int mode = alpha * per_bath + k;
                const int nk = n[mode];
                if (nk > 0) {
                    const cplx* low = in + static_cast<std::ptrdiff_t>(layout.lower(i, mode)) * DD;
                    const cplx cl = static_cast<double>(nk) * c_[k];
                    const cplx cr = static_cast<double>(nk) * std::conj(c_[k]);
                    for (int e = 0; e < DD; ++e) {
                        left[e] += cl * low[e];
                        right[e] += cr * low[e];
                    }
                    any_lower = true;
                }
                const std::int32_t up = layout.raise(i, mode);
                if (up != HierarchyLayout::kAbsent) {
                    const cplx* high = in + static_cast<std::ptrdiff_t>(up) * DD;
                    for (int e = 0; e < DD; ++e) upper[e] += high[e];
                    any_upper = true;
                }
            }
            if (any_lower) {
                for (int j = 0; j < D; ++j) {
                    const int pj = v.perm[j];
                    const cplx cj = v.coef[pj];
                    for (int a = 0; a < D; ++a)
                        acc[a + j * D] += minus_i * (v.coef[a] * left[v.perm[a] + j * D] -
                                                     right[a + pj * D] * cj);
                }
            }
            if (any_upper) {
                commutator(v, upper.data(), w1.data());
                for (int e = 0; e < DD; ++e) acc[e] += minus_i * w1[e];
            }
        }

        cplx* dst = out + i * DD;
        for (int e = 0; e < DD; ++e) dst[e] = acc[e];
    }
}

void HeomGenerator::apply(const cplx* in, cplx* out) const {
    if (dim_ == 4)
        apply_fixed<4>(in, out);
    else
        apply_fixed<2>(in, out);
}

void HeomGenerator::apply(const HierarchyState& in, HierarchyState& out) const {
    if (in.dim != dim_ || in.count != layout_->size())
        throw ConfigError("hierarchy: state does not conform to the layout");
    if (out.dim != in.dim || out.count != in.count) out = HierarchyState(in.dim, in.count);
    apply(in.data.data(), out.data.data());
}

HierarchyState heom_rhs(const HierarchyState& state, const SystemModel& model,
                        const bath::MatsubaraExpansion& exp, const HierarchyLayout& layout) {
    HeomGenerator gen(model, exp, layout);
    HierarchyState out(state.dim, state.count);
    gen.apply(state, out);
    return out;
}

}  // namespace heomsq::heom
