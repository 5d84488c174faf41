#pragma once

// Density matrices and the purification bridge: a mixed state on N
// parties corresponds to a pure state on N+1 parties (the added 0th party
// is the first index), and two density matrices are locally equivalent
// exactly when their purifications are, with the 0th party granted full
// unitary freedom. All mixed-state decisions route through that bridge.

#include "lucanon/equivalence.hpp"

namespace lucanon {

/// D x D density matrix over parties with dimensions dims, D = prod I_n,
/// basis ordered like StateTensor amplitudes (first party slowest).
/// `new_density_matrix` validates; partial traces construct unchecked
/// results whose trace equals the squared norm of their source.
class DensityMatrix {
public:
    static DensityMatrix unchecked(std::vector<int> dims, Eigen::MatrixXcd matrix);

    const std::vector<int>& dims() const { return dims_; }
    const Eigen::MatrixXcd& matrix() const { return mat_; }
    std::int64_t dim() const { return mat_.rows(); }
    double trace() const { return mat_.trace().real(); }

private:
    DensityMatrix(std::vector<int> dims, Eigen::MatrixXcd mat)
        : dims_(std::move(dims)), mat_(std::move(mat)) {}

    std::vector<int> dims_;
    Eigen::MatrixXcd mat_;
};

/// Validating constructor: Hermitian within 1e-10 * max entry, trace 1
/// within 1e-10, eigenvalues >= -1e-10. Throws ShapeMismatch,
/// NotHermitian, NotTraceOne, or NotPSD naming the violated invariant.
DensityMatrix new_density_matrix(std::vector<int> dims, Eigen::MatrixXcd matrix);

/// The (N+1)-party counterpart of a density matrix: psi0 has dims
/// (r, I_1, ..., I_N) with r the numerical rank, amplitudes p_i psi_i;
/// weights are the retained eigenvalues p_i^2, sorted non-increasing.
struct Purification {
    StateTensor psi0;
    Eigen::VectorXd weights;
};

/// Spectral purification: eigenvalues above rank_tol are kept. Throws
/// RankZero when nothing survives.
Purification purify(const DensityMatrix& rho, double rank_tol = 1e-10);

/// Traces out the first index: rho[j][k] = sum_i amp(i,j) conj(amp(i,k)).
/// The result's trace equals the squared norm of psi0 (not re-normalized,
/// not validated). Throws SingleParty for a 1-party input.
DensityMatrix partial_trace_0(const StateTensor& psi0);

struct MixedCanonical {
    DensityMatrix upsilon;  // partial trace of the canonical purification
    CanonicalForm cf0;      // full canonical form of psi0
};

/// Canonical form of a mixed state: purify, take the HOSVD of psi0, and
/// trace the 0th party back out of the core.
MixedCanonical canonical_mixed(const DensityMatrix& rho);

/// Local-unitary equivalence of density matrices via their purifications.
/// A rank mismatch (different spectra) short-circuits to Inequivalent;
/// otherwise the verdict is compare_pure on the two psi0, where the 0th
/// party participates as an ordinary mode with full unitary freedom.
Verdict compare_mixed(const DensityMatrix& a, const DensityMatrix& b,
                      const CompareOptions& opts = {});

} // namespace lucanon
