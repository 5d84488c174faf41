#pragma once

// Higher-order SVD canonical forms. Every mode-n unfolding is brought to
// the form U Psi_(n) V = diag(sigma); applying the collected left factors
// to the state yields a core tensor whose mode-n slices are mutually
// orthogonal with squared norms sigma_j^2. A deterministic gauge makes the
// factors reproducible: each left-singular-vector column is scaled so its
// largest-magnitude entry (lowest row on ties) is real and positive.

#include <utility>

#include "lucanon/state_tensor.hpp"

namespace lucanon {

/// Per-mode singular values, one descending column per mode. Columns may
/// have different lengths when party dimensions differ.
struct SingularValueMatrix {
    std::vector<Eigen::VectorXd> columns;

    int modes() const { return static_cast<int>(columns.size()); }
    const Eigen::VectorXd& column(int n) const;  // 1-based
};

/// The core tensor, the mode unitaries that produced it (core equals the
/// unitaries applied to the input), and the singular values per mode.
struct CanonicalForm {
    StateTensor core;
    LocalUnitarySet mode_unitaries;
    SingularValueMatrix sigma;
};

struct DegeneracyBlock {
    int size = 0;
    double value = 0.0;  // representative (mean) singular value
};

/// Partition of each mode's singular values into clusters of (numerically)
/// equal values, in the descending order they appear.
struct DegeneracyStructure {
    std::vector<std::vector<DegeneracyBlock>> modes;

    int mode_count() const { return static_cast<int>(modes.size()); }
    const std::vector<DegeneracyBlock>& blocks(int n) const;  // 1-based

    /// True when block sizes agree mode by mode (values may differ).
    bool same_shape(const DegeneracyStructure& other) const;
    bool fully_non_degenerate() const;  // every block a singleton
    bool fully_degenerate() const;      // one block per mode

    /// 0-based block containing 0-based singular value index `i` of mode n.
    int block_of(int n, int i) const;
    /// 0-based first singular value index of 0-based block `b` of mode n.
    int block_start(int n, int b) const;
};

/// Left factor U (applied to the mode as in the canonical form) and the
/// full-length singular value vector of the mode-n unfolding, descending,
/// zero-padded when the unfolding has fewer columns than rows.
std::pair<Eigen::MatrixXcd, Eigen::VectorXd> mode_singular_values(const StateTensor& t, int mode);

/// Full canonical form: factors from the input's unfoldings, core obtained
/// by applying all of them. Deterministic for identical input bits.
CanonicalForm hosvd(const StateTensor& t);

/// Recomputes sigma from the core's slice norms. Matches cf.sigma for any
/// form produced by hosvd; useful as a consistency check elsewhere.
SingularValueMatrix singular_value_matrix(const CanonicalForm& cf);

/// Clusters each descending sigma column by chaining adjacent gaps of at
/// most cluster_tol. Throws NotSorted if a column increases.
DegeneracyStructure degeneracy_structure(const SingularValueMatrix& sigma,
                                         double cluster_tol = 1e-6);

} // namespace lucanon
