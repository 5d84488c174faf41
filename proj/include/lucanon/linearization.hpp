#pragma once

// Machinery for states that are fully degenerate in every mode, where the
// whole unitary group of each party survives as symmetry. Each candidate
// unitary is split through its conjugation form X^dagger Phi X; regarding
// every monomial of X entries as one variable nu turns the matching
// condition into a linear system per phase choice, and swapping one
// mode's (row, column) index pair between two monomials yields exact
// quadratic consistency relations. Counting formulas for the degree-m
// products are exact integer arithmetic.

#include <array>

#include "lucanon/equivalence.hpp"

namespace lucanon {

struct ProductCount {
    std::uint64_t total = 0;        // C(P^2 + m - 1, m), P = prod I_n
    std::uint64_t independent = 0;  // prod_n C(I_n^2 + m - 1, m)
};

/// Exact counts of degree-m nu products. Throws Overflow when a count
/// does not fit in 64 bits, BadDim for m < 1.
ProductCount count_products(const std::vector<int>& dims, int m);

/// nu variables are indexed by (row string j, column string i), flattened
/// as j_flat * P + i_flat with the first party's index most significant.
struct QuadraticRelation {
    std::array<std::int64_t, 2> lhs;  // variable pair, sorted ascending
    std::array<std::int64_t, 2> rhs;

    bool operator==(const QuadraticRelation&) const = default;
};

/// All distinct relations obtained by swapping one mode's index pair
/// between two monomials, deduplicated; `limit` > 0 truncates the result.
/// Throws ScaleExceeded when (prod I_n)^2 > 4096.
std::vector<QuadraticRelation> quadratic_relations(const std::vector<int>& dims,
                                                   std::size_t limit = 0);

/// nu assembled from per-mode matrices: nu_{j,i} = prod_n x^(n)_{j_n i_n}.
Eigen::VectorXcd monomial_variables(const std::vector<Eigen::MatrixXcd>& x);

/// Rank of the relation set read as linear constraints (product of lhs
/// pair) = (product of rhs pair) on the degree-2 products. Exact, via
/// union-find on product indices; total products minus this rank bounds
/// the independent degree-2 products from above.
std::int64_t relation_rank(const std::vector<QuadraticRelation>& rels,
                           const std::vector<int>& dims);

/// The linear system at one phase instantiation: row j states
/// sum_i (e^{i(phi_{j_1}+...+phi_{j_N})} w_i - w'_i) nu_{j,i} = 0.
struct LinearizedSystem {
    std::vector<int> dims;
    std::vector<Eigen::VectorXd> phases;
    Eigen::MatrixXcd coefficients;  // (j, i) entry as above

    std::int64_t variable_count() const;  // (prod I_n)^2
    /// Largest row residual |sum_i coefficients(j, i) nu(j * P + i)|.
    double residual(const Eigen::VectorXcd& nu) const;
};

/// Builds the system from two cores and per-mode phase vectors. Throws
/// DimsMismatch on shape disagreement, ScaleExceeded over the cap.
LinearizedSystem build_linear_system(const StateTensor& core_a, const StateTensor& core_b,
                                     const std::vector<Eigen::VectorXd>& phases);

/// Decision routine for the fully degenerate stratum: marginal-spectra
/// certificate, then seeded witness search over the full per-mode unitary
/// groups; when a witness is found its conjugation split is fed back into
/// the linear system as a consistency diagnostic. A failed search yields
/// Undecided, never Inequivalent. Throws NotFullyDegenerate when a mode
/// has more than one degeneracy block, ScaleExceeded over the cap.
Verdict solve_fully_degenerate(const StateTensor& a, const StateTensor& b,
                               const CompareOptions& opts = {});

} // namespace lucanon
