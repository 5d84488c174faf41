#pragma once

// Dense multipartite pure-state storage plus the index bookkeeping every
// other module builds on: mode unfoldings, vectorization, inner products,
// local-unitary action, and seeded random sampling.
//
// Conventions, used consistently across the library:
//   * amplitudes are stored flat with the first party's index slowest and
//     the last party's index fastest;
//   * modes and parties are 1-based in the public API and in error text;
//   * the mode-n unfolding has rows indexed by i_n and columns indexed by
//     the remaining indices in cyclic order (i_{n+1}, ..., i_N, i_1, ...,
//     i_{n-1}) with the last listed index fastest;
//   * vectorize stacks matrix columns (column-major);
//   * inner_product(a, b) is conjugate-linear in the first argument.

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "lucanon/errors.hpp"

namespace lucanon {

using Complex = std::complex<double>;

/// Flat multi-index helpers, first index slowest. `idx` entries are 0-based.
std::int64_t flatten_index(const std::vector<int>& idx, const std::vector<int>& dims);
std::vector<int> unflatten_index(std::int64_t flat, const std::vector<int>& dims);

/// Immutable dense tensor of complex amplitudes for an N-party pure state.
/// Dimensions may differ per party; normalization is not enforced here.
class StateTensor {
public:
    StateTensor(std::vector<int> dims, Eigen::VectorXcd amplitudes);

    int order() const { return static_cast<int>(dims_.size()); }
    const std::vector<int>& dims() const { return dims_; }
    std::int64_t size() const { return amp_.size(); }
    const Eigen::VectorXcd& amplitudes() const { return amp_; }
    double norm() const { return amp_.norm(); }

    /// Amplitude at a 0-based multi-index (internal convenience).
    Complex at(const std::vector<int>& idx) const;

private:
    std::vector<int> dims_;
    Eigen::VectorXcd amp_;
};

/// A mode-n unfolding together with enough shape context to refold it.
struct UnfoldedMatrix {
    Eigen::MatrixXcd entries;
    int mode = 0;                  // 1-based
    std::vector<int> source_dims;
};

/// An ordered list of per-party matrices intended to act one per mode.
/// Construction checks shapes only; use `checked` (or pass a tolerance to
/// consumers such as apply_local_unitaries) to enforce unitarity, so that
/// deliberately perturbed sets can still be represented and then rejected.
class LocalUnitarySet {
public:
    explicit LocalUnitarySet(std::vector<Eigen::MatrixXcd> mats);

    /// Throws NotUnitary if any matrix deviates from unitarity beyond tol.
    static LocalUnitarySet checked(std::vector<Eigen::MatrixXcd> mats, double tol = 1e-10);

    int count() const { return static_cast<int>(mats_.size()); }
    const std::vector<Eigen::MatrixXcd>& matrices() const { return mats_; }
    const Eigen::MatrixXcd& matrix(int n) const;  // 1-based
    std::vector<int> dims() const;

    /// max_n || U_n^dagger U_n - E ||_max, the worst unitarity violation.
    double max_unitarity_defect() const;

    /// Entrywise adjoint of every member; inverts the set when unitary.
    LocalUnitarySet adjoint() const;

private:
    std::vector<Eigen::MatrixXcd> mats_;
};

/// Mode-n unfolding, 1 <= mode <= order. Throws ModeOutOfRange otherwise.
UnfoldedMatrix unfold(const StateTensor& t, int mode);

/// Inverse of unfold; checks entry count against the recorded dims.
StateTensor refold(const UnfoldedMatrix& m);

/// Column-major stacking of matrix columns.
Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& m);

/// <a|b> = sum_i conj(a_i) b_i. Throws DimsMismatch on shape disagreement.
Complex inner_product(const StateTensor& a, const StateTensor& b);

/// (U_1 x ... x U_N) |t>. Each matrix must be I_n x I_n and unitary within
/// tol (max-norm of U^dagger U - E); violations throw NotUnitary.
StateTensor apply_local_unitaries(const StateTensor& t, const LocalUnitarySet& u,
                                  double tol = 1e-10);

/// Normalized state with i.i.d. complex Gaussian amplitudes. Deterministic
/// in (dims, seed).
StateTensor random_state(const std::vector<int>& dims, std::uint64_t seed);

/// Haar-distributed unitary via QR of a Ginibre matrix with the R-diagonal
/// phase fix. Deterministic in (dim, seed).
Eigen::MatrixXcd random_unitary(int dim, std::uint64_t seed);

/// Reduced density matrix on the given 1-based parties (strictly
/// increasing, non-empty); all other parties are traced out. Row and
/// column indices run over the kept parties in the listed order, first
/// listed slowest.
Eigen::MatrixXcd reduced_density_matrix(const StateTensor& t, const std::vector<int>& parties);

} // namespace lucanon
