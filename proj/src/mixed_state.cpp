#include "lucanon/mixed_state.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "lucanon/errors.hpp"

namespace lucanon {

namespace {

using Complex = std::complex<double>;

std::int64_t checked_product(const std::vector<int>& dims) {
    if (dims.empty())
        throw EmptyDims("density matrix needs at least one party");
    std::int64_t d = 1;
    for (std::size_t n = 0; n < dims.size(); ++n) {
        if (dims[n] < 1)
            throw BadDim("party " + std::to_string(n + 1) + " has dimension " +
                         std::to_string(dims[n]) + ", expected >= 1");
        d *= dims[n];
    }
    return d;
}

// Same gauge as the canonical-form factors: largest-magnitude entry
// (lowest index on ties) real and positive.
void fix_vector_phase(Eigen::VectorXcd& v) {
    Eigen::Index best = 0;
    double best_mag = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v(i));
        if (mag > best_mag) {
            best_mag = mag;
            best = i;
        }
    }
    if (best_mag == 0.0)
        return;
    const Complex z = v(best);
    v *= std::conj(z) / std::abs(z);
}

} // namespace

DensityMatrix DensityMatrix::unchecked(std::vector<int> dims, Eigen::MatrixXcd matrix) {
    const std::int64_t d = checked_product(dims);
    if (matrix.rows() != d || matrix.cols() != d)
        throw ShapeMismatch("density matrix is " + std::to_string(matrix.rows()) + " x " +
                            std::to_string(matrix.cols()) + ", dims require " + std::to_string(d) +
                            " x " + std::to_string(d));
    return DensityMatrix(std::move(dims), std::move(matrix));
}

DensityMatrix new_density_matrix(std::vector<int> dims, Eigen::MatrixXcd matrix) {
    DensityMatrix rho = DensityMatrix::unchecked(std::move(dims), std::move(matrix));
    const Eigen::MatrixXcd& m = rho.matrix();

    const double scale = m.cwiseAbs().maxCoeff();
    const double herm_defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm_defect > 1e-10 * scale)
        throw NotHermitian("Hermiticity defect " + std::to_string(herm_defect) +
                           " exceeds 1e-10 relative to the largest entry " +
                           std::to_string(scale));

    const Complex tr = m.trace();
    if (std::abs(tr - Complex(1.0, 0.0)) > 1e-10)
        throw NotTraceOne("trace is (" + std::to_string(tr.real()) + ", " +
                          std::to_string(tr.imag()) + "), expected 1 within 1e-10");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    const double min_ev = es.eigenvalues().minCoeff();
    if (min_ev < -1e-10)
        throw NotPSD("smallest eigenvalue " + std::to_string(min_ev) + " is below -1e-10");

    return rho;
}

Purification purify(const DensityMatrix& rho, double rank_tol) {
    const Eigen::MatrixXcd& m = rho.matrix();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()));

    const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
    const std::int64_t d = rho.dim();
    int rank = 0;
    while (rank < d && ev(d - 1 - rank) > rank_tol)
        ++rank;
    if (rank == 0)
        throw RankZero("no eigenvalue above the rank tolerance " + std::to_string(rank_tol));

    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(static_cast<std::int64_t>(rank) * d);
    Eigen::VectorXd weights(rank);
    for (int i = 0; i < rank; ++i) {
        const Eigen::Index col = d - 1 - i;  // descending eigenvalues
        Eigen::VectorXcd v = es.eigenvectors().col(col);
        fix_vector_phase(v);
        amp.segment(static_cast<std::int64_t>(i) * d, d) = std::sqrt(ev(col)) * v;
        weights(i) = ev(col);
    }

    std::vector<int> dims;
    dims.reserve(rho.dims().size() + 1);
    dims.push_back(rank);
    dims.insert(dims.end(), rho.dims().begin(), rho.dims().end());
    return Purification{StateTensor(std::move(dims), std::move(amp)), std::move(weights)};
}

DensityMatrix partial_trace_0(const StateTensor& psi0) {
    if (psi0.order() < 2)
        throw SingleParty("tracing out the first party of a 1-party state would leave nothing");

    std::vector<int> keep(psi0.order() - 1);
    for (std::size_t n = 0; n < keep.size(); ++n)
        keep[n] = static_cast<int>(n) + 2;
    Eigen::MatrixXcd m = reduced_density_matrix(psi0, keep);

    std::vector<int> dims(psi0.dims().begin() + 1, psi0.dims().end());
    return DensityMatrix::unchecked(std::move(dims), std::move(m));
}

MixedCanonical canonical_mixed(const DensityMatrix& rho) {
    Purification p = purify(rho);
    CanonicalForm cf0 = hosvd(p.psi0);
    DensityMatrix raw = partial_trace_0(cf0.core);
    const double tr = raw.trace();
    DensityMatrix upsilon = new_density_matrix(raw.dims(), raw.matrix() / tr);
    return MixedCanonical{std::move(upsilon), std::move(cf0)};
}

Verdict compare_mixed(const DensityMatrix& a, const DensityMatrix& b,
                      const CompareOptions& opts) {
    if (a.dims() != b.dims())
        throw DimsMismatch("density matrices have different party dimensions");

    Purification pa = purify(a);
    Purification pb = purify(b);
    if (pa.weights.size() != pb.weights.size()) {
        Verdict v;
        v.outcome = Outcome::Inequivalent;
        v.certificate = Certificate::SigmaMismatch;
        v.detail = "spectral ranks differ: " + std::to_string(pa.weights.size()) + " vs " +
                   std::to_string(pb.weights.size()) +
                   "; the spectra are local invariants, so no purification comparison is needed";
        return v;
    }

    return compare_pure(pa.psi0, pb.psi0, opts);
}

} // namespace lucanon
