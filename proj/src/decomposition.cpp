#include "lucanon/decomposition.hpp"

#include <string>

namespace lucanon {

const Eigen::VectorXd& SingularValueMatrix::column(int n) const {
    if (n < 1 || n > modes())
        throw ModeOutOfRange("mode " + std::to_string(n) + " out of range 1.." +
                             std::to_string(modes()));
    return columns[static_cast<std::size_t>(n - 1)];
}

const std::vector<DegeneracyBlock>& DegeneracyStructure::blocks(int n) const {
    if (n < 1 || n > mode_count())
        throw ModeOutOfRange("mode " + std::to_string(n) + " out of range 1.." +
                             std::to_string(mode_count()));
    return modes[static_cast<std::size_t>(n - 1)];
}

bool DegeneracyStructure::same_shape(const DegeneracyStructure& other) const {
    if (modes.size() != other.modes.size())
        return false;
    for (std::size_t n = 0; n < modes.size(); ++n) {
        if (modes[n].size() != other.modes[n].size())
            return false;
        for (std::size_t b = 0; b < modes[n].size(); ++b)
            if (modes[n][b].size != other.modes[n][b].size)
                return false;
    }
    return true;
}

bool DegeneracyStructure::fully_non_degenerate() const {
    for (const auto& mode : modes)
        for (const auto& blk : mode)
            if (blk.size != 1)
                return false;
    return true;
}

bool DegeneracyStructure::fully_degenerate() const {
    for (const auto& mode : modes)
        if (mode.size() != 1)
            return false;
    return true;
}

int DegeneracyStructure::block_of(int n, int i) const {
    const auto& mode = blocks(n);
    int cursor = 0;
    for (std::size_t b = 0; b < mode.size(); ++b) {
        cursor += mode[b].size;
        if (i < cursor)
            return static_cast<int>(b);
    }
    throw ModeOutOfRange("singular value index " + std::to_string(i) +
                         " out of range for mode " + std::to_string(n));
}

int DegeneracyStructure::block_start(int n, int b) const {
    const auto& mode = blocks(n);
    if (b < 0 || b >= static_cast<int>(mode.size()))
        throw ModeOutOfRange("block " + std::to_string(b) + " out of range for mode " +
                             std::to_string(n));
    int start = 0;
    for (int k = 0; k < b; ++k)
        start += mode[static_cast<std::size_t>(k)].size;
    return start;
}

namespace {

// Deterministic gauge: scale each column so its largest-magnitude entry
// (lowest row on ties) is real and positive.
void fix_column_phases(Eigen::MatrixXcd& w) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
        Eigen::Index best = 0;
        double best_mag = 0.0;
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            const double mag = std::abs(w(r, c));
            if (mag > best_mag) {
                best_mag = mag;
                best = r;
            }
        }
        if (best_mag == 0.0)
            continue;
        const Complex z = w(best, c);
        w.col(c) *= std::conj(z) / std::abs(z);
    }
}

} // namespace

std::pair<Eigen::MatrixXcd, Eigen::VectorXd> mode_singular_values(const StateTensor& t, int mode) {
    const UnfoldedMatrix m = unfold(t, mode);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m.entries, Eigen::ComputeFullU);
    if (svd.info() != Eigen::Success)
        throw SvdFailure("SVD did not converge on mode " + std::to_string(mode));

    Eigen::MatrixXcd w = svd.matrixU();
    fix_column_phases(w);

    const Eigen::Index rows = m.entries.rows();
    Eigen::VectorXd sigma = Eigen::VectorXd::Zero(rows);
    sigma.head(svd.singularValues().size()) = svd.singularValues();

    // Left factor in the convention U Psi_(n) V = diag(sigma).
    return {w.adjoint(), sigma};
}

CanonicalForm hosvd(const StateTensor& t) {
    const int N = t.order();
    std::vector<Eigen::MatrixXcd> factors;
    factors.reserve(N);
    SingularValueMatrix sigma;
    sigma.columns.reserve(N);
    for (int n = 1; n <= N; ++n) {
        auto [u, s] = mode_singular_values(t, n);
        factors.push_back(std::move(u));
        sigma.columns.push_back(std::move(s));
    }
    LocalUnitarySet units(std::move(factors));
    StateTensor core = apply_local_unitaries(t, units);
    return CanonicalForm{std::move(core), std::move(units), std::move(sigma)};
}

SingularValueMatrix singular_value_matrix(const CanonicalForm& cf) {
    SingularValueMatrix out;
    out.columns.reserve(cf.core.order());
    for (int n = 1; n <= cf.core.order(); ++n)
        out.columns.push_back(unfold(cf.core, n).entries.rowwise().norm());
    return out;
}

DegeneracyStructure degeneracy_structure(const SingularValueMatrix& sigma, double cluster_tol) {
    DegeneracyStructure ds;
    ds.modes.reserve(sigma.columns.size());
    for (std::size_t n = 0; n < sigma.columns.size(); ++n) {
        const Eigen::VectorXd& col = sigma.columns[n];
        std::vector<DegeneracyBlock> mode;
        double block_sum = 0.0;
        int block_size = 0;
        for (Eigen::Index i = 0; i < col.size(); ++i) {
            if (i > 0 && col(i) > col(i - 1))
                throw NotSorted("singular values of mode " + std::to_string(n + 1) +
                                " are not sorted descending");
            if (block_size > 0 && col(i - 1) - col(i) > cluster_tol) {
                mode.push_back({block_size, block_sum / block_size});
                block_sum = 0.0;
                block_size = 0;
            }
            block_sum += col(i);
            ++block_size;
        }
        if (block_size > 0)
            mode.push_back({block_size, block_sum / block_size});
        ds.modes.push_back(std::move(mode));
    }
    return ds;
}

} // namespace lucanon
