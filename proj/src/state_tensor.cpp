#include "lucanon/state_tensor.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

namespace lucanon {

namespace {

std::int64_t checked_total_size(const std::vector<int>& dims) {
    if (dims.empty())
        throw EmptyDims("dims must list at least one party");
    std::int64_t total = 1;
    for (std::size_t n = 0; n < dims.size(); ++n) {
        if (dims[n] < 1)
            throw BadDim("dimension of party " + std::to_string(n + 1) +
                         " must be >= 1, got " + std::to_string(dims[n]));
        total *= dims[n];
    }
    return total;
}

// One engine per public sampler, so random_state(dims, s) and
// random_unitary(d, s) are each reproducible from the seed alone.
std::mt19937_64 seeded_engine(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32)};
    return std::mt19937_64(seq);
}

Eigen::MatrixXcd ginibre(int rows, int cols, std::mt19937_64& eng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd g(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const double re = gauss(eng);
            const double im = gauss(eng);
            g(r, c) = Complex(re, im);
        }
    return g;
}

} // namespace

std::int64_t flatten_index(const std::vector<int>& idx, const std::vector<int>& dims) {
    if (idx.size() != dims.size())
        throw LengthMismatch("multi-index has " + std::to_string(idx.size()) +
                             " entries for " + std::to_string(dims.size()) + " parties");
    std::int64_t flat = 0;
    for (std::size_t n = 0; n < dims.size(); ++n) {
        if (idx[n] < 0 || idx[n] >= dims[n])
            throw ModeOutOfRange("index " + std::to_string(idx[n]) +
                                 " out of range for party " + std::to_string(n + 1));
        flat = flat * dims[n] + idx[n];
    }
    return flat;
}

std::vector<int> unflatten_index(std::int64_t flat, const std::vector<int>& dims) {
    std::vector<int> idx(dims.size());
    for (std::size_t n = dims.size(); n-- > 0;) {
        idx[n] = static_cast<int>(flat % dims[n]);
        flat /= dims[n];
    }
    return idx;
}

StateTensor::StateTensor(std::vector<int> dims, Eigen::VectorXcd amplitudes)
    : dims_(std::move(dims)), amp_(std::move(amplitudes)) {
    const std::int64_t total = checked_total_size(dims_);
    if (amp_.size() != total)
        throw LengthMismatch("amplitude count " + std::to_string(amp_.size()) +
                             " does not match product of dims " + std::to_string(total));
}

Complex StateTensor::at(const std::vector<int>& idx) const {
    return amp_(flatten_index(idx, dims_));
}

LocalUnitarySet::LocalUnitarySet(std::vector<Eigen::MatrixXcd> mats) : mats_(std::move(mats)) {
    if (mats_.empty())
        throw EmptyDims("local unitary set must hold at least one matrix");
    for (std::size_t n = 0; n < mats_.size(); ++n) {
        if (mats_[n].rows() == 0 || mats_[n].rows() != mats_[n].cols())
            throw ShapeMismatch("matrix for party " + std::to_string(n + 1) +
                                " must be square and non-empty");
    }
}

LocalUnitarySet LocalUnitarySet::checked(std::vector<Eigen::MatrixXcd> mats, double tol) {
    LocalUnitarySet set(std::move(mats));
    const double defect = set.max_unitarity_defect();
    if (!(defect <= tol))
        throw NotUnitary("unitarity defect " + std::to_string(defect) +
                         " exceeds tolerance " + std::to_string(tol));
    return set;
}

const Eigen::MatrixXcd& LocalUnitarySet::matrix(int n) const {
    if (n < 1 || n > count())
        throw ModeOutOfRange("party " + std::to_string(n) + " out of range 1.." +
                             std::to_string(count()));
    return mats_[static_cast<std::size_t>(n - 1)];
}

std::vector<int> LocalUnitarySet::dims() const {
    std::vector<int> d(mats_.size());
    for (std::size_t n = 0; n < mats_.size(); ++n)
        d[n] = static_cast<int>(mats_[n].rows());
    return d;
}

double LocalUnitarySet::max_unitarity_defect() const {
    double worst = 0.0;
    for (const auto& u : mats_) {
        const Eigen::MatrixXcd gram = u.adjoint() * u;
        const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(u.rows(), u.cols());
        worst = std::max(worst, (gram - eye).cwiseAbs().maxCoeff());
    }
    return worst;
}

LocalUnitarySet LocalUnitarySet::adjoint() const {
    std::vector<Eigen::MatrixXcd> adj;
    adj.reserve(mats_.size());
    for (const auto& u : mats_)
        adj.push_back(u.adjoint());
    return LocalUnitarySet(std::move(adj));
}

UnfoldedMatrix unfold(const StateTensor& t, int mode) {
    const int N = t.order();
    if (mode < 1 || mode > N)
        throw ModeOutOfRange("mode " + std::to_string(mode) + " out of range 1.." +
                             std::to_string(N));
    const auto& dims = t.dims();
    const int n0 = mode - 1;
    const std::int64_t rows = dims[n0];
    const std::int64_t cols = t.size() / rows;

    // Column order is cyclic: (n+1, ..., N, 1, ..., n-1), last listed fastest.
    std::vector<int> order;
    order.reserve(N - 1);
    for (int k = 1; k < N; ++k)
        order.push_back((n0 + k) % N);

    UnfoldedMatrix out;
    out.entries.resize(rows, cols);
    out.mode = mode;
    out.source_dims = dims;

    std::vector<int> idx(N, 0);
    for (std::int64_t flat = 0; flat < t.size(); ++flat) {
        std::int64_t col = 0;
        for (int k : order)
            col = col * dims[k] + idx[k];
        out.entries(idx[n0], col) = t.amplitudes()(flat);
        for (int n = N - 1; n >= 0; --n) {
            if (++idx[n] < dims[n])
                break;
            idx[n] = 0;
        }
    }
    return out;
}

StateTensor refold(const UnfoldedMatrix& m) {
    const int N = static_cast<int>(m.source_dims.size());
    if (m.mode < 1 || m.mode > N)
        throw ModeOutOfRange("recorded mode " + std::to_string(m.mode) +
                             " out of range 1.." + std::to_string(N));
    const auto& dims = m.source_dims;
    const std::int64_t total = checked_total_size(dims);
    if (m.entries.size() != total || m.entries.rows() != dims[m.mode - 1])
        throw ShapeMismatch("unfolded entries do not match recorded source dims");

    const int n0 = m.mode - 1;
    std::vector<int> order;
    for (int k = 1; k < N; ++k)
        order.push_back((n0 + k) % N);

    Eigen::VectorXcd amp(total);
    std::vector<int> idx(N, 0);
    for (std::int64_t flat = 0; flat < total; ++flat) {
        std::int64_t col = 0;
        for (int k : order)
            col = col * dims[k] + idx[k];
        amp(flat) = m.entries(idx[n0], col);
        for (int n = N - 1; n >= 0; --n) {
            if (++idx[n] < dims[n])
                break;
            idx[n] = 0;
        }
    }
    return StateTensor(dims, std::move(amp));
}

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& m) {
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

Complex inner_product(const StateTensor& a, const StateTensor& b) {
    if (a.dims() != b.dims())
        throw DimsMismatch("states live on different party dimensions");
    return a.amplitudes().dot(b.amplitudes());
}

StateTensor apply_local_unitaries(const StateTensor& t, const LocalUnitarySet& u, double tol) {
    if (u.count() != t.order())
        throw LengthMismatch("got " + std::to_string(u.count()) + " matrices for " +
                             std::to_string(t.order()) + " parties");
    if (u.dims() != t.dims())
        throw ShapeMismatch("matrix sizes do not match party dimensions");
    const double defect = u.max_unitarity_defect();
    if (!(defect <= tol))
        throw NotUnitary("unitarity defect " + std::to_string(defect) +
                         " exceeds tolerance " + std::to_string(tol));

    StateTensor cur = t;
    for (int n = 1; n <= t.order(); ++n) {
        UnfoldedMatrix m = unfold(cur, n);
        m.entries = u.matrix(n) * m.entries;
        cur = refold(m);
    }
    return cur;
}

StateTensor random_state(const std::vector<int>& dims, std::uint64_t seed) {
    const std::int64_t total = checked_total_size(dims);
    auto eng = seeded_engine(seed);
    Eigen::MatrixXcd g = ginibre(static_cast<int>(total), 1, eng);
    Eigen::VectorXcd amp = g.col(0);
    const double nrm = amp.norm();
    if (nrm == 0.0)
        throw RankZero("sampled amplitude vector has zero norm");
    return StateTensor(dims, amp / nrm);
}

Eigen::MatrixXcd random_unitary(int dim, std::uint64_t seed) {
    if (dim < 1)
        throw BadDim("unitary dimension must be >= 1, got " + std::to_string(dim));
    auto eng = seeded_engine(seed);
    const Eigen::MatrixXcd g = ginibre(dim, dim, eng);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the gauge so the distribution is Haar rather than QR-dependent.
    for (int c = 0; c < dim; ++c) {
        const Complex d = r(c, c);
        const double mag = std::abs(d);
        q.col(c) *= (mag > 0.0) ? d / mag : Complex(1.0, 0.0);
    }
    return q;
}

Eigen::MatrixXcd reduced_density_matrix(const StateTensor& t, const std::vector<int>& parties) {
    const int N = t.order();
    if (parties.empty())
        throw EmptyDims("need at least one party to keep");
    for (std::size_t k = 0; k < parties.size(); ++k) {
        if (parties[k] < 1 || parties[k] > N)
            throw ModeOutOfRange("party " + std::to_string(parties[k]) +
                                 " out of range 1.." + std::to_string(N));
        if (k > 0 && parties[k] <= parties[k - 1])
            throw ModeOutOfRange("kept parties must be strictly increasing");
    }

    const auto& dims = t.dims();
    std::vector<char> kept(N, 0);
    for (int p : parties)
        kept[p - 1] = 1;

    std::vector<std::int64_t> stride(N, 1);
    for (int n = N - 2; n >= 0; --n)
        stride[n] = stride[n + 1] * dims[n + 1];

    std::vector<int> kept_dims, traced_dims;
    std::vector<std::int64_t> kept_strides, traced_strides;
    for (int n = 0; n < N; ++n) {
        if (kept[n]) {
            kept_dims.push_back(dims[n]);
            kept_strides.push_back(stride[n]);
        } else {
            traced_dims.push_back(dims[n]);
            traced_strides.push_back(stride[n]);
        }
    }

    auto offsets = [](const std::vector<int>& d, const std::vector<std::int64_t>& s) {
        std::int64_t count = 1;
        for (int v : d)
            count *= v;
        std::vector<std::int64_t> off(count);
        std::vector<int> idx(d.size(), 0);
        for (std::int64_t f = 0; f < count; ++f) {
            std::int64_t o = 0;
            for (std::size_t k = 0; k < d.size(); ++k)
                o += idx[k] * s[k];
            off[f] = o;
            for (std::size_t k = d.size(); k-- > 0;) {
                if (++idx[k] < d[k])
                    break;
                idx[k] = 0;
            }
        }
        return off;
    };

    const auto kept_off = offsets(kept_dims, kept_strides);
    const auto traced_off =
        traced_dims.empty() ? std::vector<std::int64_t>{0} : offsets(traced_dims, traced_strides);

    const auto& amp = t.amplitudes();
    const std::int64_t dk = static_cast<std::int64_t>(kept_off.size());
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dk, dk);
    for (std::int64_t j = 0; j < dk; ++j)
        for (std::int64_t k = 0; k < dk; ++k) {
            Complex acc(0.0, 0.0);
            for (std::int64_t tr : traced_off)
                acc += amp(kept_off[j] + tr) * std::conj(amp(kept_off[k] + tr));
            rho(j, k) = acc;
        }
    return rho;
}

} // namespace lucanon
