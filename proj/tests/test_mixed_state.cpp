#include <doctest.h>

#include <cmath>
#include <complex>

#include "lucanon/mixed_state.hpp"

using namespace lucanon;

namespace {

const std::complex<double> I{0.0, 1.0};

StateTensor from_reals(const std::vector<int>& dims, const std::vector<double>& vals) {
    Eigen::VectorXcd amp(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t k = 0; k < vals.size(); ++k)
        amp(static_cast<Eigen::Index>(k)) = vals[k];
    return StateTensor(dims, amp);
}

// rho from tracing the 0th party out of a random (r, dims...) pure state;
// the trace is the squared norm, hence exactly 1.
DensityMatrix random_mixed(const std::vector<int>& dims, int rank, std::uint64_t seed) {
    std::vector<int> full{rank};
    full.insert(full.end(), dims.begin(), dims.end());
    const DensityMatrix raw = partial_trace_0(random_state(full, seed));
    return new_density_matrix(raw.dims(), raw.matrix());
}

// p |Phi+><Phi+| + (1-p)/4 I on two qubits.
DensityMatrix isotropic_pair(double p) {
    const StateTensor bell = from_reals({2, 2}, {1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0)});
    Eigen::MatrixXcd m = p * bell.amplitudes() * bell.amplitudes().adjoint();
    m += (1.0 - p) / 4.0 * Eigen::MatrixXcd::Identity(4, 4);
    return new_density_matrix({2, 2}, m);
}

} // namespace

TEST_CASE("density matrix construction names the violated invariant") {
    const Eigen::MatrixXcd id4 = Eigen::MatrixXcd::Identity(4, 4);
    CHECK_NOTHROW(new_density_matrix({2, 2}, 0.25 * id4));

    CHECK_THROWS_AS(new_density_matrix({2}, 0.25 * id4), ShapeMismatch);
    CHECK_THROWS_AS(new_density_matrix({}, Eigen::MatrixXcd::Identity(1, 1)), EmptyDims);
    CHECK_THROWS_AS(new_density_matrix({2, 0}, id4), BadDim);

    Eigen::MatrixXcd skew = 0.25 * id4;
    skew(0, 1) = 0.1;  // no matching (1,0) entry
    CHECK_THROWS_AS(new_density_matrix({2, 2}, skew), NotHermitian);

    CHECK_THROWS_AS(new_density_matrix({2, 2}, 0.3 * id4), NotTraceOne);

    Eigen::MatrixXcd indefinite = 0.25 * id4;
    indefinite(0, 0) = 0.75;
    indefinite(1, 1) = -0.25;
    CHECK_THROWS_AS(new_density_matrix({2, 2}, indefinite), NotPSD);
}

TEST_CASE("purifying a pure state gives rank one and the state back") {
    const StateTensor bell = from_reals({2, 2}, {1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0)});
    const DensityMatrix rho =
        new_density_matrix({2, 2}, bell.amplitudes() * bell.amplitudes().adjoint());

    const Purification p = purify(rho);
    REQUIRE(p.weights.size() == 1);
    CHECK(p.weights(0) == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(p.psi0.dims() == std::vector<int>{1, 2, 2});

    // Rank-one purification is the state itself, in the fixed phase gauge.
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(p.psi0.amplitudes()(k) - bell.amplitudes()(k)) < 1e-12);
}

TEST_CASE("purification weights are the spectrum, descending and positive") {
    const DensityMatrix rho = random_mixed({2, 3}, 4, 77);
    const Purification p = purify(rho);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix());
    REQUIRE(p.weights.size() <= rho.dim());
    for (int i = 0; i < p.weights.size(); ++i) {
        CHECK(p.weights(i) > 1e-10);
        if (i > 0)
            CHECK(p.weights(i) <= p.weights(i - 1) + 1e-14);
        // i-th largest eigenvalue
        CHECK(p.weights(i) ==
              doctest::Approx(es.eigenvalues()(rho.dim() - 1 - i)).epsilon(1e-10));
    }
}

TEST_CASE("partial trace of the purification returns the input matrix") {
    int cases = 0;
    for (const auto& dims : {std::vector<int>{2, 2}, std::vector<int>{2, 3}, std::vector<int>{2, 2, 2}}) {
        for (int rank : {1, 2, 3}) {
            const DensityMatrix rho = random_mixed(dims, rank, 100 + 7 * cases);
            const DensityMatrix back = partial_trace_0(purify(rho).psi0);
            REQUIRE(back.dims() == rho.dims());
            CHECK((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-10);
            ++cases;
        }
    }
    CHECK(cases == 9);
}

TEST_CASE("partial trace keeps the squared norm as its trace") {
    // Unnormalized two-party state with norm sqrt(5).
    const StateTensor t = from_reals({2, 2}, {2, 0, 0, 1});
    const DensityMatrix rho = partial_trace_0(t);
    CHECK(rho.trace() == doctest::Approx(5.0).epsilon(1e-12));

    CHECK_THROWS_AS(partial_trace_0(from_reals({3}, {1, 0, 0})), SingleParty);
}

TEST_CASE("rank tolerance filters the spectrum and can empty it") {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    m(0, 0) = 1.0 - 2e-12;
    m(1, 1) = 2e-12;  // below the default rank tolerance
    const DensityMatrix rho = new_density_matrix({2, 2}, m);

    CHECK(purify(rho).weights.size() == 1);
    CHECK(purify(rho, 1e-13).weights.size() == 2);
    CHECK_THROWS_AS(purify(rho, 2.0), RankZero);
}

TEST_CASE("mode-1 singular values of the purification are root eigenvalues") {
    const DensityMatrix rho = random_mixed({2, 2, 2}, 3, 5);
    const Purification p = purify(rho);
    const CanonicalForm cf = hosvd(p.psi0);

    REQUIRE(cf.sigma.column(1).size() == p.weights.size());
    for (int i = 0; i < p.weights.size(); ++i)
        CHECK(cf.sigma.column(1)(i) == doctest::Approx(std::sqrt(p.weights(i))).epsilon(1e-10));
}

TEST_CASE("canonical form of a mixed state traces back to a valid matrix") {
    const DensityMatrix rho = random_mixed({2, 3}, 2, 21);
    const MixedCanonical mc = canonical_mixed(rho);

    CHECK(mc.upsilon.dims() == rho.dims());
    CHECK(mc.upsilon.trace() == doctest::Approx(1.0).epsilon(1e-12));

    // The canonical matrix is the partial trace of the canonical core.
    const DensityMatrix direct = partial_trace_0(mc.cf0.core);
    CHECK((direct.matrix() / direct.trace() - mc.upsilon.matrix()).cwiseAbs().maxCoeff() < 1e-12);

    // Spectra agree with the original: the 0th-party rotation is a similarity.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(rho.matrix());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eb(mc.upsilon.matrix());
    CHECK((ea.eigenvalues() - eb.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("locally rotated mixed states compare as equivalent") {
    const DensityMatrix rho = random_mixed({2, 2}, 2, 31);
    const Eigen::MatrixXcd v1 = random_unitary(2, 401);
    const Eigen::MatrixXcd v2 = random_unitary(2, 402);
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(4, 4);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d)
                    v(a * 2 + b, c * 2 + d) = v1(a, c) * v2(b, d);
    const DensityMatrix rot = new_density_matrix({2, 2}, v * rho.matrix() * v.adjoint());

    const Verdict verdict = compare_mixed(rho, rot);
    REQUIRE(verdict.outcome == Outcome::Equivalent);
    REQUIRE(verdict.witness.has_value());

    // The witness acts on the purifications, 0th party included.
    const StateTensor pa = purify(rho).psi0;
    const StateTensor pb = purify(rot).psi0;
    CHECK(verify_witness(pa, pb, *verdict.witness, 1e-8));
}

TEST_CASE("purifications from a reshuffled degenerate eigenbasis still match") {
    // Maximally mixed qubit pair: any orthonormal eigenbasis is as good.
    const DensityMatrix rho = new_density_matrix({2, 2}, 0.25 * Eigen::MatrixXcd::Identity(4, 4));
    const StateTensor pa = purify(rho).psi0;

    const Eigen::MatrixXcd w = random_unitary(4, 55);
    Eigen::VectorXcd amp(16);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            amp(i * 4 + j) = 0.5 * w(j, i);
    const StateTensor pb = StateTensor({4, 2, 2}, amp);

    // Same mixed state either way.
    CHECK((partial_trace_0(pb).matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-12);

    const Verdict verdict = compare_pure(pa, pb);
    CHECK(verdict.outcome == Outcome::Equivalent);
}

TEST_CASE("isotropic states of different weight are told apart by spectra") {
    const Verdict verdict = compare_mixed(isotropic_pair(0.3), isotropic_pair(0.5));
    REQUIRE(verdict.outcome == Outcome::Inequivalent);
    REQUIRE(verdict.certificate.has_value());
    CHECK(*verdict.certificate == Certificate::SigmaMismatch);
}

TEST_CASE("rank mismatch short-circuits before any purification comparison") {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    m(0, 0) = 1.0;
    const DensityMatrix pure = new_density_matrix({2, 2}, m);
    const DensityMatrix mixed = new_density_matrix({2, 2}, 0.25 * Eigen::MatrixXcd::Identity(4, 4));

    const Verdict verdict = compare_mixed(pure, mixed);
    REQUIRE(verdict.outcome == Outcome::Inequivalent);
    CHECK(*verdict.certificate == Certificate::SigmaMismatch);

    CHECK_THROWS_AS(compare_mixed(pure, new_density_matrix({4}, 0.25 * Eigen::MatrixXcd::Identity(4, 4))),
                    DimsMismatch);
}

TEST_CASE("comparing a mixed state with itself returns an identity-grade witness") {
    const DensityMatrix rho = random_mixed({2, 2, 2}, 2, 91);
    const Verdict verdict = compare_mixed(rho, rho);
    REQUIRE(verdict.outcome == Outcome::Equivalent);
    REQUIRE(verdict.witness.has_value());
    CHECK(verdict.witness->residual <= 1e-8);
}
