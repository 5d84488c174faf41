#include <doctest.h>

#include "lucanon/decomposition.hpp"

using namespace lucanon;

namespace {

StateTensor from_reals(const std::vector<int>& dims, const std::vector<double>& vals) {
    Eigen::VectorXcd amp(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t k = 0; k < vals.size(); ++k)
        amp(static_cast<Eigen::Index>(k)) = vals[k];
    return StateTensor(dims, amp);
}

// Three-qubit state used throughout: rows of the mode-1 unfolding
// concatenated, so flat order (i1 slowest) is exactly this list.
StateTensor reference_three_qubit() {
    return from_reals({2, 2, 2}, {0.0260603, 1.05491, -3.69051, 0.437711,
                                  1.25266, 1.07259, 3.2378, 1.5625});
}

StateTensor ghz3() {
    const double a = 1.0 / std::sqrt(2.0);
    return from_reals({2, 2, 2}, {a, 0, 0, 0, 0, 0, 0, a});
}

} // namespace

TEST_CASE("reference three-qubit state: singular values and core magnitudes") {
    const CanonicalForm cf = hosvd(reference_three_qubit());

    const double sig[2][3] = {{5.0390621, 5.31585513, 5.17054912},
                              {2.27534257, 1.52020225, 1.95825242}};
    for (int n = 1; n <= 3; ++n) {
        REQUIRE(cf.sigma.column(n).size() == 2);
        CHECK(cf.sigma.column(n)(0) == doctest::Approx(sig[0][n - 1]).epsilon(1e-6));
        CHECK(cf.sigma.column(n)(1) == doctest::Approx(sig[1][n - 1]).epsilon(1e-6));
    }

    // Entry magnitudes of the core's mode-1 unfolding are gauge-free.
    const double mag[2][4] = {{5.01792104, 0.28149884, 0.35488204, 0.08621163},
                              {0.19518869, 1.72088466, 1.17940948, 0.88692416}};
    const Eigen::MatrixXcd m = unfold(cf.core, 1).entries;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 4; ++c)
            CHECK(std::abs(m(r, c)) == doctest::Approx(mag[r][c]).epsilon(1e-6));

    // Real input stays real in this gauge.
    CHECK(cf.core.amplitudes().imag().cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("core slices are mutually orthogonal with squared sigma norms") {
    for (std::uint64_t seed : {2u, 9u}) {
        const StateTensor t = random_state({2, 3, 2}, seed);
        const CanonicalForm cf = hosvd(t);
        for (int n = 1; n <= 3; ++n) {
            const Eigen::MatrixXcd m = unfold(cf.core, n).entries;
            const Eigen::MatrixXcd gram = m * m.adjoint();
            const Eigen::VectorXd s = cf.sigma.column(n);
            for (Eigen::Index j = 0; j < gram.rows(); ++j)
                for (Eigen::Index k = 0; k < gram.cols(); ++k) {
                    const double expect = (j == k) ? s(j) * s(j) : 0.0;
                    CHECK(std::abs(gram(j, k) - expect) < 1e-12);
                }
        }
    }
}

TEST_CASE("canonical form is consistent and invertible") {
    const StateTensor t = random_state({3, 2, 2}, 14);
    const CanonicalForm cf = hosvd(t);

    const StateTensor rebuilt = apply_local_unitaries(t, cf.mode_unitaries);
    CHECK((rebuilt.amplitudes() - cf.core.amplitudes()).cwiseAbs().maxCoeff() < 1e-13);

    const StateTensor back = apply_local_unitaries(cf.core, cf.mode_unitaries.adjoint());
    CHECK((back.amplitudes() - t.amplitudes()).cwiseAbs().maxCoeff() < 1e-13);

    // Columns descending; each column's squared sum is the squared norm.
    for (int n = 1; n <= 3; ++n) {
        const Eigen::VectorXd s = cf.sigma.column(n);
        for (Eigen::Index i = 1; i < s.size(); ++i)
            CHECK(s(i) <= s(i - 1) + 1e-14);
        CHECK(s.squaredNorm() == doctest::Approx(t.norm() * t.norm()).epsilon(1e-12));
    }

    const SingularValueMatrix recomputed = singular_value_matrix(cf);
    for (int n = 1; n <= 3; ++n)
        CHECK((recomputed.column(n) - cf.sigma.column(n)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("singular values are invariant under local unitaries") {
    const StateTensor t = random_state({2, 2, 3}, 23);
    const LocalUnitarySet u({random_unitary(2, 71), random_unitary(2, 72),
                             random_unitary(3, 73)});
    const CanonicalForm a = hosvd(t);
    const CanonicalForm b = hosvd(apply_local_unitaries(t, u));
    for (int n = 1; n <= 3; ++n)
        CHECK((a.sigma.column(n) - b.sigma.column(n)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("hosvd is deterministic") {
    const StateTensor t = random_state({2, 2, 2}, 77);
    const CanonicalForm a = hosvd(t);
    const CanonicalForm b = hosvd(t);
    CHECK((a.core.amplitudes() - b.core.amplitudes()).cwiseAbs().maxCoeff() == 0.0);
    for (int n = 1; n <= 3; ++n)
        CHECK((a.mode_unitaries.matrix(n) - b.mode_unitaries.matrix(n)).cwiseAbs().maxCoeff() ==
              0.0);
}

TEST_CASE("tall unfoldings pad singular values with zeros") {
    const StateTensor t = random_state({4, 2}, 3);
    auto [u, s] = mode_singular_values(t, 1);
    REQUIRE(s.size() == 4);
    CHECK(s(0) > 0.0);
    CHECK(s(2) == 0.0);
    CHECK(s(3) == 0.0);
    CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("degeneracy clustering: exact, chained, and separated values") {
    SingularValueMatrix sv;
    sv.columns.push_back((Eigen::VectorXd(3) << 1.0, 1.0 - 5e-7, 1.0 - 1e-6).finished());
    sv.columns.push_back((Eigen::VectorXd(2) << 1.0, 0.5).finished());
    sv.columns.push_back((Eigen::VectorXd(2) << 0.9, 0.0).finished());

    const DegeneracyStructure ds = degeneracy_structure(sv, 1e-6);
    REQUIRE(ds.blocks(1).size() == 1);  // adjacent gaps chain into one block
    CHECK(ds.blocks(1)[0].size == 3);
    REQUIRE(ds.blocks(2).size() == 2);
    CHECK(ds.blocks(2)[0].size == 1);
    CHECK(ds.blocks(2)[1].size == 1);
    REQUIRE(ds.blocks(3).size() == 2);

    CHECK_FALSE(ds.fully_non_degenerate());
    CHECK_FALSE(ds.fully_degenerate());

    CHECK(ds.block_of(1, 0) == 0);
    CHECK(ds.block_of(1, 2) == 0);
    CHECK(ds.block_of(2, 1) == 1);
    CHECK(ds.block_start(2, 1) == 1);
    CHECK_THROWS_AS(ds.block_of(2, 2), ModeOutOfRange);

    SingularValueMatrix rising;
    rising.columns.push_back((Eigen::VectorXd(2) << 0.1, 0.9).finished());
    CHECK_THROWS_AS(degeneracy_structure(rising, 1e-6), NotSorted);
}

TEST_CASE("degeneracy structure of familiar states") {
    const DegeneracyStructure g = degeneracy_structure(hosvd(ghz3()).sigma);
    CHECK(g.fully_degenerate());
    for (int n = 1; n <= 3; ++n) {
        REQUIRE(g.blocks(n).size() == 1);
        CHECK(g.blocks(n)[0].size == 2);
        CHECK(g.blocks(n)[0].value == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    }

    // Bell pair on parties 1,2 with a spectator third qubit: modes 1 and 2
    // degenerate, mode 3 split into singular values 1 and 0.
    const double a = 1.0 / std::sqrt(2.0);
    const StateTensor bell0 = from_reals({2, 2, 2}, {a, 0, 0, 0, 0, 0, a, 0});
    const DegeneracyStructure p = degeneracy_structure(hosvd(bell0).sigma);
    CHECK(p.blocks(1).size() == 1);
    CHECK(p.blocks(2).size() == 1);
    REQUIRE(p.blocks(3).size() == 2);
    CHECK(p.blocks(3)[0].value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.blocks(3)[1].value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_FALSE(p.fully_degenerate());
    CHECK_FALSE(p.fully_non_degenerate());

    const DegeneracyStructure r =
        degeneracy_structure(hosvd(random_state({2, 2, 2}, 101)).sigma);
    CHECK(r.fully_non_degenerate());

    CHECK(g.same_shape(g));
    CHECK_FALSE(g.same_shape(p));
}
