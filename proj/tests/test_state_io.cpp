#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <string>

#include "lucanon/state_io.hpp"

using namespace lucanon;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) {
        path = (std::filesystem::temp_directory_path() /
                ("lucanon-io-" + std::to_string(::getpid()) + "-" + name))
                   .string();
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("complex and matrix values survive the json round trip bit-exactly") {
    const Complex z{0.1234567890123456789, -3.9e-17};
    CHECK(complex_from_json(complex_to_json(z)) == z);

    const Eigen::MatrixXcd m = random_unitary(3, 99);
    const Eigen::MatrixXcd back = matrix_from_json(matrix_to_json(m));
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(complex_from_json(Json::array({1.0})), ParseError);
    CHECK_THROWS_AS(matrix_from_json(Json::array()), ParseError);
}

TEST_CASE("pure state files round trip through disk") {
    const StateTensor t = random_state({2, 3, 2}, 4);
    TempFile f("pure.json");
    save_json(f.path, pure_to_json(t));

    const StateFile sf = load_state(f.path);
    REQUIRE(sf.kind == "pure");
    REQUIRE(sf.pure.has_value());
    CHECK(sf.pure->dims() == t.dims());
    CHECK((sf.pure->amplitudes() - t.amplitudes()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("mixed state files round trip and enforce the invariants") {
    std::vector<int> full{2, 2, 2};
    const DensityMatrix rho = partial_trace_0(random_state(full, 8));
    const DensityMatrix checked = new_density_matrix(rho.dims(), rho.matrix());

    TempFile f("mixed.json");
    save_json(f.path, mixed_to_json(checked));
    const StateFile sf = load_state(f.path);
    REQUIRE(sf.kind == "mixed");
    CHECK((sf.mixed->matrix() - rho.matrix()).cwiseAbs().maxCoeff() == 0.0);

    // A scaled matrix parses structurally but fails the trace invariant.
    Json bad = mixed_to_json(checked);
    bad["matrix"][0][0] = bad["matrix"][0][0].get<double>() + 0.5;
    CHECK_THROWS_AS(state_from_json(bad), NotTraceOne);
}

TEST_CASE("parser names structural problems precisely") {
    Json doc = pure_to_json(random_state({2, 2}, 1));

    Json no_kind = doc;
    no_kind.erase("kind");
    CHECK_THROWS_AS(state_from_json(no_kind), ParseError);

    Json bad_kind = doc;
    bad_kind["kind"] = "classical";
    CHECK_THROWS_AS(state_from_json(bad_kind), ParseError);

    Json bad_dims = doc;
    bad_dims["dims"] = Json::array();
    CHECK_THROWS_AS(state_from_json(bad_dims), ParseError);

    Json truncated = doc;
    truncated["amplitudes"].erase(3);
    CHECK_THROWS_AS(state_from_json(truncated), LengthMismatch);

    CHECK_THROWS_AS(load_json("/nonexistent/path.json"), ParseError);

    TempFile f("garbage.json");
    save_json(f.path, doc);
    {
        std::FILE* out = std::fopen(f.path.c_str(), "w");
        std::fputs("{not json", out);
        std::fclose(out);
    }
    CHECK_THROWS_AS(load_json(f.path), ParseError);
}

TEST_CASE("extra fields in enriched documents are ignored on load") {
    const StateTensor t = random_state({2, 2}, 11);
    Json doc = pure_to_json(t);
    doc["sigma"] = Json::array({Json::array({1.0, 0.5})});
    doc["mode_unitaries"] = Json::array();

    const StateFile sf = state_from_json(doc);
    REQUIRE(sf.pure.has_value());
    CHECK((sf.pure->amplitudes() - t.amplitudes()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("verdict reports round trip losslessly") {
    // A realistic equivalent verdict with a witness.
    const StateTensor a = random_state({2, 2, 2}, 3);
    const LocalUnitarySet u = LocalUnitarySet::checked(
        {random_unitary(2, 31), random_unitary(2, 32), random_unitary(2, 33)});
    const StateTensor b = apply_local_unitaries(a, u);
    CompareOptions opts;
    opts.seed = 5;
    const Verdict v = compare_pure(a, b, opts);
    REQUIRE(v.outcome == Outcome::Equivalent);

    VerdictReport r = make_report(v, hosvd(a).sigma, hosvd(b).sigma, opts, 0.125);
    const Json j1 = to_json(r);
    const Json j2 = to_json(report_from_json(j1));
    CHECK(j1 == j2);

    // An inequivalent verdict with a certificate, no witness, NaN fields,
    // and segments attached.
    const Verdict vi = compare_pure(random_state({2, 2}, 1), random_state({2, 2}, 2));
    REQUIRE(vi.outcome == Outcome::Inequivalent);
    VerdictReport ri = make_report(vi, hosvd(random_state({2, 2}, 1)).sigma,
                                   hosvd(random_state({2, 2}, 2)).sigma, CompareOptions{}, 0.5);
    const CanonicalForm cg = hosvd(random_state({2, 2, 2}, 9));
    const DegeneracyStructure all_one{{{{2, 0.7}}, {{2, 0.7}}, {{2, 0.7}}}};
    ri.segment_vec_mode = 3;
    ri.segments_a = segment_decompose(cg, all_one, 3);
    ri.segments_b = ri.segments_a;
    const Json k1 = to_json(ri);
    const Json k2 = to_json(report_from_json(k1));
    CHECK(k1 == k2);

    const VerdictReport back = report_from_json(k1);
    CHECK(back.certificate == "SigmaMismatch");
    CHECK(std::isnan(back.witness_residual));
    CHECK(back.segments_a.size() == 1);
    CHECK(back.segments_a[0].values.size() == 8);
}

TEST_CASE("mode names map both ways") {
    for (auto m : {CompareOptions::Mode::Auto, CompareOptions::Mode::Phase,
                   CompareOptions::Mode::Certificates, CompareOptions::Mode::Search})
        CHECK(mode_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(mode_from_string("guess"), ParseError);
}
