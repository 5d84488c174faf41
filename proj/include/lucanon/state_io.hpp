#pragma once

// JSON state files and verdict reports. Complex numbers are stored as
// [re, im] pairs; numbers round-trip bit-exactly through nlohmann's
// shortest-representation printing. Module invariants are enforced while
// loading: a document that parses but violates them throws the same error
// the library constructor would.

#include <optional>
#include <string>

#include <json.hpp>

#include "lucanon/mixed_state.hpp"

namespace lucanon {

using Json = nlohmann::json;

/// A parsed state document: kind "pure" (amplitudes, i1 slowest) or
/// "mixed" (row-major density matrix over the same basis order).
struct StateFile {
    std::string kind;
    std::optional<StateTensor> pure;
    std::optional<DensityMatrix> mixed;
};

Json complex_to_json(const Complex& z);
Complex complex_from_json(const Json& j);

Json matrix_to_json(const Eigen::MatrixXcd& m);  // rows of [re, im] pairs
Eigen::MatrixXcd matrix_from_json(const Json& j);

Json pure_to_json(const StateTensor& t);
Json mixed_to_json(const DensityMatrix& rho);

/// Reads either kind back; extra document fields are ignored, so enriched
/// canonical-form files load as plain states. Throws ParseError on
/// structural problems and the module errors on invariant violations.
StateFile state_from_json(const Json& doc);

Json load_json(const std::string& path);               // ParseError on failure
void save_json(const std::string& path, const Json& doc);
StateFile load_state(const std::string& path);

/// Machine-readable outcome of one comparison. Everything needed to
/// reproduce the run is recorded; segments appear when the degenerate
/// branch ran, tagged with the vectorization mode that shaped them.
struct VerdictReport {
    std::string outcome;
    std::string certificate;  // empty when none
    std::string detail;

    std::vector<Eigen::MatrixXcd> witness;  // empty when none
    double witness_residual = std::numeric_limits<double>::quiet_NaN();

    std::vector<Eigen::VectorXd> sigma_a;
    std::vector<Eigen::VectorXd> sigma_b;

    int segment_vec_mode = 0;  // meaningful only when segments are present
    std::vector<Segment> segments_a;
    std::vector<Segment> segments_b;

    double tol = 0.0;
    double cluster_tol = 0.0;
    double cert_tol = 0.0;
    double accept_residual = 0.0;
    std::uint64_t seed = 0;
    int restarts = 0;
    long long iterations = 0;
    std::string mode;

    int restarts_used = 0;
    long long iterations_used = 0;
    double best_residual = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::string> notes;

    double duration_seconds = 0.0;
};

Json to_json(const VerdictReport& r);
VerdictReport report_from_json(const Json& doc);

/// Assembles a report from a verdict and the run context. Sigma tables
/// and segments are supplied by the caller, which knows what it compared.
VerdictReport make_report(const Verdict& v, const SingularValueMatrix& sigma_a,
                          const SingularValueMatrix& sigma_b, const CompareOptions& opts,
                          double duration_seconds);

std::string to_string(CompareOptions::Mode m);
CompareOptions::Mode mode_from_string(const std::string& s);

} // namespace lucanon
