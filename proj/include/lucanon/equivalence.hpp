#pragma once

// Local-unitary equivalence decisions for pure states.
//
// Two states are compared through their canonical forms. Mismatched
// singular values or degeneracy shapes settle the question immediately.
// On the fully non-degenerate stratum the residual freedom is diagonal
// phases and a linear phase solver decides completely. With degeneracy the
// remaining freedom is a block symmetry group; segment Gram moduli and
// marginal spectra give sound inequivalence certificates, and a seeded
// alternating search looks for an explicit witness. A failed search is
// never evidence: the verdict is then Undecided, with diagnostics.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "lucanon/decomposition.hpp"

namespace lucanon {

enum class Outcome { Equivalent, Inequivalent, Undecided };

enum class Certificate {
    SigmaMismatch,
    DegeneracyMismatch,
    MarginalSpectra,
    SegmentNorm,
    GramModulus,
    PhaseInconsistent,
    MagnitudeMismatch,
};

std::string to_string(Outcome o);
std::string to_string(Certificate c);

/// Proposed per-party unitaries mapping state A to state B. The set is not
/// unitarity-checked at construction, so candidate witnesses (including
/// deliberately broken ones in tests) are representable; verify_witness is
/// the gate that decides whether one is acceptable.
struct Witness {
    LocalUnitarySet unitaries;
    double residual = std::numeric_limits<double>::quiet_NaN();
};

struct Diagnostics {
    int restarts_used = 0;
    long long iterations_used = 0;
    double best_residual = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::string> notes;
};

struct Verdict {
    Outcome outcome = Outcome::Undecided;
    std::optional<Witness> witness;        // present iff Equivalent
    std::optional<Certificate> certificate;  // present iff Inequivalent
    std::string detail;
    Diagnostics diagnostics;
};

/// A sub-vector of the vectorized core conformal to one diagonal block of
/// the symmetry group, tagged by the 1-based block index per mode.
struct Segment {
    std::vector<int> block;
    Eigen::VectorXcd values;
};

/// An inequivalence certificate with a human-readable reason.
struct Evidence {
    Certificate kind = Certificate::SigmaMismatch;
    std::string detail;
};

struct CompareOptions {
    double tol = 1e-9;          // phase floor / witness verification scale
    double cluster_tol = 1e-6;  // degeneracy clustering
    double cert_tol = 1e-8;     // certificate comparisons (relative)
    double accept_residual = 1e-8;  // relative residual accepted as a witness
    std::uint64_t seed = 0;
    int restarts = 64;
    int iterations = 2000;
    int marginal_subset_max = 2;
    int segment_vec_mode = 0;   // 1-based; 0 means the last mode

    enum class Mode { Auto, Phase, Certificates, Search } mode = Mode::Auto;
};

/// Splits the core, vectorized along vec_mode (1-based; 0 means the last
/// mode), into segments conformal to the degeneracy blocks. Segments are
/// enumerated lexicographically over block tuples in the cyclic mode order
/// (vec_mode+1, ..., vec_mode), first listed slowest; entries within a
/// segment follow the same order. Their concatenation is a permutation of
/// vectorize(unfold(core, vec_mode)).
std::vector<Segment> segment_decompose(const CanonicalForm& cf, const DegeneracyStructure& ds,
                                       int vec_mode = 0);

/// Complete decision for fully non-degenerate canonical forms: entrywise
/// core magnitudes must match, and the per-entry phase differences must be
/// explained by per-mode diagonal phases. Solved exactly over the integers
/// modulo 2pi; any returned witness is core-level (diagonal matrices) and
/// already verified. Throws DegenerateInput when a mode has a repeated
/// singular value (within cluster_tol).
Verdict phase_equivalence(const CanonicalForm& a, const CanonicalForm& b, double tol = 1e-9,
                          double cluster_tol = 1e-6);

/// Compares segment norms and the moduli of inner products between
/// comparable segments (those whose block indices agree on every mode with
/// a block of size > 1). Both quantities are invariant under the residual
/// symmetry group, so a mismatch certifies inequivalence. Segments must
/// come from cores with the same degeneracy shape (StructureMismatch).
std::optional<Evidence> gram_certificate(const std::vector<Segment>& a,
                                         const std::vector<Segment>& b,
                                         const DegeneracyStructure& ds, double tol = 1e-8);

/// Compares sorted spectra of all reduced density matrices on party
/// subsets of size 1..max_subset (capped at N-1). Spectra are LU
/// invariants beyond the per-mode singular values.
std::optional<Evidence> marginal_spectra_certificate(const StateTensor& a, const StateTensor& b,
                                                     double tol = 1e-8, int max_subset = 2);

struct SearchResult {
    std::optional<Witness> witness;  // core-level, verified by the caller
    Diagnostics diagnostics;
};

/// Seeded alternating search for a block-diagonal symmetry-group element S
/// with S a.core = b.core. Restart 0 starts from identity blocks, later
/// restarts from Haar blocks; each sweep applies the optimal per-block
/// polar update mode by mode, so the residual never increases. Success
/// means relative residual <= opts.accept_residual. Deterministic in opts.
SearchResult witness_search(const CanonicalForm& a, const CanonicalForm& b,
                            const DegeneracyStructure& ds, const CompareOptions& opts = {});

/// True iff w.unitaries is unitary within 1e-8 and maps a to b with
/// relative residual <= tol. Shape mismatches throw; a bad witness that is
/// merely wrong (not mis-shaped) returns false.
bool verify_witness(const StateTensor& a, const StateTensor& b, const Witness& w, double tol);

/// Full decision pipeline. Witnesses in the returned verdict map a to b
/// directly (mode unitaries composed in) and were verified before the
/// Equivalent outcome was produced.
Verdict compare_pure(const StateTensor& a, const StateTensor& b, const CompareOptions& opts = {});

} // namespace lucanon
