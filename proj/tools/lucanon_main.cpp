// Command-line front end: state file I/O, canonicalization, comparison,
// purification, seeded generation, and machine-readable verdict reports.
//
// Exit codes: 0 success (compare: Equivalent), 1 compare: Inequivalent,
// 2 any error (I/O, parse, invariant violation, bad arguments),
// 3 compare: Undecided.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <typeinfo>
#include <vector>

#include <CLI11.hpp>
#include <cxxabi.h>

#include "lucanon/linearization.hpp"
#include "lucanon/state_io.hpp"

namespace {

using namespace lucanon;

std::string error_name(const std::exception& e) {
    int status = 0;
    std::unique_ptr<char, void (*)(void*)> demangled(
        abi::__cxa_demangle(typeid(e).name(), nullptr, nullptr, &status), std::free);
    std::string name = (status == 0 && demangled) ? demangled.get() : typeid(e).name();
    const std::string ns = "lucanon::";
    if (name.rfind(ns, 0) == 0)
        name.erase(0, ns.size());
    return name;
}

std::string six_digits(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

void print_sigma(const SingularValueMatrix& sigma) {
    for (int n = 1; n <= sigma.modes(); ++n) {
        std::cout << "sigma[mode " << n << "] =";
        const Eigen::VectorXd& col = sigma.column(n);
        for (Eigen::Index i = 0; i < col.size(); ++i)
            std::cout << ' ' << six_digits(col(i));
        std::cout << '\n';
    }
}

Json canonical_pure_document(const CanonicalForm& cf) {
    Json doc = pure_to_json(cf.core);
    Json sig = Json::array();
    for (const auto& col : cf.sigma.columns) {
        Json c = Json::array();
        for (Eigen::Index i = 0; i < col.size(); ++i)
            c.push_back(col(i));
        sig.push_back(std::move(c));
    }
    doc["sigma"] = std::move(sig);
    Json mats = Json::array();
    for (const auto& m : cf.mode_unitaries.matrices())
        mats.push_back(matrix_to_json(m));
    doc["mode_unitaries"] = std::move(mats);
    return doc;
}

LocalUnitarySet seeded_rotation(const std::vector<int>& dims, std::uint64_t seed) {
    std::vector<Eigen::MatrixXcd> mats;
    mats.reserve(dims.size());
    for (std::size_t n = 0; n < dims.size(); ++n)
        mats.push_back(random_unitary(dims[n], seed * 1009 + n));
    return LocalUnitarySet(std::move(mats));
}

Eigen::MatrixXcd kron_all(const std::vector<Eigen::MatrixXcd>& mats) {
    Eigen::MatrixXcd full = Eigen::MatrixXcd::Ones(1, 1);
    for (const auto& m : mats) {
        Eigen::MatrixXcd next(full.rows() * m.rows(), full.cols() * m.cols());
        for (Eigen::Index r = 0; r < full.rows(); ++r)
            for (Eigen::Index c = 0; c < full.cols(); ++c)
                next.block(r * m.rows(), c * m.cols(), m.rows(), m.cols()) = full(r, c) * m;
        full = std::move(next);
    }
    return full;
}

struct CompareFlags {
    double tol = 1e-9;
    double deg_tol = 1e-6;
    std::uint64_t seed = 0;
    long long budget = 2000;
    int restarts = 64;
    std::string mode = "auto";
    int segment_vec_mode = 0;
};

CompareOptions to_options(const CompareFlags& f, double norm_scale) {
    CompareOptions opts;
    opts.tol = f.tol;
    opts.cluster_tol = f.deg_tol * std::max(1.0, norm_scale);
    opts.seed = f.seed;
    opts.iterations = static_cast<int>(std::min<long long>(f.budget, 1000000));
    opts.restarts = f.restarts;
    opts.mode = mode_from_string(f.mode);
    opts.segment_vec_mode = f.segment_vec_mode;
    return opts;
}

// Segments are reported whenever the comparison went down the degenerate
// branch, so --segment-vec-mode has visible output to act on.
void attach_segments(VerdictReport& report, const StateTensor& a, const StateTensor& b,
                     const CompareOptions& opts) {
    if (a.dims() != b.dims())
        return;
    const CanonicalForm ca = hosvd(a);
    const CanonicalForm cb = hosvd(b);
    const DegeneracyStructure dsa = degeneracy_structure(ca.sigma, opts.cluster_tol);
    const DegeneracyStructure dsb = degeneracy_structure(cb.sigma, opts.cluster_tol);
    if (!dsa.same_shape(dsb) || dsa.fully_non_degenerate())
        return;
    report.segment_vec_mode = (opts.segment_vec_mode == 0) ? a.order() : opts.segment_vec_mode;
    report.segments_a = segment_decompose(ca, dsa, opts.segment_vec_mode);
    report.segments_b = segment_decompose(cb, dsa, opts.segment_vec_mode);
}

int run_canon(const std::string& input, std::string output) {
    const StateFile sf = load_state(input);
    if (output.empty())
        output = input + ".canon.json";
    if (sf.pure) {
        const CanonicalForm cf = hosvd(*sf.pure);
        save_json(output, canonical_pure_document(cf));
        print_sigma(cf.sigma);
    } else {
        const MixedCanonical mc = canonical_mixed(*sf.mixed);
        Json doc = mixed_to_json(mc.upsilon);
        doc["psi0"] = canonical_pure_document(mc.cf0);
        save_json(output, doc);
        print_sigma(mc.cf0.sigma);
    }
    std::cout << "wrote " << output << '\n';
    return 0;
}

int run_compare(const std::string& path_a, const std::string& path_b, const CompareFlags& flags) {
    const StateFile fa = load_state(path_a);
    const StateFile fb = load_state(path_b);
    if (fa.kind != fb.kind)
        throw ParseError("cannot compare a " + fa.kind + " state with a " + fb.kind + " state");

    const auto start = std::chrono::steady_clock::now();
    Verdict verdict;
    VerdictReport report;
    if (fa.pure) {
        const StateTensor& a = *fa.pure;
        const StateTensor& b = *fb.pure;
        const CompareOptions opts = to_options(flags, std::max(a.norm(), b.norm()));
        verdict = compare_pure(a, b, opts);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report = make_report(verdict, hosvd(a).sigma, hosvd(b).sigma, opts, seconds);
        attach_segments(report, a, b, opts);
    } else {
        const DensityMatrix& a = *fa.mixed;
        const DensityMatrix& b = *fb.mixed;
        const Purification pa = purify(a);
        const Purification pb = purify(b);
        const CompareOptions opts = to_options(flags, 1.0);
        verdict = compare_mixed(a, b, opts);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report = make_report(verdict, hosvd(pa.psi0).sigma, hosvd(pb.psi0).sigma, opts, seconds);
        attach_segments(report, pa.psi0, pb.psi0, opts);
    }

    std::cout << to_json(report).dump(1) << '\n';
    switch (verdict.outcome) {
    case Outcome::Equivalent: return 0;
    case Outcome::Inequivalent: return 1;
    case Outcome::Undecided: return 3;
    }
    return 3;
}

int run_purify(const std::string& input, std::string output) {
    const StateFile sf = load_state(input);
    if (!sf.mixed)
        throw ParseError("purify expects a mixed state file");
    const Purification p = purify(*sf.mixed);
    if (output.empty())
        output = input + ".psi0.json";
    Json doc = pure_to_json(p.psi0);
    Json w = Json::array();
    for (Eigen::Index i = 0; i < p.weights.size(); ++i)
        w.push_back(p.weights(i));
    doc["weights"] = std::move(w);
    save_json(output, doc);
    std::cout << "eigenvalues =";
    for (Eigen::Index i = 0; i < p.weights.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", p.weights(i));
        std::cout << ' ' << buf;
    }
    std::cout << "\nwrote " << output << '\n';
    return 0;
}

int run_trace0(const std::string& input, std::string output) {
    const StateFile sf = load_state(input);
    if (!sf.pure)
        throw ParseError("trace0 expects a pure state file of dims (r, I1, ..., IN)");
    const DensityMatrix rho = partial_trace_0(*sf.pure);
    if (output.empty())
        output = input + ".rho.json";
    save_json(output, mixed_to_json(rho));
    std::cout << "wrote " << output << '\n';
    return 0;
}

int run_random(const std::vector<int>& dims, std::uint64_t seed, std::string output) {
    const StateTensor t = random_state(dims, seed);
    if (output.empty())
        output = "random.json";
    save_json(output, pure_to_json(t));
    std::cout << "wrote " << output << '\n';
    return 0;
}

int run_rotate(const std::string& input, std::uint64_t seed, std::string output) {
    const StateFile sf = load_state(input);
    if (output.empty())
        output = input + ".rot.json";
    const std::vector<int> dims = sf.pure ? sf.pure->dims() : sf.mixed->dims();
    const LocalUnitarySet u = seeded_rotation(dims, seed);

    if (sf.pure) {
        save_json(output, pure_to_json(apply_local_unitaries(*sf.pure, u)));
    } else {
        const Eigen::MatrixXcd v = kron_all(u.matrices());
        const Eigen::MatrixXcd rotated = v * sf.mixed->matrix() * v.adjoint();
        save_json(output, mixed_to_json(DensityMatrix::unchecked(dims, rotated)));
    }

    Json sidecar;
    sidecar["seed"] = seed;
    Json mats = Json::array();
    for (const auto& m : u.matrices())
        mats.push_back(matrix_to_json(m));
    sidecar["unitaries"] = std::move(mats);
    const std::string sidecar_path = output + ".unitaries.json";
    save_json(sidecar_path, sidecar);
    std::cout << "wrote " << output << " and " << sidecar_path << '\n';
    return 0;
}

int run_count(const std::vector<int>& dims, int degree) {
    const ProductCount pc = count_products(dims, degree);
    Json doc;
    doc["dims"] = dims;
    doc["degree"] = degree;
    doc["total"] = pc.total;
    doc["independent"] = pc.independent;
    std::cout << doc.dump(1) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"canonical forms and local-unitary equivalence for multipartite states"};
    app.require_subcommand(1);

    std::string input, input_b, output;
    std::vector<int> dims;
    std::uint64_t seed = 0;
    int degree = 2;
    CompareFlags flags;

    CLI::App* canon = app.add_subcommand("canon", "write the canonical form, print sigma");
    canon->add_option("input", input, "state file")->required();
    canon->add_option("-o,--output", output, "output path (default: <input>.canon.json)");

    CLI::App* compare = app.add_subcommand("compare", "decide local-unitary equivalence");
    compare->add_option("a", input, "first state file")->required();
    compare->add_option("b", input_b, "second state file")->required();
    compare->add_option("--tol", flags.tol, "residual tolerance");
    compare->add_option("--deg-tol", flags.deg_tol, "degeneracy clustering tolerance (relative)");
    compare->add_option("--seed", flags.seed, "search seed");
    compare->add_option("--budget", flags.budget, "search iterations per restart");
    compare->add_option("--restarts", flags.restarts, "search restarts");
    compare->add_option("--mode", flags.mode, "auto|phase|certificates|search");
    compare->add_option("--segment-vec-mode", flags.segment_vec_mode,
                        "vectorization mode for reported segments (default: last)");

    CLI::App* purify_cmd = app.add_subcommand("purify", "write the purification of a mixed state");
    purify_cmd->add_option("input", input, "mixed state file")->required();
    purify_cmd->add_option("-o,--output", output, "output path (default: <input>.psi0.json)");

    CLI::App* trace0 = app.add_subcommand("trace0", "trace out the first party of a pure state");
    trace0->add_option("input", input, "pure state file")->required();
    trace0->add_option("-o,--output", output, "output path (default: <input>.rho.json)");

    CLI::App* random_cmd = app.add_subcommand("random", "write a seeded random pure state");
    random_cmd->add_option("--dims", dims, "party dimensions, e.g. 2,2,2")
        ->required()
        ->delimiter(',');
    random_cmd->add_option("--seed", seed, "generator seed");
    random_cmd->add_option("-o,--output", output, "output path (default: random.json)");

    CLI::App* rotate = app.add_subcommand("rotate", "apply seeded random local unitaries");
    rotate->add_option("input", input, "state file")->required();
    rotate->add_option("--seed", seed, "generator seed");
    rotate->add_option("-o,--output", output, "output path (default: <input>.rot.json)");

    CLI::App* count = app.add_subcommand("count", "count degree-m monomial products");
    count->add_option("--dims", dims, "party dimensions, e.g. 2,2,2")->required()->delimiter(',');
    count->add_option("-m,--degree", degree, "product degree (default 2)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (canon->parsed())
            return run_canon(input, output);
        if (compare->parsed())
            return run_compare(input, input_b, flags);
        if (purify_cmd->parsed())
            return run_purify(input, output);
        if (trace0->parsed())
            return run_trace0(input, output);
        if (random_cmd->parsed())
            return run_random(dims, seed, output);
        if (rotate->parsed())
            return run_rotate(input, seed, output);
        if (count->parsed())
            return run_count(dims, degree);
    } catch (const lucanon::Error& e) {
        std::cerr << error_name(e) << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
