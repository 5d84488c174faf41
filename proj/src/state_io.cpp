#include "lucanon/state_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "lucanon/errors.hpp"

namespace lucanon {

namespace {

// NaN has no JSON literal; absent values travel as null.
Json finite_or_null(double x) {
    if (std::isfinite(x))
        return x;
    return nullptr;
}

double number_or_nan(const Json& j) {
    if (j.is_null())
        return std::numeric_limits<double>::quiet_NaN();
    if (!j.is_number())
        throw ParseError("expected a number or null");
    return j.get<double>();
}

const Json& field(const Json& doc, const char* name) {
    const auto it = doc.find(name);
    if (it == doc.end())
        throw ParseError(std::string("missing field \"") + name + "\"");
    return *it;
}

std::vector<int> dims_from_json(const Json& j) {
    if (!j.is_array() || j.empty())
        throw ParseError("\"dims\" must be a non-empty array of integers");
    std::vector<int> dims;
    dims.reserve(j.size());
    for (const auto& d : j) {
        if (!d.is_number_integer())
            throw ParseError("\"dims\" must be a non-empty array of integers");
        dims.push_back(d.get<int>());
    }
    return dims;
}

Eigen::VectorXcd amplitudes_from_json(const Json& j, const char* name) {
    if (!j.is_array())
        throw ParseError(std::string("\"") + name + "\" must be an array of [re, im] pairs");
    Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k)
        v(static_cast<Eigen::Index>(k)) = complex_from_json(j[k]);
    return v;
}

Json amplitudes_to_json(const Eigen::VectorXcd& v) {
    Json arr = Json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k)
        arr.push_back(complex_to_json(v(k)));
    return arr;
}

Json real_vector_to_json(const Eigen::VectorXd& v) {
    Json arr = Json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k)
        arr.push_back(v(k));
    return arr;
}

Eigen::VectorXd real_vector_from_json(const Json& j) {
    if (!j.is_array())
        throw ParseError("expected an array of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_number())
            throw ParseError("expected an array of numbers");
        v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
    }
    return v;
}

Json segments_to_json(const std::vector<Segment>& segs) {
    Json arr = Json::array();
    for (const auto& s : segs) {
        Json one;
        one["block"] = s.block;
        one["values"] = amplitudes_to_json(s.values);
        arr.push_back(std::move(one));
    }
    return arr;
}

std::vector<Segment> segments_from_json(const Json& j) {
    if (!j.is_array())
        throw ParseError("\"segments\" entries must be an array");
    std::vector<Segment> out;
    out.reserve(j.size());
    for (const auto& one : j) {
        Segment s;
        s.block = field(one, "block").get<std::vector<int>>();
        s.values = amplitudes_from_json(field(one, "values"), "values");
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace

Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError("complex entries must be [re, im] number pairs");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

Json matrix_to_json(const Eigen::MatrixXcd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(complex_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXcd matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw ParseError("matrices must be arrays of rows of [re, im] pairs");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw ParseError("matrix rows must all have the same length");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                complex_from_json(j[r][c]);
    }
    return m;
}

Json pure_to_json(const StateTensor& t) {
    Json doc;
    doc["kind"] = "pure";
    doc["dims"] = t.dims();
    doc["amplitudes"] = amplitudes_to_json(t.amplitudes());
    return doc;
}

Json mixed_to_json(const DensityMatrix& rho) {
    Json doc;
    doc["kind"] = "mixed";
    doc["dims"] = rho.dims();
    Json flat = Json::array();
    const Eigen::MatrixXcd& m = rho.matrix();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            flat.push_back(complex_to_json(m(r, c)));
    doc["matrix"] = std::move(flat);
    return doc;
}

StateFile state_from_json(const Json& doc) {
    if (!doc.is_object())
        throw ParseError("state document must be a JSON object");
    const Json& kind = field(doc, "kind");
    if (!kind.is_string())
        throw ParseError("\"kind\" must be \"pure\" or \"mixed\"");
    const std::vector<int> dims = dims_from_json(field(doc, "dims"));

    StateFile out;
    out.kind = kind.get<std::string>();
    if (out.kind == "pure") {
        out.pure = StateTensor(dims, amplitudes_from_json(field(doc, "amplitudes"), "amplitudes"));
    } else if (out.kind == "mixed") {
        const Eigen::VectorXcd flat = amplitudes_from_json(field(doc, "matrix"), "matrix");
        std::int64_t d = 1;
        for (int i : dims)
            d *= std::max(i, 0);
        if (flat.size() != d * d)
            throw LengthMismatch("\"matrix\" has " + std::to_string(flat.size()) +
                                 " entries, dims require " + std::to_string(d * d));
        Eigen::MatrixXcd m(d, d);
        for (std::int64_t r = 0; r < d; ++r)
            for (std::int64_t c = 0; c < d; ++c)
                m(r, c) = flat(r * d + c);
        out.mixed = new_density_matrix(dims, std::move(m));
    } else {
        throw ParseError("unknown state kind \"" + out.kind + "\"");
    }
    return out;
}

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path + " for reading");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void save_json(const std::string& path, const Json& doc) {
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot open " + path + " for writing");
    out << doc.dump(1) << '\n';
    if (!out)
        throw ParseError("failed while writing " + path);
}

StateFile load_state(const std::string& path) { return state_from_json(load_json(path)); }

Json to_json(const VerdictReport& r) {
    Json doc;
    doc["outcome"] = r.outcome;
    doc["certificate"] = r.certificate.empty() ? Json(nullptr) : Json(r.certificate);
    doc["detail"] = r.detail;

    if (r.witness.empty()) {
        doc["witness"] = nullptr;
    } else {
        Json mats = Json::array();
        for (const auto& m : r.witness)
            mats.push_back(matrix_to_json(m));
        doc["witness"] = std::move(mats);
    }
    doc["witness_residual"] = finite_or_null(r.witness_residual);

    Json sig;
    Json sa = Json::array(), sb = Json::array();
    for (const auto& col : r.sigma_a)
        sa.push_back(real_vector_to_json(col));
    for (const auto& col : r.sigma_b)
        sb.push_back(real_vector_to_json(col));
    sig["a"] = std::move(sa);
    sig["b"] = std::move(sb);
    doc["sigma"] = std::move(sig);

    if (r.segments_a.empty() && r.segments_b.empty()) {
        doc["segments"] = nullptr;
    } else {
        Json seg;
        seg["vec_mode"] = r.segment_vec_mode;
        seg["a"] = segments_to_json(r.segments_a);
        seg["b"] = segments_to_json(r.segments_b);
        doc["segments"] = std::move(seg);
    }

    Json opts;
    opts["tol"] = r.tol;
    opts["cluster_tol"] = r.cluster_tol;
    opts["cert_tol"] = r.cert_tol;
    opts["accept_residual"] = r.accept_residual;
    opts["seed"] = r.seed;
    opts["restarts"] = r.restarts;
    opts["iterations"] = r.iterations;
    opts["mode"] = r.mode;
    doc["options"] = std::move(opts);

    Json diag;
    diag["restarts_used"] = r.restarts_used;
    diag["iterations_used"] = r.iterations_used;
    diag["best_residual"] = finite_or_null(r.best_residual);
    diag["notes"] = r.notes;
    doc["diagnostics"] = std::move(diag);

    doc["duration_seconds"] = r.duration_seconds;
    return doc;
}

VerdictReport report_from_json(const Json& doc) {
    if (!doc.is_object())
        throw ParseError("verdict report must be a JSON object");
    VerdictReport r;
    r.outcome = field(doc, "outcome").get<std::string>();
    const Json& cert = field(doc, "certificate");
    r.certificate = cert.is_null() ? "" : cert.get<std::string>();
    r.detail = field(doc, "detail").get<std::string>();

    const Json& wit = field(doc, "witness");
    if (!wit.is_null()) {
        if (!wit.is_array())
            throw ParseError("\"witness\" must be null or an array of matrices");
        for (const auto& m : wit)
            r.witness.push_back(matrix_from_json(m));
    }
    r.witness_residual = number_or_nan(field(doc, "witness_residual"));

    const Json& sig = field(doc, "sigma");
    for (const auto& col : field(sig, "a"))
        r.sigma_a.push_back(real_vector_from_json(col));
    for (const auto& col : field(sig, "b"))
        r.sigma_b.push_back(real_vector_from_json(col));

    const Json& seg = field(doc, "segments");
    if (!seg.is_null()) {
        r.segment_vec_mode = field(seg, "vec_mode").get<int>();
        r.segments_a = segments_from_json(field(seg, "a"));
        r.segments_b = segments_from_json(field(seg, "b"));
    }

    const Json& opts = field(doc, "options");
    r.tol = field(opts, "tol").get<double>();
    r.cluster_tol = field(opts, "cluster_tol").get<double>();
    r.cert_tol = field(opts, "cert_tol").get<double>();
    r.accept_residual = field(opts, "accept_residual").get<double>();
    r.seed = field(opts, "seed").get<std::uint64_t>();
    r.restarts = field(opts, "restarts").get<int>();
    r.iterations = field(opts, "iterations").get<long long>();
    r.mode = field(opts, "mode").get<std::string>();

    const Json& diag = field(doc, "diagnostics");
    r.restarts_used = field(diag, "restarts_used").get<int>();
    r.iterations_used = field(diag, "iterations_used").get<long long>();
    r.best_residual = number_or_nan(field(diag, "best_residual"));
    r.notes = field(diag, "notes").get<std::vector<std::string>>();

    r.duration_seconds = field(doc, "duration_seconds").get<double>();
    return r;
}

VerdictReport make_report(const Verdict& v, const SingularValueMatrix& sigma_a,
                          const SingularValueMatrix& sigma_b, const CompareOptions& opts,
                          double duration_seconds) {
    VerdictReport r;
    r.outcome = to_string(v.outcome);
    r.certificate = v.certificate ? to_string(*v.certificate) : "";
    r.detail = v.detail;
    if (v.witness) {
        r.witness = v.witness->unitaries.matrices();
        r.witness_residual = v.witness->residual;
    }
    r.sigma_a = sigma_a.columns;
    r.sigma_b = sigma_b.columns;
    r.tol = opts.tol;
    r.cluster_tol = opts.cluster_tol;
    r.cert_tol = opts.cert_tol;
    r.accept_residual = opts.accept_residual;
    r.seed = opts.seed;
    r.restarts = opts.restarts;
    r.iterations = opts.iterations;
    r.mode = to_string(opts.mode);
    r.restarts_used = v.diagnostics.restarts_used;
    r.iterations_used = v.diagnostics.iterations_used;
    r.best_residual = v.diagnostics.best_residual;
    r.notes = v.diagnostics.notes;
    r.duration_seconds = duration_seconds;
    return r;
}

std::string to_string(CompareOptions::Mode m) {
    switch (m) {
    case CompareOptions::Mode::Auto: return "auto";
    case CompareOptions::Mode::Phase: return "phase";
    case CompareOptions::Mode::Certificates: return "certificates";
    case CompareOptions::Mode::Search: return "search";
    }
    return "auto";
}

CompareOptions::Mode mode_from_string(const std::string& s) {
    if (s == "auto")
        return CompareOptions::Mode::Auto;
    if (s == "phase")
        return CompareOptions::Mode::Phase;
    if (s == "certificates")
        return CompareOptions::Mode::Certificates;
    if (s == "search")
        return CompareOptions::Mode::Search;
    throw ParseError("unknown mode \"" + s + "\" (auto|phase|certificates|search)");
}

} // namespace lucanon
