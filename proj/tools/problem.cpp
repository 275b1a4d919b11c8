#include "problem.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "qcomm/error.hpp"
#include "qcomm/structured.hpp"

namespace qcomm::cli {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& where, std::string_view what) {
    throw Error(ErrorCode::ParseError, fmt::format("{}: {}", where, what));
}

double parse_real(const json& j, const std::string& where) {
    if (!j.is_number()) parse_fail(where, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) parse_fail(where, "value is not finite");
    return v;
}

double parse_tolerance(const json& j, const std::string& where) {
    const double v = parse_real(j, where);
    if (v < 0.0) parse_fail(where, "tolerance must be non-negative");
    return v;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) parse_fail(where, fmt::format("unknown field \"{}\"", key));
    }
}

void check_schema(const json& j) {
    if (!j.is_object()) parse_fail("document", "expected a JSON object");
    if (!j.contains("schema")) parse_fail("schema", "missing; expected \"qcomm/1\"");
    if (!j["schema"].is_string() || j["schema"].get<std::string>() != kSchema) {
        parse_fail("schema", fmt::format("unsupported schema {}, expected \"qcomm/1\"", j["schema"].dump()));
    }
}

Coefficient parse_coefficient(const json& j, const std::string& where) {
    if (!j.is_object() || j.size() != 1) {
        parse_fail(where, "expected an object with exactly one of \"matrix\", \"repr_poly\", \"diag_coords\"");
    }
    if (j.contains("matrix")) return parse_matrix(j["matrix"], where + ".matrix");
    if (j.contains("repr_poly")) return Polynomial(parse_vector(j["repr_poly"], where + ".repr_poly"));
    if (j.contains("diag_coords")) return DiagValues{parse_vector(j["diag_coords"], where + ".diag_coords")};
    parse_fail(where, fmt::format("unknown coefficient form \"{}\"", j.begin().key()));
}

void parse_options(const json& j, Problem& p) {
    const std::string where = "options";
    if (!j.is_object()) parse_fail(where, "expected an object");
    check_keys(j,
               {"cluster_tol_abs", "cluster_tol_rel", "residual_tol", "commutator_tol", "cap", "truncate", "order",
                "distinct_tol", "member_tol", "threads"},
               where);
    if (j.contains("cluster_tol_abs")) p.solve.cluster_tol_abs = parse_tolerance(j["cluster_tol_abs"], where + ".cluster_tol_abs");
    if (j.contains("cluster_tol_rel")) p.solve.cluster_tol_rel = parse_tolerance(j["cluster_tol_rel"], where + ".cluster_tol_rel");
    if (j.contains("residual_tol")) p.solve.residual_tol = parse_tolerance(j["residual_tol"], where + ".residual_tol");
    if (j.contains("commutator_tol")) p.solve.commutator_tol = parse_tolerance(j["commutator_tol"], where + ".commutator_tol");
    if (j.contains("distinct_tol")) p.distinct_tol = parse_tolerance(j["distinct_tol"], where + ".distinct_tol");
    if (j.contains("member_tol")) p.member_tol = parse_tolerance(j["member_tol"], where + ".member_tol");
    if (j.contains("cap")) {
        if (!j["cap"].is_number_unsigned() || j["cap"].get<std::uint64_t>() == 0) {
            parse_fail(where + ".cap", "expected a positive integer");
        }
        p.solve.enumeration_cap = j["cap"].get<std::uint64_t>();
    }
    if (j.contains("threads")) {
        if (!j["threads"].is_number_unsigned()) parse_fail(where + ".threads", "expected a non-negative integer");
        p.solve.threads = j["threads"].get<unsigned>();
    }
    if (j.contains("truncate")) {
        if (!j["truncate"].is_boolean()) parse_fail(where + ".truncate", "expected true or false");
        p.solve.truncate = j["truncate"].get<bool>();
    }
    if (j.contains("order")) {
        const json& o = j["order"];
        if (o == "lexicographic") {
            p.solve.order = EnumerationOrder::Lexicographic;
        } else if (o == "colexicographic") {
            p.solve.order = EnumerationOrder::Colexicographic;
        } else {
            parse_fail(where + ".order", "expected \"lexicographic\" or \"colexicographic\"");
        }
    }
}

std::string_view kind_key(QSpec::Kind k) {
    switch (k) {
        case QSpec::Kind::Matrix: return "matrix";
        case QSpec::Kind::WeightedCirculant: return "weighted_circulant";
        case QSpec::Kind::Circulant: return "circulant";
        case QSpec::Kind::Companion: return "companion";
    }
    return "matrix";
}

}  // namespace

Complex parse_complex(const json& j, const std::string& where) {
    if (j.is_number()) return {parse_real(j, where), 0.0};
    if (j.is_array() && j.size() == 2) return {parse_real(j[0], where + "[0]"), parse_real(j[1], where + "[1]")};
    parse_fail(where, "expected a complex number [re, im] or a real number");
}

std::vector<Complex> parse_vector(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) parse_fail(where, "expected a non-empty array");
    std::vector<Complex> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_complex(j[i], fmt::format("{}[{}]", where, i)));
    return out;
}

CMatrix parse_matrix(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) parse_fail(where, "expected a non-empty array of rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    std::vector<Complex> entries;
    for (std::size_t r = 0; r < rows; ++r) {
        const std::string row_where = fmt::format("{}[{}]", where, r);
        const auto row = parse_vector(j[r], row_where);
        if (r == 0) cols = row.size();
        if (row.size() != cols) parse_fail(row_where, fmt::format("row has {} entries, expected {}", row.size(), cols));
        entries.insert(entries.end(), row.begin(), row.end());
    }
    return CMatrix(rows, cols, std::move(entries));
}

QSpec parse_qspec(const json& j) {
    if (!j.is_object()) parse_fail("q", "expected an object");
    if (j.size() != 1) {
        parse_fail("q", "expected exactly one of \"matrix\", \"weighted_circulant\", \"circulant\", \"companion\"");
    }
    QSpec q;
    const std::string key = j.begin().key();
    if (key == "matrix") {
        q.kind = QSpec::Kind::Matrix;
        q.matrix = parse_matrix(j[key], "q.matrix");
        if (!q.matrix.is_square()) parse_fail("q.matrix", "Q must be square");
    } else if (key == "weighted_circulant") {
        q.kind = QSpec::Kind::WeightedCirculant;
        q.values = parse_vector(j[key], "q.weighted_circulant");
    } else if (key == "circulant") {
        q.kind = QSpec::Kind::Circulant;
        q.values = parse_vector(j[key], "q.circulant");
    } else if (key == "companion") {
        q.kind = QSpec::Kind::Companion;
        q.values = parse_vector(j[key], "q.companion");
    } else {
        parse_fail("q", fmt::format("unknown form \"{}\"", key));
    }
    return q;
}

Problem parse_problem(const json& j) {
    check_schema(j);
    check_keys(j, {"schema", "name", "description", "q", "degree", "coefficients", "options"}, "document");
    if (!j.contains("q")) parse_fail("q", "missing");
    if (!j.contains("degree")) parse_fail("degree", "missing");
    if (!j.contains("coefficients")) parse_fail("coefficients", "missing");

    Problem p;
    p.q = parse_qspec(j["q"]);
    if (!j["degree"].is_number_unsigned() || j["degree"].get<std::uint64_t>() == 0) {
        parse_fail("degree", "expected a positive integer");
    }
    const auto n = j["degree"].get<std::uint64_t>();
    const json& cs = j["coefficients"];
    if (!cs.is_array()) parse_fail("coefficients", "expected an array");
    if (cs.size() != n) parse_fail("coefficients", fmt::format("{} entries for degree {}", cs.size(), n));
    for (std::size_t k = 0; k < cs.size(); ++k) {
        p.coefficients.push_back(parse_coefficient(cs[k], fmt::format("coefficients[{}]", k)));
    }
    if (j.contains("options")) parse_options(j["options"], p);
    return p;
}

json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json to_json(std::span<const Complex> v) {
    json out = json::array();
    for (const auto& z : v) out.push_back(to_json(z));
    return out;
}

json to_json(const CMatrix& m) {
    json out = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
        out.push_back(std::move(row));
    }
    return out;
}

json to_json(const QSpec& q) {
    json out = json::object();
    if (q.kind == QSpec::Kind::Matrix) {
        out["matrix"] = to_json(q.matrix);
    } else {
        out[std::string(kind_key(q.kind))] = to_json(q.values);
    }
    return out;
}

json to_json(const Problem& p) {
    json out;
    out["schema"] = kSchema;
    out["q"] = to_json(p.q);
    out["degree"] = p.coefficients.size();
    json cs = json::array();
    for (const auto& c : p.coefficients) {
        if (const auto* m = std::get_if<CMatrix>(&c)) {
            cs.push_back({{"matrix", to_json(*m)}});
        } else if (const auto* poly = std::get_if<Polynomial>(&c)) {
            std::vector<Complex> coeffs(poly->coeffs().begin(), poly->coeffs().end());
            if (coeffs.empty()) coeffs.push_back(0.0);
            cs.push_back({{"repr_poly", to_json(coeffs)}});
        } else {
            cs.push_back({{"diag_coords", to_json(std::get<DiagValues>(c).values)}});
        }
    }
    out["coefficients"] = std::move(cs);

    json opts;
    if (p.solve.cluster_tol_abs) opts["cluster_tol_abs"] = *p.solve.cluster_tol_abs;
    if (p.solve.cluster_tol_rel) opts["cluster_tol_rel"] = *p.solve.cluster_tol_rel;
    opts["residual_tol"] = p.solve.residual_tol;
    opts["commutator_tol"] = p.solve.commutator_tol;
    opts["cap"] = p.solve.enumeration_cap;
    opts["truncate"] = p.solve.truncate;
    opts["order"] = p.solve.order == EnumerationOrder::Lexicographic ? "lexicographic" : "colexicographic";
    opts["distinct_tol"] = p.distinct_tol;
    opts["member_tol"] = p.member_tol;
    out["options"] = std::move(opts);
    return out;
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, fmt::format("cannot open {}", path.string()));
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, fmt::format("{}: {}", path.string(), e.what()));
    }
}

Problem load_problem(const std::filesystem::path& path) { return parse_problem(read_json(path)); }

QSpec load_qspec(const std::filesystem::path& path) {
    const json j = read_json(path);
    check_schema(j);
    if (!j.contains("q")) parse_fail("q", "missing");
    return parse_qspec(j["q"]);
}

CMatrix load_matrix(const std::filesystem::path& path) {
    const json j = read_json(path);
    check_schema(j);
    if (!j.contains("matrix")) parse_fail("matrix", "missing");
    return parse_matrix(j["matrix"], "matrix");
}

QContext build_context(const QSpec& q, double distinct_tol) {
    switch (q.kind) {
        case QSpec::Kind::Matrix: return make_context(q.matrix, distinct_tol);
        case QSpec::Kind::WeightedCirculant:
            return weighted_circulant_context(WeightedCirculantSpec(q.values), distinct_tol);
        case QSpec::Kind::Circulant: return circulant_context(q.values, distinct_tol);
        case QSpec::Kind::Companion: return companion_context(q.values, distinct_tol);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown Q form");
}

MatrixPolyEquation build_equation(const Problem& p) {
    return MatrixPolyEquation(build_context(p.q, p.distinct_tol), p.coefficients, p.member_tol);
}

std::vector<std::string> builtin_names() { return {"paper-3.1", "paper-3.2"}; }

Problem builtin_problem(std::string_view name) {
    Problem p;
    if (name == "paper-3.1") {
        p.q.kind = QSpec::Kind::WeightedCirculant;
        p.q.values = {1.0, 1.0, 8.0};
    } else if (name == "paper-3.2") {
        p.q.kind = QSpec::Kind::Companion;
        p.q.values = {1.0, 2.0, 3.0};
    } else {
        throw Error(ErrorCode::InvalidArgument,
                    fmt::format("unknown example \"{}\" (expected paper-3.1 or paper-3.2)", name));
    }
    // f1 takes -5, 2, -3 and f2 takes 4, 1, 2 at the eigenvalues in context order;
    // the representation polynomials interpolate those values.
    const QContext ctx = build_context(p.q);
    const std::vector<Complex> f1{-5.0, 2.0, -3.0};
    const std::vector<Complex> f2{4.0, 1.0, 2.0};
    p.coefficients.emplace_back(Polynomial(vandermonde_solve(ctx.eigenvalues(), f1)));
    p.coefficients.emplace_back(Polynomial(vandermonde_solve(ctx.eigenvalues(), f2)));
    return p;
}

}  // namespace qcomm::cli
