#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "cli.hpp"
#include "problem.hpp"
#include "qcomm/matching.hpp"
#include "qcomm/solver.hpp"
#include "support/oracles.hpp"
#include "support/worked_examples.hpp"

using namespace qcomm;
using nlohmann::json;
using qcomm::testing::max_abs_diff;
using qcomm::testing::naive_matmul;
using qcomm::testing::Rng;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    Outcome o;
    o.code = cli::run(std::move(args), out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("qcomm_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string write(const std::string& name, const std::string& text) const {
        const auto p = path_ / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string write(const std::string& name, const json& j) const { return write(name, j.dump(2)); }

private:
    std::filesystem::path path_;
};

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const CMatrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

json matrix_doc(const CMatrix& m) { return json{{"schema", "qcomm/1"}, {"matrix", matrix_json(m)}}; }

CMatrix matrix_from_json(const json& j) {
    CMatrix m(j.size(), j[0].size());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = {j[r][c][0].get<double>(), j[r][c][1].get<double>()};
    return m;
}

std::vector<CMatrix> solutions_from_json(const json& report) {
    std::vector<CMatrix> out;
    for (const auto& s : report["solutions"]) out.push_back(matrix_from_json(s["x"]));
    return out;
}

// sum_j c_j Q^j by repeated naive products
CMatrix poly_of_matrix(std::span<const Complex> c, const CMatrix& q) {
    CMatrix acc(q.rows(), q.cols());
    CMatrix power = CMatrix::identity(q.rows());
    for (const auto& cj : c) {
        acc += cj * power;
        power = naive_matmul(power, q);
    }
    return acc;
}

double frob(const CMatrix& m) {
    double s = 0.0;
    for (const auto& z : m.entries()) s += std::norm(z);
    return std::sqrt(s);
}

json problem_with_matrix_q(const CMatrix& q, const json& coefficients) {
    return json{{"schema", "qcomm/1"}, {"q", {{"matrix", matrix_json(q)}}}, {"degree", coefficients.size()},
                {"coefficients", coefficients}};
}

}  // namespace

TEST_CASE("example paper-3.1 reproduces the four printed solutions") {
    const auto o = run_cli({"example", "paper-3.1", "--json"});
    REQUIRE(o.code == 0);
    const json report = json::parse(o.out);
    CHECK(report["counts"] == json::array({2, 1, 2}));
    CHECK(report["total"] == 4);
    CHECK(report["bound"] == 8);
    CHECK(report["context"]["provenance"] == "weighted-circulant");
    const auto found = solutions_from_json(report);
    REQUIRE(found.size() == 4);
    const auto m = match_matrices(found, qcomm::testing::circulant_example_solutions());
    CHECK(m.max_distance < 1e-9);
}

TEST_CASE("example paper-3.2 reproduces the four printed solutions") {
    const auto o = run_cli({"example", "paper-3.2", "--json"});
    REQUIRE(o.code == 0);
    const json report = json::parse(o.out);
    CHECK(report["counts"] == json::array({2, 1, 2}));
    CHECK(report["context"]["provenance"] == "companion");
    const auto found = solutions_from_json(report);
    REQUIRE(found.size() == 4);
    CHECK(match_matrices(found, qcomm::testing::companion_example_solutions()).max_distance < 1e-9);

    const auto expected = qcomm::testing::expected_scalar_polys();
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& g = report["scalar_polys"][i];
        REQUIRE(g.size() == 3);
        for (std::size_t j = 0; j < 3; ++j) {
            const Complex c{g[j][0].get<double>(), g[j][1].get<double>()};
            CHECK(std::abs(c - expected[i].coeff(j)) < 1e-10);
        }
    }
}

TEST_CASE("text report lists polynomials, counts and every solution") {
    const auto o = run_cli({"example", "paper-3.2"});
    REQUIRE(o.code == 0);
    CHECK(o.out.find("g2(x) = x^2 + (2) x + (1)") != std::string::npos);
    CHECK(o.out.find("-1 (multiplicity 2)") != std::string::npos);
    CHECK(o.out.find("counts: 2 1 2") != std::string::npos);
    CHECK(o.out.find("total: 4 (bound n^d = 8)") != std::string::npos);
    CHECK(o.out.find("solution 4: u = (4, -1, 2)") != std::string::npos);
    CHECK(o.out.find("[  17 -17   4 ]") != std::string::npos);
    CHECK(o.out.find("NOT ACCEPTED") == std::string::npos);
}

TEST_CASE("solve on a dumped example file matches the built-in and is deterministic") {
    TempDir dir;
    for (const std::string name : {"paper-3.1", "paper-3.2"}) {
        const auto dump = run_cli({"example", name, "--problem"});
        REQUIRE(dump.code == 0);
        const auto path = dir.write(name + ".json", dump.out);
        const auto a = run_cli({"solve", path, "--json"});
        const auto b = run_cli({"solve", path, "--json"});
        const auto c = run_cli({"example", name, "--json"});
        REQUIRE(a.code == 0);
        CHECK(a.out == b.out);
        CHECK(a.out == c.out);
        const auto t1 = run_cli({"solve", path, "--threads", "1"});
        const auto t3 = run_cli({"solve", path, "--threads", "3"});
        CHECK(t1.out == t3.out);
    }
}

TEST_CASE("JSON output reproduces the solver's doubles exactly") {
    const auto o = run_cli({"example", "paper-3.1", "--json"});
    REQUIRE(o.code == 0);
    const json report = json::parse(o.out);
    const auto eq = cli::build_equation(cli::builtin_problem("paper-3.1"));
    const auto set = solve(eq);
    const auto found = solutions_from_json(report);
    REQUIRE(found.size() == set.solutions.size());
    for (std::size_t s = 0; s < found.size(); ++s) {
        const auto got = found[s].entries();
        const auto want = set.solutions[s].x.entries();
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].real() == want[i].real());
            CHECK(got[i].imag() == want[i].imag());
        }
        CHECK(report["solutions"][s]["residual"].get<double>() == set.solutions[s].check.residual);
    }
    // re-serializing the parsed document gives the same text
    CHECK(json::parse(o.out).dump(2) + "\n" == o.out);
}

TEST_CASE("problem files round-trip through to_json and parse_problem") {
    Rng rng(71);
    cli::Problem p;
    p.q.kind = cli::QSpec::Kind::Matrix;
    p.q.matrix = qcomm::testing::planted_q(rng, 3, 2.0, 0.5).q;
    p.coefficients.emplace_back(p.q.matrix);
    p.coefficients.emplace_back(Polynomial{rng.in_box(1.0), rng.in_box(1.0)});
    p.coefficients.emplace_back(DiagValues{{rng.in_box(1.0), rng.in_box(1.0), rng.in_box(1.0)}});
    p.solve.cluster_tol_abs = 1e-9;
    p.solve.order = EnumerationOrder::Colexicographic;
    const json j = json::parse(cli::to_json(p).dump());
    const auto back = cli::parse_problem(j);
    CHECK(cli::to_json(back) == cli::to_json(p));
    CHECK(max_abs_diff(std::get<CMatrix>(back.coefficients[0]), p.q.matrix) == 0.0);
    CHECK(back.solve.order == EnumerationOrder::Colexicographic);
    CHECK(*back.solve.cluster_tol_abs == 1e-9);
}

TEST_CASE("n = 1 with A1 = Q has the single solution -Q") {
    Rng rng(5);
    const CMatrix q = qcomm::testing::planted_q(rng, 4, 2.0, 0.3).q;
    TempDir dir;
    const auto path = dir.write("p.json", problem_with_matrix_q(q, json::array({{{"matrix", matrix_json(q)}}})));
    const auto o = run_cli({"solve", path, "--json"});
    REQUIRE(o.code == 0);
    const auto found = solutions_from_json(json::parse(o.out));
    REQUIRE(found.size() == 1);
    CMatrix neg = q;
    neg *= -1.0;
    CHECK(max_abs_diff(found[0], neg) < 1e-10 * (1.0 + frob(q)));
}

TEST_CASE("check accepts a true solution and rejects the zero matrix") {
    TempDir dir;
    const auto problem = dir.write("p.json", run_cli({"example", "paper-3.2", "--problem"}).out);
    const auto first = qcomm::testing::companion_example_solutions()[0];
    const auto good = run_cli({"check", problem, dir.write("x.json", matrix_doc(first))});
    CHECK(good.code == 0);
    CHECK(good.out.find("result: pass") != std::string::npos);

    // residual at X = 0 is the constant coefficient, A2 = f2(Q)
    const auto bad = run_cli({"check", problem, dir.write("z.json", matrix_doc(CMatrix(3, 3))), "--json"});
    CHECK(bad.code == 1);
    const json r = json::parse(bad.out);
    CHECK_FALSE(r["pass"].get<bool>());
    const auto p = cli::load_problem(problem);
    const auto& a2 = std::get<Polynomial>(p.coefficients[1]);
    const CMatrix a2m = poly_of_matrix(a2.coeffs(), qcomm::testing::companion_example_q());
    CHECK(r["residual"].get<double>() == doctest::Approx(frob(a2m)).epsilon(1e-10));
    CHECK(r["commutator_residual"].get<double>() == 0.0);
}

TEST_CASE("check passes a planted solution of a random problem") {
    Rng rng(19);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t d = 2 + trial % 4;
        const auto planted = qcomm::testing::planted_q(rng, d, 2.0, 0.3);
        // x^2 + b_i x + c_i with u_i a root: c_i = -(u_i^2 + b_i u_i)
        std::vector<Complex> u(d), b(d), c(d);
        for (std::size_t i = 0; i < d; ++i) {
            u[i] = rng.in_box(2.0);
            b[i] = rng.in_box(2.0);
            c[i] = -(u[i] * u[i] + b[i] * u[i]);
        }
        auto lift = [&](const std::vector<Complex>& v) {
            return naive_matmul(naive_matmul(planted.s, CMatrix::diagonal(v)), planted.s_inv);
        };
        const json coeffs = json::array({{{"matrix", matrix_json(lift(b))}}, {{"matrix", matrix_json(lift(c))}}});
        const CMatrix x = lift(u);
        TempDir dir;
        const auto o = run_cli({"check", dir.write("p.json", problem_with_matrix_q(planted.q, coeffs)),
                                dir.write("x.json", matrix_doc(x))});
        CHECK_MESSAGE(o.code == 0, o.out, o.err);
    }
}

TEST_CASE("repr recovers polynomial coefficients") {
    TempDir dir;
    const auto qfile = dir.write("q.json", run_cli({"example", "paper-3.1", "--problem"}).out);
    const CMatrix q = qcomm::testing::circulant_example_q();

    SUBCASE("Q squared") {
        const auto o = run_cli({"repr", qfile, dir.write("a.json", matrix_doc(naive_matmul(q, q))), "--json"});
        REQUIRE(o.code == 0);
        const json r = json::parse(o.out);
        const std::vector<Complex> expected{0.0, 0.0, 1.0};
        for (std::size_t j = 0; j < 3; ++j) {
            const Complex c{r["coefficients"][j][0].get<double>(), r["coefficients"][j][1].get<double>()};
            CHECK(std::abs(c - expected[j]) < 1e-12);
        }
        CHECK(r["reconstruction_residual"].get<double>() < 1e-12);
    }

    SUBCASE("the first coefficient matrix of the weighted-circulant example") {
        // A = S diag(f1 at each eigenvalue) S^-1 from an independent eigendecomposition;
        // its coefficients solve the Vandermonde system at (2, 2w^2, 2w).
        const auto lambdas = qcomm::testing::circulant_example_eigenvalues();
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(qcomm::testing::to_eigen(q));
        Eigen::VectorXcd vals(3);
        for (int k = 0; k < 3; ++k) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < 3; ++i) {
                if (std::abs(es.eigenvalues()(k) - lambdas[i]) < std::abs(es.eigenvalues()(k) - lambdas[best])) best = i;
            }
            vals(k) = qcomm::testing::kF1Values[best];
        }
        const Eigen::MatrixXcd s = es.eigenvectors();
        const CMatrix a = qcomm::testing::from_eigen(s * vals.asDiagonal() * s.inverse());

        Eigen::MatrixXcd v(3, 3);
        Eigen::VectorXcd rhs(3);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) v(i, j) = std::pow(lambdas[i], j);
            rhs(i) = qcomm::testing::kF1Values[i];
        }
        const Eigen::VectorXcd expected = v.partialPivLu().solve(rhs);

        const auto o = run_cli({"repr", qfile, dir.write("a.json", matrix_doc(a)), "--json"});
        REQUIRE(o.code == 0);
        const json r = json::parse(o.out);
        for (int j = 0; j < 3; ++j) {
            const Complex c{r["coefficients"][j][0].get<double>(), r["coefficients"][j][1].get<double>()};
            CHECK(std::abs(c - expected(j)) < 1e-10);
        }
        const auto text = run_cli({"repr", qfile, dir.write("a.json", matrix_doc(a))});
        CHECK(text.out.find("a0 = ") != std::string::npos);
    }

    SUBCASE("a non-member is rejected with its commutator") {
        CMatrix a(3, 3);
        a(0, 0) = 1.0;
        const auto o = run_cli({"repr", qfile, dir.write("a.json", matrix_doc(a))});
        CHECK(o.code == 2);
        CHECK(o.err.find("||AQ-QA||_F = ") != std::string::npos);
        CHECK(o.err.find("NotMember") != std::string::npos);
    }
}

TEST_CASE("diag reports eigenvalues, provenance and T") {
    TempDir dir;
    SUBCASE("weighted circulant") {
        const auto o = run_cli({"diag", dir.write("q.json", json{{"schema", "qcomm/1"},
                                                                 {"q", {{"weighted_circulant", {1, 1, 8}}}}}),
                                "--json"});
        REQUIRE(o.code == 0);
        const json r = json::parse(o.out);
        CHECK(r["provenance"] == "weighted-circulant");
        const auto expected = qcomm::testing::circulant_example_eigenvalues();
        for (std::size_t i = 0; i < 3; ++i) {
            const Complex z{r["eigenvalues"][i][0].get<double>(), r["eigenvalues"][i][1].get<double>()};
            CHECK(std::abs(z - expected[i]) < 1e-12);
        }
    }
    SUBCASE("companion prints the companion matrix and a Vandermonde T") {
        const auto o = run_cli(
            {"diag", dir.write("q.json", json{{"schema", "qcomm/1"}, {"q", {{"companion", {1, 2, 3}}}}})});
        REQUIRE(o.code == 0);
        CHECK(o.out.find("provenance: companion") != std::string::npos);
        CHECK(o.out.find("[   0   1   0 ]") != std::string::npos);
        CHECK(o.out.find("[   6 -11   6 ]") != std::string::npos);
        CHECK(o.out.find("[ 1 4 9 ]") != std::string::npos);
    }
    SUBCASE("diagonal input gives a permutation-like T") {
        const CMatrix q = CMatrix::diagonal(std::vector<Complex>{1.0, 2.0, 3.0});
        const auto o = run_cli({"diag", dir.write("q.json", json{{"schema", "qcomm/1"},
                                                                 {"q", {{"matrix", matrix_json(q)}}}}),
                                "--json"});
        REQUIRE(o.code == 0);
        const json r = json::parse(o.out);
        CHECK(r["provenance"] == "generic");
        const CMatrix t = matrix_from_json(r["t"]);
        for (std::size_t c = 0; c < 3; ++c) {
            const Complex lambda{r["eigenvalues"][c][0].get<double>(), r["eigenvalues"][c][1].get<double>()};
            for (std::size_t row = 0; row < 3; ++row) {
                if (std::abs(q(row, row) - lambda) < 1e-12) {
                    CHECK(std::abs(t(row, c)) > 0.5);
                } else {
                    CHECK(std::abs(t(row, c)) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("input and validation errors exit with 2") {
    TempDir dir;
    const std::string good = run_cli({"example", "paper-3.2", "--problem"}).out;
    json base = json::parse(good);

    CHECK(run_cli({"solve", (std::filesystem::path("/nonexistent") / "p.json").string()}).code == 2);
    CHECK(run_cli({"solve", dir.write("bad.json", std::string("{\"schema\": "))}).code == 2);
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"solve"}).code == 2);
    CHECK(run_cli({"solve", "x.json", "--no-such-flag"}).code == 2);
    CHECK(run_cli({"example", "unknown-example"}).code == 2);
    CHECK(run_cli({"solve", "x.json", "--cap", "zero"}).code == 2);
    CHECK(run_cli({"--help"}).code == 0);

    auto variant = [&](auto&& edit) {
        json j = base;
        edit(j);
        return run_cli({"solve", dir.write("v.json", j)});
    };
    CHECK(variant([](json& j) { j["schema"] = "qcomm/2"; }).code == 2);
    CHECK(variant([](json& j) { j.erase("schema"); }).code == 2);
    CHECK(variant([](json& j) { j["degree"] = 3; }).code == 2);
    CHECK(variant([](json& j) { j["degree"] = -1; }).code == 2);
    CHECK(variant([](json& j) { j["q"]["matrix"] = json::array({{1, 0}, {0, 2}}); }).code == 2);
    CHECK(variant([](json& j) { j["q"] = {{"matrix", {{1, 0, 0}, {0, 2}}}}; }).code == 2);
    CHECK(variant([](json& j) { j["q"] = {{"hermitian", {1, 2}}}; }).code == 2);
    CHECK(variant([](json& j) { j["extra"] = 1; }).code == 2);
    CHECK(variant([](json& j) { j["options"]["verbosity"] = 3; }).code == 2);
    CHECK(variant([](json& j) { j["options"]["order"] = "random"; }).code == 2);
    CHECK(variant([](json& j) { j["options"]["residual_tol"] = -1.0; }).code == 2);
    CHECK(variant([](json& j) { j["coefficients"][0] = {{"tensor", {1}}}; }).code == 2);
    CHECK(variant([](json& j) { j["coefficients"][0] = {{"repr_poly", {{1, 2, 3}}}}; }).code == 2);
    CHECK(variant([](json& j) { j["coefficients"][0] = {{"diag_coords", {1, 2}}}; }).code == 2);
    CHECK(variant([](json& j) { j["q"] = {{"weighted_circulant", {1, 0, 8}}}; }).code == 2);
    CHECK(variant([](json& j) { j["q"] = {{"companion", {1, 1, 3}}}; }).code == 2);
    CHECK(variant([](json& j) { j["q"] = {{"matrix", {{1, 0, 0}, {0, 1, 0}, {0, 0, 2}}}}; }).code == 2);
    const auto not_member = variant([](json& j) {
        j["coefficients"][0] = {{"matrix", {{1, 0, 0}, {0, 0, 0}, {0, 0, 0}}}};
    });
    CHECK(not_member.code == 2);
    CHECK(not_member.err.find("error [NotMember]") != std::string::npos);

    const auto not_distinct = variant([](json& j) { j["q"] = {{"matrix", {{1, 0, 0}, {0, 1, 0}, {0, 0, 2}}}}; });
    CHECK(not_distinct.err.find("NotDistinctEigenvalues") != std::string::npos);

    const auto problem = dir.write("p.json", good);
    CHECK(run_cli({"check", problem, dir.write("m.json", matrix_doc(CMatrix(2, 2)))}).code == 2);
    CHECK(run_cli({"check", problem, dir.write("m.json", json{{"schema", "qcomm/1"}})}).code == 2);
}

TEST_CASE("enumeration cap and truncation") {
    const auto capped = run_cli({"example", "paper-3.1", "--cap", "2"});
    CHECK(capped.code == 2);
    CHECK(capped.err.find("EnumerationCapExceeded") != std::string::npos);
    const auto truncated = run_cli({"example", "paper-3.1", "--cap", "2", "--truncate", "--json"});
    REQUIRE(truncated.code == 0);
    const json r = json::parse(truncated.out);
    CHECK(r["truncated"].get<bool>());
    CHECK(r["total"] == 4);
    CHECK(r["solutions"].size() == 2);
}

TEST_CASE("--match-set compares solution sets regardless of order") {
    TempDir dir;
    auto reference = qcomm::testing::circulant_example_solutions();
    std::reverse(reference.begin(), reference.end());
    json doc{{"schema", "qcomm/1"}, {"solutions", json::array()}};
    for (const auto& m : reference) doc["solutions"].push_back(matrix_json(m));
    const auto ok = run_cli({"example", "paper-3.1", "--match-set", dir.write("ref.json", doc)});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("match-set: 4 expected, 4 found") != std::string::npos);
    CHECK(ok.out.find(": PASS") != std::string::npos);

    // a solve --json report is accepted as a reference too
    const auto own = dir.write("own.json", run_cli({"example", "paper-3.1", "--json"}).out);
    CHECK(run_cli({"example", "paper-3.1", "--match-set", own}).code == 0);

    doc["solutions"][0][0][0] = json::array({5.0, 0.0});
    const auto off = run_cli({"example", "paper-3.1", "--json", "--match-set", dir.write("off.json", doc)});
    CHECK(off.code == 1);
    CHECK_FALSE(json::parse(off.out)["match_set"]["pass"].get<bool>());

    doc["solutions"].erase(0);
    CHECK(run_cli({"example", "paper-3.1", "--match-set", dir.write("short.json", doc)}).code == 1);
}
