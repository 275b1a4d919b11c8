#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qcomm/algebra.hpp"
#include "qcomm/linalg.hpp"
#include "qcomm/solver.hpp"

namespace qcomm::cli {

inline constexpr std::string_view kSchema = "qcomm/1";

/// How Q is given in a problem file.
struct QSpec {
    enum class Kind { Matrix, WeightedCirculant, Circulant, Companion };
    Kind kind = Kind::Matrix;
    CMatrix matrix;               // Kind::Matrix
    std::vector<Complex> values;  // weights, first row, or eigenvalues
};

struct Problem {
    QSpec q;
    std::vector<Coefficient> coefficients;
    SolveOptions solve;
    double distinct_tol = kDefaultDistinctTol;
    double member_tol = kDefaultMemberTol;
};

/// Complex scalars are [re, im]; a bare number is read as a real value.
/// All parse failures throw Error(ParseError) naming the offending field.
Complex parse_complex(const nlohmann::json& j, const std::string& where);
std::vector<Complex> parse_vector(const nlohmann::json& j, const std::string& where);
CMatrix parse_matrix(const nlohmann::json& j, const std::string& where);
QSpec parse_qspec(const nlohmann::json& j);
Problem parse_problem(const nlohmann::json& j);

nlohmann::json to_json(Complex z);
nlohmann::json to_json(std::span<const Complex> v);
nlohmann::json to_json(const CMatrix& m);
nlohmann::json to_json(const QSpec& q);
nlohmann::json to_json(const Problem& p);

/// Reads and parses a JSON document; missing files and syntax errors are ParseError.
nlohmann::json read_json(const std::filesystem::path& path);

/// A problem file, or any document with a "q" object.
Problem load_problem(const std::filesystem::path& path);
QSpec load_qspec(const std::filesystem::path& path);
/// A document {"schema": "qcomm/1", "matrix": [...]}.
CMatrix load_matrix(const std::filesystem::path& path);

QContext build_context(const QSpec& q, double distinct_tol = kDefaultDistinctTol);
MatrixPolyEquation build_equation(const Problem& p);

/// Names accepted by builtin_problem.
std::vector<std::string> builtin_names();
/// The two worked examples: "paper-3.1" (weighted circulant with weights
/// 1, 1, 8) and "paper-3.2" (companion matrix with eigenvalues 1, 2, 3).
/// Throws InvalidArgument for unknown names.
Problem builtin_problem(std::string_view name);

}  // namespace qcomm::cli
