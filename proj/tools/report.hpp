#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "qcomm/algebra.hpp"
#include "qcomm/solver.hpp"

namespace qcomm::cli {

/// 12 significant digits; a component below 1e-13 * max(1, |z|) is shown as 0.
std::string format_complex(Complex z);

void write_matrix(std::ostream& out, const CMatrix& m, std::string_view indent);

nlohmann::json context_json(const QContext& ctx);
void write_context(std::ostream& out, const QContext& ctx, bool with_matrices);

/// n^d for the bound on the number of solutions, saturating.
std::uint64_t solution_bound(std::size_t n, std::size_t d);

nlohmann::json solution_set_json(const MatrixPolyEquation& eq, const SolutionSet& set);
void write_solution_set(std::ostream& out, const MatrixPolyEquation& eq, const SolutionSet& set);

}  // namespace qcomm::cli
