#include "report.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "problem.hpp"

namespace qcomm::cli {

using nlohmann::json;

namespace {

std::string format_real(double x) {
    if (x == 0.0) x = 0.0;  // drop the sign of -0
    return fmt::format("{:.12g}", x);
}

std::string format_poly(const Polynomial& p) {
    std::string s;
    const auto c = p.coeffs();
    for (std::size_t j = c.size(); j-- > 0;) {
        if (!s.empty()) s += " + ";
        const std::string coeff = "(" + format_complex(c[j]) + ")";
        if (j == 0) {
            s += coeff;
        } else if (j == c.size() - 1 && c[j] == Complex{1.0}) {
            s += j == 1 ? "x" : fmt::format("x^{}", j);
        } else {
            s += coeff + (j == 1 ? " x" : fmt::format(" x^{}", j));
        }
    }
    return s.empty() ? "0" : s;
}

json warning_json(const Warning& w) {
    json out{{"kind", to_string(w.kind)}, {"message", w.message}};
    if (w.index) out["index"] = *w.index;
    return out;
}

}  // namespace

std::string format_complex(Complex z) {
    const double floor = 1e-13 * std::max(1.0, std::abs(z));
    const double re = std::abs(z.real()) < floor ? 0.0 : z.real();
    const double im = std::abs(z.imag()) < floor ? 0.0 : z.imag();
    if (im == 0.0) return format_real(re);
    if (re == 0.0) return format_real(im) + "i";
    return fmt::format("{}{}{}i", format_real(re), im < 0.0 ? "-" : "+", format_real(std::abs(im)));
}

void write_matrix(std::ostream& out, const CMatrix& m, std::string_view indent) {
    std::vector<std::string> cells(m.rows() * m.cols());
    std::size_t width = 0;
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) {
            cells[r * m.cols() + c] = format_complex(m(r, c));
            width = std::max(width, cells[r * m.cols() + c].size());
        }
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out << indent << "[";
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out << fmt::format(" {:>{}}", cells[r * m.cols() + c], width);
        }
        out << " ]\n";
    }
}

json context_json(const QContext& ctx) {
    const auto& dec = ctx.decomposition();
    return json{{"provenance", to_string(ctx.provenance())},
                {"dimension", ctx.dim()},
                {"eigenvalues", to_json(ctx.eigenvalues())},
                {"cond_T", dec.cond_T},
                {"min_gap", dec.min_gap},
                {"verification_residual", ctx.verification_residual()},
                {"q", to_json(ctx.q())},
                {"t", to_json(ctx.T())},
                {"t_inv", to_json(ctx.T_inv())}};
}

void write_context(std::ostream& out, const QContext& ctx, bool with_matrices) {
    const auto& dec = ctx.decomposition();
    out << fmt::format("provenance: {}\n", to_string(ctx.provenance()));
    out << fmt::format("dimension: {}\n", ctx.dim());
    out << "eigenvalues:\n";
    for (std::size_t i = 0; i < ctx.dim(); ++i) {
        out << fmt::format("  lambda{} = {}\n", i + 1, format_complex(ctx.eigenvalues()[i]));
    }
    out << fmt::format("cond(T): {:.6g}\n", dec.cond_T);
    out << fmt::format("min gap: {:.6g}\n", dec.min_gap);
    out << fmt::format("||T^-1 Q T - diag(lambda)||_F: {:.3e}\n", ctx.verification_residual());
    if (with_matrices) {
        out << "Q:\n";
        write_matrix(out, ctx.q(), "  ");
        out << "T:\n";
        write_matrix(out, ctx.T(), "  ");
    }
}

std::uint64_t solution_bound(std::size_t n, std::size_t d) {
    std::uint64_t out = 1;
    for (std::size_t i = 0; i < d; ++i) {
        if (n != 0 && out > std::numeric_limits<std::uint64_t>::max() / n) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        out *= n;
    }
    return out;
}

json solution_set_json(const MatrixPolyEquation& eq, const SolutionSet& set) {
    json polys = json::array();
    for (const auto& g : set.scalar_polys) {
        std::vector<Complex> c(g.coeffs().begin(), g.coeffs().end());
        polys.push_back(to_json(c));
    }
    json roots = json::array();
    for (const auto& clusters : set.distinct_roots) {
        json list = json::array();
        for (const auto& c : clusters) {
            list.push_back({{"value", to_json(c.representative)},
                            {"multiplicity", c.multiplicity},
                            {"member_residual", c.member_residual}});
        }
        roots.push_back(std::move(list));
    }
    json sols = json::array();
    for (const auto& s : set.solutions) {
        sols.push_back({{"root_indices", s.root_indices},
                        {"u", to_json(s.u)},
                        {"x", to_json(s.x)},
                        {"residual", s.check.residual},
                        {"relative_residual", s.check.relative_residual},
                        {"commutator_residual", s.check.commutator_residual},
                        {"commutator_relative", s.check.commutator_relative},
                        {"accepted", s.accepted}});
    }
    json warnings = json::array();
    for (const auto& w : set.warnings) warnings.push_back(warning_json(w));

    return json{{"schema", kSchema},
                {"context", context_json(eq.context())},
                {"degree", eq.degree()},
                {"scalar_polys", std::move(polys)},
                {"distinct_roots", std::move(roots)},
                {"counts", set.counts},
                {"total", set.total},
                {"bound", solution_bound(eq.degree(), eq.context().dim())},
                {"truncated", set.truncated},
                {"solutions", std::move(sols)},
                {"warnings", std::move(warnings)}};
}

void write_solution_set(std::ostream& out, const MatrixPolyEquation& eq, const SolutionSet& set) {
    write_context(out, eq.context(), false);
    out << fmt::format("degree: {}\n", eq.degree());
    out << "scalar polynomials:\n";
    for (std::size_t i = 0; i < set.scalar_polys.size(); ++i) {
        out << fmt::format("  g{}(x) = {}\n", i + 1, format_poly(set.scalar_polys[i]));
    }
    out << "distinct roots:\n";
    for (std::size_t i = 0; i < set.distinct_roots.size(); ++i) {
        out << fmt::format("  g{}:", i + 1);
        for (const auto& c : set.distinct_roots[i]) {
            out << " " << format_complex(c.representative);
            if (c.multiplicity > 1) out << fmt::format(" (multiplicity {})", c.multiplicity);
            if (&c != &set.distinct_roots[i].back()) out << ",";
        }
        out << "\n";
    }
    out << "counts:";
    for (const auto c : set.counts) out << " " << c;
    out << "\n";
    out << fmt::format("total: {} (bound n^d = {})\n", set.total, solution_bound(eq.degree(), eq.context().dim()));
    for (std::size_t s = 0; s < set.solutions.size(); ++s) {
        const auto& sol = set.solutions[s];
        out << fmt::format("solution {}: u = (", s + 1);
        for (std::size_t i = 0; i < sol.u.size(); ++i) out << (i ? ", " : "") << format_complex(sol.u[i]);
        out << ")\n";
        write_matrix(out, sol.x, "  ");
        out << fmt::format("  residual {:.3e} (relative {:.3e}), commutator {:.3e}{}\n", sol.check.residual,
                           sol.check.relative_residual, sol.check.commutator_residual,
                           sol.accepted ? "" : "  NOT ACCEPTED");
    }
    if (set.truncated) out << fmt::format("truncated: showing {} of {}\n", set.solutions.size(), set.total);
    for (const auto& w : set.warnings) out << fmt::format("warning [{}]: {}\n", to_string(w.kind), w.message);
}

}  // namespace qcomm::cli
