#include "cli.hpp"

#include <algorithm>
#include <exception>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "problem.hpp"
#include "qcomm/matching.hpp"
#include "report.hpp"

namespace qcomm::cli {

using nlohmann::json;

namespace {

struct SolveFlags {
    std::string path;
    bool json = false;
    bool print_problem = false;
    std::optional<double> cluster_tol;
    std::optional<double> cluster_rel_tol;
    std::optional<double> residual_tol;
    std::optional<std::uint64_t> cap;
    std::optional<unsigned> threads;
    bool truncate = false;
    std::string match_set;
    double match_tol = 1e-7;
};

void apply_flags(const SolveFlags& f, Problem& p) {
    if (f.cluster_tol) p.solve.cluster_tol_abs = *f.cluster_tol;
    if (f.cluster_rel_tol) p.solve.cluster_tol_rel = *f.cluster_rel_tol;
    if (f.residual_tol) p.solve.residual_tol = *f.residual_tol;
    if (f.cap) p.solve.enumeration_cap = *f.cap;
    if (f.threads) p.solve.threads = *f.threads;
    if (f.truncate) p.solve.truncate = true;
}

// Reference matrices from {"solutions": [...]}, where each entry is a matrix
// or an object with an "x" matrix (as written by solve --json).
std::vector<CMatrix> load_reference_set(const std::string& path) {
    const json j = read_json(path);
    if (!j.is_object() || !j.contains("solutions") || !j["solutions"].is_array()) {
        throw Error(ErrorCode::ParseError, fmt::format("{}: expected an object with a \"solutions\" array", path));
    }
    std::vector<CMatrix> out;
    const json& sols = j["solutions"];
    for (std::size_t i = 0; i < sols.size(); ++i) {
        const json& entry = sols[i].is_object() && sols[i].contains("x") ? sols[i]["x"] : sols[i];
        out.push_back(parse_matrix(entry, fmt::format("solutions[{}]", i)));
    }
    return out;
}

int run_solve(Problem problem, const SolveFlags& flags, std::ostream& out) {
    apply_flags(flags, problem);
    if (flags.print_problem) {
        out << to_json(problem).dump(2) << "\n";
        return kExitOk;
    }
    const MatrixPolyEquation eq = build_equation(problem);
    const SolutionSet set = solve(eq, problem.solve);

    std::optional<json> match;
    bool matched = true;
    if (!flags.match_set.empty()) {
        const auto reference = load_reference_set(flags.match_set);
        std::vector<CMatrix> found;
        for (const auto& s : set.solutions) found.push_back(s.x);
        match = json{{"expected", reference.size()}, {"found", found.size()}};
        if (reference.size() != found.size()) {
            matched = false;
            (*match)["max_distance"] = nullptr;
        } else {
            const Matching m = match_matrices(found, reference);
            matched = m.max_distance <= flags.match_tol;
            (*match)["max_distance"] = m.max_distance;
            (*match)["assignment"] = m.assignment;
        }
        (*match)["tolerance"] = flags.match_tol;
        (*match)["pass"] = matched;
    }

    if (flags.json) {
        json report = solution_set_json(eq, set);
        if (match) report["match_set"] = *match;
        out << report.dump(2) << "\n";
    } else {
        write_solution_set(out, eq, set);
        if (match) {
            const auto& m = *match;
            out << fmt::format("match-set: {} expected, {} found, max distance {}: {}\n",
                               m["expected"].get<std::size_t>(), m["found"].get<std::size_t>(),
                               m["max_distance"].is_null() ? std::string("n/a")
                                                           : fmt::format("{:.3e}", m["max_distance"].get<double>()),
                               matched ? "PASS" : "FAIL");
        }
    }
    return matched ? kExitOk : kExitFail;
}

int run_check(const std::string& problem_path, const std::string& candidate_path, bool as_json, std::ostream& out) {
    const Problem problem = load_problem(problem_path);
    const MatrixPolyEquation eq = build_equation(problem);
    const CMatrix x = load_matrix(candidate_path);
    const Verification v = verify_solution(eq, x);
    const bool pass = v.relative_residual <= problem.solve.residual_tol &&
                      v.commutator_relative <= problem.solve.commutator_tol;
    if (as_json) {
        out << json{{"residual", v.residual},
                    {"relative_residual", v.relative_residual},
                    {"commutator_residual", v.commutator_residual},
                    {"commutator_relative", v.commutator_relative},
                    {"residual_tol", problem.solve.residual_tol},
                    {"commutator_tol", problem.solve.commutator_tol},
                    {"pass", pass}}
                   .dump(2)
            << "\n";
    } else {
        out << fmt::format("residual: {:.6e} (relative {:.6e}, tolerance {:.1e})\n", v.residual, v.relative_residual,
                           problem.solve.residual_tol);
        out << fmt::format("commutator: {:.6e} (relative {:.6e}, tolerance {:.1e})\n", v.commutator_residual,
                           v.commutator_relative, problem.solve.commutator_tol);
        out << "result: " << (pass ? "pass" : "fail") << "\n";
    }
    return pass ? kExitOk : kExitFail;
}

int run_repr(const std::string& q_path, const std::string& a_path, bool as_json, std::ostream& out,
             std::ostream& err) {
    const QContext ctx = build_context(load_qspec(q_path));
    const CMatrix a = load_matrix(a_path);
    ReprPoly rep;
    try {
        rep = repr_poly_report(ctx, a);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NotMember) {
            err << fmt::format("||AQ-QA||_F = {:.6e}\n", commutator_residual(ctx.q(), a));
        }
        throw;
    }
    std::vector<Complex> coeffs(ctx.dim(), Complex{});
    std::copy(rep.poly.coeffs().begin(), rep.poly.coeffs().end(), coeffs.begin());
    if (as_json) {
        out << json{{"coefficients", to_json(coeffs)},
                    {"reconstruction_residual", rep.reconstruction_residual},
                    {"off_diagonal_mass", rep.off_diagonal_mass},
                    {"vandermonde_cond", rep.vandermonde_cond},
                    {"ill_conditioned", rep.ill_conditioned}}
                   .dump(2)
            << "\n";
    } else {
        out << "coefficients:\n";
        for (std::size_t j = 0; j < coeffs.size(); ++j) out << fmt::format("  a{} = {}\n", j, format_complex(coeffs[j]));
        out << fmt::format("||sum a_j Q^j - A||_F: {:.3e}\n", rep.reconstruction_residual);
        out << fmt::format("off-diagonal mass of T^-1 A T: {:.3e}\n", rep.off_diagonal_mass);
        out << fmt::format("Vandermonde condition: {:.6g}\n", rep.vandermonde_cond);
        if (rep.ill_conditioned) out << "warning [ill-conditioned]: Vandermonde system is ill-conditioned\n";
    }
    return kExitOk;
}

int run_diag(const std::string& q_path, bool as_json, std::ostream& out) {
    const QContext ctx = build_context(load_qspec(q_path));
    if (as_json) {
        out << context_json(ctx).dump(2) << "\n";
    } else {
        write_context(out, ctx, true);
    }
    return kExitOk;
}

void add_solve_flags(CLI::App* cmd, SolveFlags& f) {
    cmd->add_flag("--json", f.json, "Emit the solution set as JSON");
    cmd->add_option("--cluster-tol", f.cluster_tol, "Absolute root-clustering tolerance")->check(CLI::NonNegativeNumber);
    cmd->add_option("--cluster-rel-tol", f.cluster_rel_tol, "Relative root-clustering tolerance")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--residual-tol", f.residual_tol, "Relative residual accepted for a solution")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--cap", f.cap, "Maximum number of solutions to enumerate")->check(CLI::PositiveNumber);
    cmd->add_flag("--truncate", f.truncate, "Enumerate up to --cap solutions instead of failing");
    cmd->add_option("--threads", f.threads, "Worker threads (default: QCOMM_THREADS or all cores)");
    cmd->add_option("--match-set", f.match_set, "Compare the solutions with a reference set, ignoring order");
    cmd->add_option("--match-tol", f.match_tol, "Tolerance for --match-set")->check(CLI::NonNegativeNumber);
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NumericalFailure:
        case ErrorCode::SingularMatrix:
        case ErrorCode::ZeroPolynomial:
        case ErrorCode::DegreeZero: return kExitNumerical;
        default: return kExitValidation;
    }
}

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Solve monic polynomial matrix equations in the commutant of a matrix with distinct eigenvalues",
                 "qcomm"};
    app.require_subcommand(1);

    SolveFlags solve_flags;
    CLI::App* solve_cmd = app.add_subcommand("solve", "Solve the equation in a problem file");
    solve_cmd->add_option("file", solve_flags.path, "Problem file")->required();
    add_solve_flags(solve_cmd, solve_flags);

    std::string check_problem, check_candidate;
    bool check_json = false;
    CLI::App* check_cmd = app.add_subcommand("check", "Check a candidate solution against a problem");
    check_cmd->add_option("problem", check_problem, "Problem file")->required();
    check_cmd->add_option("candidate", check_candidate, "Matrix file")->required();
    check_cmd->add_flag("--json", check_json, "Emit JSON");

    std::string repr_q, repr_a;
    bool repr_json = false;
    CLI::App* repr_cmd = app.add_subcommand("repr", "Representation polynomial of a member of C(Q)");
    repr_cmd->add_option("qfile", repr_q, "File with a \"q\" object")->required();
    repr_cmd->add_option("afile", repr_a, "Matrix file")->required();
    repr_cmd->add_flag("--json", repr_json, "Emit JSON");

    std::string diag_q;
    bool diag_json = false;
    CLI::App* diag_cmd = app.add_subcommand("diag", "Diagonalize Q and report conditioning");
    diag_cmd->add_option("qfile", diag_q, "File with a \"q\" object")->required();
    diag_cmd->add_flag("--json", diag_json, "Emit JSON");

    SolveFlags example_flags;
    CLI::App* example_cmd = app.add_subcommand("example", "Solve a built-in worked example");
    example_cmd->add_option("name", example_flags.path, "Example name")
        ->required()
        ->check(CLI::IsMember(builtin_names()));
    add_solve_flags(example_cmd, example_flags);
    example_cmd->add_flag("--problem", example_flags.print_problem, "Print the example as a problem file and exit");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*solve_cmd) return run_solve(load_problem(solve_flags.path), solve_flags, out);
        if (*check_cmd) return run_check(check_problem, check_candidate, check_json, out);
        if (*repr_cmd) return run_repr(repr_q, repr_a, repr_json, out, err);
        if (*diag_cmd) return run_diag(diag_q, diag_json, out);
        if (*example_cmd) return run_solve(builtin_problem(example_flags.path), example_flags, out);
    } catch (const Error& e) {
        err << fmt::format("error [{}]: {}\n", to_string(e.code()), e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << fmt::format("error: {}\n", e.what());
        return kExitNumerical;
    }
    return kExitValidation;
}

}  // namespace qcomm::cli
