// indefsl: eigenvalue counting and verification for singular indefinite
// Sturm-Liouville problems on the line.
//
// Subcommands: count, eigenvalues, trace, verify, bands, oracle.
// Reports are JSON on stdout; traces are CSV. Exit codes: 0 success/holds,
// 1 usage or numeric error, 2 a checked statement is violated,
// 3 inconclusive numerics.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "indefsl/coefficients.hpp"
#include "indefsl/common.hpp"
#include "indefsl/matching.hpp"
#include "indefsl/oracle.hpp"
#include "indefsl/periodic.hpp"
#include "indefsl/presets.hpp"
#include "indefsl/spectral_count.hpp"
#include "indefsl/theorems.hpp"
#include "indefsl/weyl.hpp"

using nlohmann::json;
using namespace indefsl;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json manifest(const std::string& subcommand, const IndefiniteProblem& prob, json flags) {
    return {{"subcommand", subcommand},
            {"problem_digest", prob.digest()},
            {"flags", std::move(flags)},
            {"version", kVersion},
            {"schema_version", 1}};
}

json enclosures_json(const std::vector<Enclosure>& encs) {
    json arr = json::array();
    for (const Enclosure& e : encs)
        arr.push_back({{"value", e.mid()},
                       {"value_str", num17(e.mid())},
                       {"radius", e.radius()},
                       {"lo", e.lo},
                       {"hi", e.hi}});
    return arr;
}

json count_report_json(const CountReport& rep) {
    json j{{"operator", rep.op},
           {"interval", {rep.a, rep.b}},
           {"count", rep.count},
           {"count_is_lower_bound", !rep.exact},
           {"eigenvalues", enclosures_json(rep.eigenvalues)},
           {"truncation", {{"x_used", rep.x_used}, {"converged", rep.converged}}}};
    if (!rep.extra.is_null()) j["detail"] = rep.extra;
    return j;
}

IndefiniteProblem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open problem file '" + path + "'");
    json doc;
    in >> doc;
    return build_problem(doc);
}

std::pair<double, double> parse_interval(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos)
        throw ParseError("interval must be 'a,b', got '" + s + "'");
    const double a = std::stod(s.substr(0, comma));
    const double b = std::stod(s.substr(comma + 1));
    if (!(a < b)) throw ParseError("interval needs a < b");
    return {a, b};
}

int verdict_exit(Verdict v) {
    switch (v) {
        case Verdict::holds: return 0;
        case Verdict::violated: return 2;
        case Verdict::inconclusive: return 3;
    }
    return 1;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

void emit(json out, const Timer& timer) {
    out["timing_ms"] = timer.ms();
    std::cout << out.dump(2) << "\n";
}

CountReport combined_count(const WeylSolver& solver, const std::string& op, double a, double b,
                           double tol) {
    ScanOptions opt;
    opt.zero_tol = tol;
    opt.pole_tol = tol;
    if (op == "A") return eigenvalues_A(solver, a, b, opt);
    if (op == "JA") return eigenvalues_JA(solver, std::max(a, 0.0), b, opt);
    if (op == "Bplus") return count_report(solver, {Side::plus, +1}, a, b, tol);
    if (op == "Bminusneg") return count_report(solver, {Side::minus, -1}, a, b, tol);
    if (op == "B") {
        CountReport rp = count_report(solver, {Side::plus, +1}, a, b, tol);
        CountReport rm = count_report(solver, {Side::minus, +1}, a, b, tol);
        CountReport rep;
        rep.op = "B";
        rep.a = a;
        rep.b = b;
        rep.count = rp.count + rm.count;
        rep.exact = rp.exact && rm.exact;
        rep.converged = rp.converged && rm.converged;
        rep.x_used = std::max(rp.x_used, rm.x_used);
        rep.eigenvalues = rp.eigenvalues;
        rep.eigenvalues.insert(rep.eigenvalues.end(), rm.eigenvalues.begin(), rm.eigenvalues.end());
        std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
                  [](const Enclosure& x, const Enclosure& y) { return x.lo < y.lo; });
        rep.extra = {{"n_Bplus", rp.count}, {"n_Bminus", rm.count}};
        return rep;
    }
    if (op == "JB") {
        // symmetric-union semantics: B+ in (a,b), -B- in (-b,-a)
        CountReport rp = count_report(solver, {Side::plus, +1}, std::max(a, 0.0), b, tol);
        CountReport rm = count_report(solver, {Side::minus, -1}, -b, -std::max(a, 0.0), tol);
        CountReport rep;
        rep.op = "JB";
        rep.a = a;
        rep.b = b;
        rep.count = rp.count + rm.count;
        rep.exact = rp.exact && rm.exact;
        rep.converged = rp.converged && rm.converged;
        rep.x_used = std::max(rp.x_used, rm.x_used);
        rep.eigenvalues = rm.eigenvalues;
        rep.eigenvalues.insert(rep.eigenvalues.end(), rp.eigenvalues.begin(), rp.eigenvalues.end());
        rep.extra = {{"n_Bplus", rp.count}, {"n_BminusNeg", rm.count}};
        return rep;
    }
    throw ParseError("unknown operator '" + op + "'");
}

TheoremReport run_theorem(const WeylSolver& solver, const std::string& name, double a, double b,
                          long N) {
    if (name == "thm41") return verify_count_estimate(solver, a, b);
    if (name == "lemma22iv") return verify_rank_one_perturbation(solver, a, b);
    if (name == "thm44") return verify_symmetric_halving(solver, a, b);
    if (name == "interlace") return verify_interlacing_with_A(solver, a, b);
    if (name == "accumulate") return verify_accumulation(solver, a, b, N);
    if (name == "gap") return verify_gap(solver);
    throw ParseError("unknown theorem tag '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"eigenvalue counts and verification for indefinite Sturm-Liouville operators"};
    app.require_subcommand(1);

    std::string problem_path, interval_str, operator_name = "JA", out_path;
    double tol = 1e-6;
    long n_threshold = 20;

    auto add_problem_flag = [&](CLI::App* sub) {
        sub->add_option("--problem", problem_path, "problem definition JSON")->required();
    };

    CLI::App* cmd_count = app.add_subcommand("count", "count eigenvalues in an interval");
    add_problem_flag(cmd_count);
    cmd_count->add_option("--operator", operator_name, "A|JA|Bplus|Bminusneg|B|JB");
    cmd_count->add_option("--interval", interval_str, "a,b")->required();
    cmd_count->add_option("--tol", tol, "enclosure tolerance");

    CLI::App* cmd_eigs = app.add_subcommand("eigenvalues", "locate eigenvalues of A or JA");
    add_problem_flag(cmd_eigs);
    cmd_eigs->add_option("--operator", operator_name, "A|JA");
    cmd_eigs->add_option("--interval", interval_str, "a,b")->required();
    cmd_eigs->add_option("--tol", tol, "enclosure tolerance");

    CLI::App* cmd_trace = app.add_subcommand("trace", "CSV trace of the Weyl/matching functions");
    add_problem_flag(cmd_trace);
    cmd_trace->add_option("--interval", interval_str, "a,b")->required();
    int trace_points = 200;
    cmd_trace->add_option("--points", trace_points, "grid points");
    cmd_trace->add_option("--out", out_path, "output CSV path (default stdout)");
    double ode_lambda = 0.0;
    bool ode_dump = false;
    std::string ode_side = "plus";
    cmd_trace->add_flag("--ode", ode_dump, "dump the raw (x,u,v,theta) solver trace instead");
    cmd_trace->add_option("--ode-lambda", ode_lambda, "spectral parameter for --ode");
    cmd_trace->add_option("--ode-side", ode_side, "plus|minus for --ode");

    CLI::App* cmd_verify = app.add_subcommand("verify", "run a spectral check");
    add_problem_flag(cmd_verify);
    std::string theorem_name;
    bool verify_all = false;
    cmd_verify->add_option("--theorem", theorem_name,
                           "thm41|lemma22iv|thm44|interlace|accumulate|gap");
    cmd_verify->add_option("--interval", interval_str, "a,b");
    cmd_verify->add_option("--N", n_threshold, "threshold for accumulate");
    cmd_verify->add_flag("--all", verify_all, "run the seeded regression suite (CSV summary)");

    CLI::App* cmd_bands = app.add_subcommand("bands", "Floquet band structure");
    add_problem_flag(cmd_bands);
    double lambda_max = 100.0;
    int max_gaps = 4;
    bool do_audit = false;
    cmd_bands->add_option("--lambda-max", lambda_max, "upper end of the scan");
    cmd_bands->add_option("--max-gaps", max_gaps, "stop after this many gaps");
    cmd_bands->add_option("--trace-csv", out_path, "write (lambda, Delta) samples here");
    cmd_bands->add_flag("--audit", do_audit, "also count JA eigenvalues in each gap");

    CLI::App* cmd_oracle = app.add_subcommand("oracle", "finite-difference cross-check");
    add_problem_flag(cmd_oracle);
    cmd_oracle->add_option("--operator", operator_name, "A|JA|Bplus|Bminus|Bminusneg|B|JB");
    cmd_oracle->add_option("--interval", interval_str, "a,b")->required();
    int grid_n = 4000;
    double cutoff_X = 30.0;
    cmd_oracle->add_option("--grid", grid_n, "interior grid points");
    cmd_oracle->add_option("--cutoff", cutoff_X, "Dirichlet cutoff half-width");

    CLI11_PARSE(app, argc, argv);

    Timer timer;
    try {
        if (cmd_count->parsed() || cmd_eigs->parsed()) {
            const bool eig_mode = cmd_eigs->parsed();
            if (eig_mode && operator_name != "A" && operator_name != "JA")
                throw ParseError("eigenvalues supports --operator A or JA");
            IndefiniteProblem prob = load_problem(problem_path);
            WeylSolver solver(prob);
            auto [a, b] = parse_interval(interval_str);
            CountReport rep = combined_count(solver, operator_name, a, b, tol);
            json out = count_report_json(rep);
            out["manifest"] = manifest(eig_mode ? "eigenvalues" : "count", prob,
                                       {{"operator", operator_name},
                                        {"interval", {a, b}},
                                        {"tol", tol}});
            emit(out, timer);
            return 0;
        }

        if (cmd_trace->parsed()) {
            IndefiniteProblem prob = load_problem(problem_path);
            auto [a, b] = parse_interval(interval_str);
            std::ostringstream csv;
            if (ode_dump) {
                const Side side = (ode_side == "minus") ? Side::minus : Side::plus;
                csv << "x,u,v,theta\n";
                integrate(prob, side, +1, ode_lambda, SLState{prob.c, 0.0, 1.0},
                          std::fabs(b - a), {},
                          [&](double x, double u, double v, double th) {
                              csv << num17(x) << "," << num17(u) << "," << num17(v) << ","
                                  << num17(th) << "\n";
                          });
            } else {
                WeylSolver solver(prob);
                csv << "lambda,theta_plus,m_plus,theta_minus_reflected,D,M,delta\n";
                for (int i = 0; i <= trace_points; ++i) {
                    const double lam = a + (b - a) * i / trace_points;
                    const auto pp = solver.m_plus(lam);
                    const auto pm = solver.m_minus(lam);
                    const MatchValue mv = eval_matching(solver, MatchingKind::M_for_JA, lam);
                    csv << num17(lam) << "," << num17(pp.theta) << "," << num17(pp.scalar()) << ","
                        << num17(mod_pi(pi - pm.theta)) << ","
                        << num17(pp.scalar() - pm.scalar()) << "," << num17(mv.value) << ","
                        << num17(mv.delta) << "\n";
                }
            }
            if (out_path.empty()) {
                std::cout << csv.str();
            } else {
                std::ofstream out(out_path);
                out << csv.str();
                std::cout << json{{"written", out_path}}.dump(2) << "\n";
            }
            return 0;
        }

        if (cmd_verify->parsed()) {
            IndefiniteProblem prob = load_problem(problem_path);
            WeylSolver solver(prob);
            if (verify_all) {
                // per-problem entry of the seeded suite is exercised through
                // the acceptance tests; --all here reruns this problem's
                // applicable checks and prints a CSV summary line per check
                auto [a, b] = interval_str.empty()
                                  ? std::pair<double, double>(
                                        0.0, prob.ess.lower_gap_top().value_or(1.0))
                                  : parse_interval(interval_str);
                std::vector<TheoremReport> reps;
                reps.push_back(verify_count_estimate(solver, a, b));
                reps.push_back(verify_rank_one_perturbation(solver, a, b));
                if (prob.symmetric) {
                    reps.push_back(verify_symmetric_halving(solver, a, b));
                    reps.push_back(verify_interlacing_with_A(solver, a, b));
                }
                reps.push_back(verify_gap(solver));
                std::cout << "theorem,interval_lo,interval_hi,verdict,reason\n";
                int exit_code = 0;
                for (const auto& r : reps) {
                    std::cout << r.id << "," << num17(r.a) << "," << num17(r.b) << ","
                              << to_string(r.verdict) << ",\"" << r.reason << "\"\n";
                    exit_code = std::max(exit_code, verdict_exit(r.verdict));
                }
                return exit_code;
            }
            if (theorem_name.empty()) throw ParseError("verify needs --theorem or --all");
            double a = 0.0, b = 0.0;
            if (!interval_str.empty()) {
                auto ab = parse_interval(interval_str);
                a = ab.first;
                b = ab.second;
            } else if (theorem_name != "gap") {
                throw ParseError("verify --theorem " + theorem_name + " needs --interval");
            }
            TheoremReport rep = run_theorem(solver, theorem_name, a, b, n_threshold);
            json out = to_json(rep);
            out["manifest"] = manifest("verify", prob,
                                       {{"theorem", theorem_name},
                                        {"interval", {a, b}},
                                        {"N", n_threshold}});
            emit(out, timer);
            return verdict_exit(rep.verdict);
        }

        if (cmd_bands->parsed()) {
            IndefiniteProblem prob = load_problem(problem_path);
            BandOptions bopt;
            bopt.max_gaps = max_gaps;
            const BandStructure bs = band_edges(prob, lambda_max, bopt);
            json edges = json::array();
            for (const BandEdge& e : bs.edges)
                edges.push_back({{"lambda", e.lambda},
                                 {"lambda_str", num17(e.lambda)},
                                 {"type", e.antiperiodic ? "antiperiodic" : "periodic"},
                                 {"double_root", e.double_root},
                                 {"discriminant", e.delta_value}});
            json out{{"edges", edges},
                     {"bands", bs.bands},
                     {"gaps", bs.gaps},
                     {"lambda_max", bs.lambda_max},
                     {"max_det_defect", bs.max_det_defect}};
            if (do_audit) {
                WeylSolver solver(prob);
                json audits = json::array();
                for (const TheoremReport& r : audit_gaps_JA(solver, bs)) audits.push_back(to_json(r));
                out["audit"] = audits;
            }
            out["manifest"] = manifest("bands", prob,
                                       {{"lambda_max", lambda_max}, {"max_gaps", max_gaps}});
            if (!out_path.empty()) {
                std::ofstream csv(out_path);
                csv << "lambda,Delta\n";
                for (int i = 0; i <= 2000; ++i) {
                    const double lam = lambda_max * i / 2000;
                    csv << num17(lam) << "," << num17(period_map(prob, lam, prob.c).trace())
                        << "\n";
                }
                out["trace_csv"] = out_path;
            }
            emit(out, timer);
            return 0;
        }

        if (cmd_oracle->parsed()) {
            IndefiniteProblem prob = load_problem(problem_path);
            auto [a, b] = parse_interval(interval_str);
            const CountReport rep =
                oracle_counts(prob, oracle_op_from_tag(operator_name == "Bminusneg" ? "BminusNeg"
                                                                                    : operator_name),
                              a, b, cutoff_X, grid_n);
            json out = count_report_json(rep);
            out["manifest"] = manifest("oracle", prob,
                                       {{"operator", operator_name},
                                        {"interval", {a, b}},
                                        {"grid", grid_n},
                                        {"cutoff", cutoff_X}});
            emit(out, timer);
            return 0;
        }
    } catch (const Error& e) {
        std::cout << json{{"error", {{"type", "numeric"}, {"message", e.what()}}}}.dump(2) << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cout << json{{"error", {{"type", "usage"}, {"message", e.what()}}}}.dump(2) << "\n";
        return 1;
    }
    return 1;
}
