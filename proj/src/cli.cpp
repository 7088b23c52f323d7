#include "fraxion/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fraxion/equivalence.hpp"
#include "fraxion/oracle.hpp"
#include "fraxion/p1_solver.hpp"
#include "fraxion/p2_solver.hpp"
#include "fraxion/problem_io.hpp"

namespace fraxion {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open input file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

SolverOptions options_from_env() {
    SolverOptions options;
    if (const char* cap = std::getenv("FRAXION_N_CAP")) {
        char* end = nullptr;
        const double value = std::strtod(cap, &end);
        if (end == cap || *end != '\0' || !std::isfinite(value) || value < 1.0) {
            throw ValidationError("FRAXION_N_CAP must be a finite number >= 1");
        }
        options.n_cap = value;
    }
    return options;
}

std::string format_sig(double x, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, x);
    return buf;
}

struct CommonFlags {
    std::string input;
    std::string format = "human";
    int precision = 6;

    RenderOptions render() const { return RenderOptions{format == "machine", precision}; }
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--input", flags.input, "problem file (JSON)")->required();
    cmd->add_option("--format", flags.format, "output format")
        ->check(CLI::IsMember({"human", "machine"}))
        ->capture_default_str();
    cmd->add_option("--precision", flags.precision, "significant digits in human output")
        ->check(CLI::Range(1, 17))
        ->capture_default_str();
}

int cmd_solve(const CommonFlags& flags, std::ostream& out) {
    const ProblemFile file = parse_problem_file(read_file(flags.input));
    const SolutionReport report = solve_problem_file(file, options_from_env());
    out << render_report(report, flags.render());
    return kExitOk;
}

int cmd_sweep(const CommonFlags& flags, const SweepSpec& spec, std::ostream& out) {
    const ProblemFile file = parse_problem_file(read_file(flags.input));
    const auto rows = run_sweep(file, spec, options_from_env());
    out << render_sweep(rows, spec, flags.render());
    return kExitOk;
}

int cmd_bed(const CommonFlags& flags, std::ostream& out) {
    const ProblemFile file = parse_problem_file(read_file(flags.input));
    if (file.kind != FileKind::bed) {
        throw ValidationError("the bed command needs a problem_kind=bed input");
    }
    const BedQuery& q = file.bed;
    const double converted = bed_uniform(q.tumor, q.n, q.dose, q.n_target);
    const double source_effect = static_cast<double>(q.n) * phi(q.tumor, 1.0, q.dose);
    const double converted_effect =
        static_cast<double>(q.n_target) * phi(q.tumor, 1.0, converted);
    std::optional<bool> within;
    if (q.bounds) {
        within = converted >= q.bounds->d_min && converted <= q.bounds->d_max;
    }

    if (flags.format == "machine") {
        ordered_json doc;
        doc["problem_kind"] = "bed";
        doc["source"] = ordered_json{{"n", q.n}, {"dose", q.dose}, {"effect", source_effect}};
        doc["converted"] = ordered_json{
            {"n", q.n_target}, {"dose", converted}, {"effect", converted_effect}};
        doc["within_bounds"] = within ? ordered_json(*within) : ordered_json(nullptr);
        out << doc.dump(2) << "\n";
    } else {
        const int prec = flags.precision;
        out << "source        " << q.n << "×" << format_sig(q.dose, prec)
            << " Gy  (effect " << format_sig(source_effect, prec) << ")\n";
        out << "converted     " << q.n_target << "×" << format_sig(converted, prec)
            << " Gy  (effect " << format_sig(converted_effect, prec) << ")\n";
        out << "within bounds "
            << (within ? (*within ? "yes" : "no") : "n/a") << "\n";
    }
    return kExitOk;
}

struct VerifyFlags {
    double oracle_step = 1e-3;
    std::int64_t oracle_max_n = 6;
    double tamper_factor = 0.0;  // 0 = untouched
};

int cmd_verify(const CommonFlags& flags, const VerifyFlags& vf, std::ostream& out) {
    const ProblemFile file = parse_problem_file(read_file(flags.input));
    if (file.kind != FileKind::p1 && file.kind != FileKind::p2) {
        throw ValidationError("verification applies to p1 and p2 problems");
    }
    SolutionReport report = solve_problem_file(file, options_from_env());
    if (vf.tamper_factor != 0.0) {
        if (!(vf.tamper_factor > 0.0) || !std::isfinite(vf.tamper_factor)) {
            throw ValidationError("--tamper-doses must be a positive factor");
        }
        std::vector<DoseGroup> groups = report.protocol.groups();
        for (auto& g : groups) g.dose *= vf.tamper_factor;
        report.protocol = Protocol::from_groups(std::move(groups));
    }

    OracleInstance instance;
    instance.kind = file.kind == FileKind::p1 ? ProblemKind::p1 : ProblemKind::p2;
    instance.params = file.params;
    instance.gamma = file.gamma;

    const VerifyDiagnostics diag = verify(report, instance, vf.oracle_step);
    std::vector<std::string> failures = diag.failures;

    // Exhaustive cross-check over as much of the feasible count range as
    // the cutoff and the evaluation budget allow.
    const std::int64_t top = instance.kind == ProblemKind::p1
                                 ? num::floor_snapped(report.thresholds.rho)
                                 : num::ceil_snapped(report.thresholds.rho);
    OracleConfig cfg;
    cfg.grid_step = vf.oracle_step;
    cfg.max_exhaustive_n = vf.oracle_max_n;
    const std::uint64_t grid_points = dose_grid(instance.params.bounds, cfg.grid_step).size();
    std::int64_t scan_top = 0;
    std::uint64_t planned = 0;
    for (std::int64_t n = 1; n <= std::min(top, vf.oracle_max_n); ++n) {
        const std::uint64_t c = multiset_count(grid_points, static_cast<std::uint64_t>(n));
        if (planned + c > cfg.max_evaluations) break;
        planned += c;
        scan_top = n;
    }
    std::optional<OracleResult> oracle;
    double gap_bound = 0.0;
    if (scan_top >= 1) {
        cfg.n_min = 1;
        cfg.n_max = scan_top;
        try {
            oracle = oracle_solve(instance, cfg, report.objective_primary);
            const double scale = std::max(1.0, std::abs(report.objective_primary));
            if (oracle->gap_vs_analytic < -num::kFeasibilityTol * scale) {
                failures.push_back("exhaustive search found a strictly better schedule");
            }
            if (scan_top >= report.n_opt) {
                gap_bound = lipschitz_gap_bound(instance, report.n_opt, cfg.grid_step);
                if (oracle->gap_vs_analytic > gap_bound) {
                    failures.push_back("exhaustive search trails the analytic objective by "
                                       "more than the grid bound");
                }
            }
        } catch (const NoFeasibleGridPointError&) {
            failures.push_back("grid too coarse to reproduce any feasible schedule");
        }
    }
    const bool pass = failures.empty();

    if (flags.format == "machine") {
        ordered_json doc;
        doc["problem_kind"] = to_string(file.kind);
        doc["case"] = report.case_name();
        doc["n_opt"] = report.n_opt;
        doc["objective_primary"] = report.objective_primary;
        doc["diagnostics"] = ordered_json{
            {"bounds_ok", diag.bounds_ok},
            {"feasible", diag.feasible},
            {"constraint_value", diag.constraint_value},
            {"constraint_slack", diag.constraint_slack},
            {"window_requires_active", diag.window_requires_active},
            {"activity_ok", diag.activity_ok},
            {"locally_optimal", diag.locally_optimal},
        };
        if (oracle) {
            doc["oracle"] = ordered_json{{"scanned_n_max", scan_top},
                                         {"best_n", oracle->best_n},
                                         {"best_objective", oracle->best_objective},
                                         {"gap_vs_analytic", oracle->gap_vs_analytic},
                                         {"gap_bound", gap_bound},
                                         {"evaluations", oracle->evaluations}};
        } else {
            doc["oracle"] = nullptr;
        }
        ordered_json fail = ordered_json::array();
        for (const auto& f : failures) fail.push_back(f);
        doc["failures"] = fail;
        doc["pass"] = pass;
        out << doc.dump(2) << "\n";
    } else {
        const int prec = flags.precision;
        out << "case             " << report.case_name() << "\n";
        out << "fractions        " << report.n_opt << "\n";
        out << "bounds ok        " << (diag.bounds_ok ? "yes" : "no") << "\n";
        out << "feasible         " << (diag.feasible ? "yes" : "no") << "\n";
        out << "constraint slack " << format_sig(diag.constraint_slack, prec) << "\n";
        out << "activity ok      " << (diag.activity_ok ? "yes" : "no") << "\n";
        out << "locally optimal  " << (diag.locally_optimal ? "yes" : "no") << "\n";
        if (oracle) {
            out << "oracle best      N=" << oracle->best_n << " of scanned [1, " << scan_top
                << "]  objective " << format_sig(oracle->best_objective, prec) << "  gap "
                << format_sig(oracle->gap_vs_analytic, prec) << " (bound "
                << format_sig(gap_bound, prec) << ", " << oracle->evaluations
                << " evaluations)\n";
        } else {
            out << "oracle best      skipped (count range beyond budget)\n";
        }
        for (const auto& f : failures) out << "failure          " << f << "\n";
        out << "verdict          " << (pass ? "pass" : "fail") << "\n";
    }
    return pass ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal radiotherapy fractionation schedules under the "
                 "linear-quadratic model"};
    app.require_subcommand(1);

    CommonFlags solve_flags;
    CLI::App* solve = app.add_subcommand("solve", "solve one problem file");
    add_common(solve, solve_flags);

    CommonFlags sweep_flags;
    std::string sweep_param;
    SweepSpec spec;
    CLI::App* sweep = app.add_subcommand("sweep", "solve across one varied parameter");
    add_common(sweep, sweep_flags);
    sweep->add_option("--sweep-param", sweep_param, "parameter to vary")->required();
    sweep->add_option("--start", spec.start, "first value")->required();
    sweep->add_option("--stop", spec.stop, "last value")->required();
    sweep->add_option("--steps", spec.steps, "number of values")->required();

    CommonFlags verify_flags;
    VerifyFlags vf;
    CLI::App* verify_cmd = app.add_subcommand("verify", "solve, then cross-check the solution");
    add_common(verify_cmd, verify_flags);
    verify_cmd->add_option("--oracle-step", vf.oracle_step, "grid step for checks")
        ->capture_default_str();
    verify_cmd->add_option("--oracle-max-n", vf.oracle_max_n, "exhaustive-search cutoff")
        ->capture_default_str();
    verify_cmd->add_option("--tamper-doses", vf.tamper_factor,
                           "scale all doses before checking (for exercising failures)");

    CommonFlags bed_flags;
    CLI::App* bed = app.add_subcommand("bed", "uniform-schedule dose conversion");
    add_common(bed, bed_flags);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        if (solve->parsed()) return cmd_solve(solve_flags, out);
        if (sweep->parsed()) {
            const auto param = parse_sweep_param(sweep_param);
            if (!param) throw ValidationError("unknown sweep parameter: " + sweep_param);
            spec.param = *param;
            return cmd_sweep(sweep_flags, spec, out);
        }
        if (verify_cmd->parsed()) return cmd_verify(verify_flags, vf, out);
        if (bed->parsed()) return cmd_bed(bed_flags, out);
        err << "error: no command selected\n";
        return kExitValidation;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const InfeasibleNError& e) {
        err << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitValidation;
    } catch (const CapExceededError& e) {
        err << "refused: " << e.what() << "\n";
        return kExitValidation;
    } catch (const TooLargeError& e) {
        err << "refused: " << e.what() << "\n";
        return kExitValidation;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}

}  // namespace fraxion
