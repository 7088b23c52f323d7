#include "fraxion/problem_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fraxion/p2_solver.hpp"

namespace fraxion {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_sig(double x, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, x);
    return buf;
}

/// Shortest round-trip decimal form, as used in machine output.
std::string format_full(double x) {
    return ordered_json(x).dump();
}

[[noreturn]] void bad(const std::string& msg) { throw ValidationError(msg); }

void reject_unknown_keys(const ordered_json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            bad("unknown field '" + it.key() + "' in " + where);
        }
    }
}

double get_number(const ordered_json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) bad("missing field '" + key + "' in " + where);
    const auto& v = obj.at(key);
    if (!v.is_number()) bad("field '" + key + "' in " + where + " must be a number");
    return v.get<double>();
}

std::int64_t get_integer(const ordered_json& obj, const std::string& key,
                         const std::string& where) {
    if (!obj.contains(key)) bad("missing field '" + key + "' in " + where);
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) bad("field '" + key + "' in " + where + " must be an integer");
    return v.get<std::int64_t>();
}

Radiosensitivity get_tissue(const ordered_json& obj, const std::string& key) {
    if (!obj.contains(key)) bad("missing field '" + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_object()) bad("field '" + key + "' must be an object with alpha and beta");
    reject_unknown_keys(v, {"alpha", "beta"}, "'" + key + "'");
    Radiosensitivity t{get_number(v, "alpha", key), get_number(v, "beta", key)};
    t.validate();
    return t;
}

ordered_json tissue_json(const Radiosensitivity& t) {
    return ordered_json{{"alpha", t.alpha}, {"beta", t.beta}};
}

ordered_json protocol_json(const Protocol& p) {
    ordered_json arr = ordered_json::array();
    for (const auto& g : p.groups()) {
        arr.push_back(ordered_json{{"count", g.count}, {"dose", g.dose}});
    }
    return arr;
}

const char* omega_sign(const Thresholds& t) {
    if (std::isnan(t.omega)) return ".";
    const double scale = std::max(1.0, std::abs(t.omega));
    if (std::abs(t.omega) <= num::kOmegaZeroTol * scale) return "0";
    return t.omega > 0.0 ? "+" : "-";
}

}  // namespace

const char* to_string(FileKind kind) {
    switch (kind) {
        case FileKind::p1: return "p1";
        case FileKind::p2: return "p2";
        case FileKind::p3: return "p3";
        case FileKind::bed: return "bed";
    }
    return "?";
}

ProblemFile parse_problem_file(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        bad(std::string("input is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) bad("the problem document must be a JSON object");
    if (!doc.contains("problem_kind") || !doc.at("problem_kind").is_string()) {
        bad("missing or non-string field 'problem_kind'");
    }
    const std::string kind = doc.at("problem_kind").get<std::string>();

    ProblemFile file;
    if (kind == "p1" || kind == "p2") {
        file.kind = kind == "p1" ? FileKind::p1 : FileKind::p2;
        reject_unknown_keys(doc, {"problem_kind", "tumor", "oar", "delta", "d_min", "d_max",
                                  "gamma"},
                            "the problem document");
        file.params.tumor = get_tissue(doc, "tumor");
        file.params.oar = get_tissue(doc, "oar");
        file.params.delta = get_number(doc, "delta", "the problem document");
        file.params.bounds.d_min = get_number(doc, "d_min", "the problem document");
        file.params.bounds.d_max = get_number(doc, "d_max", "the problem document");
        file.gamma = get_number(doc, "gamma", "the problem document");
        file.params.validate();
        num::require_finite(file.gamma, "gamma");
        if (file.gamma <= 0.0) bad("gamma must be strictly positive");
    } else if (kind == "p3") {
        file.kind = FileKind::p3;
        reject_unknown_keys(doc, {"problem_kind", "tumor", "d_min", "d_max", "gamma"},
                            "the problem document");
        file.equivalence.tumor = get_tissue(doc, "tumor");
        file.equivalence.bounds.d_min = get_number(doc, "d_min", "the problem document");
        file.equivalence.bounds.d_max = get_number(doc, "d_max", "the problem document");
        file.equivalence.target_effect = get_number(doc, "gamma", "the problem document");
        file.equivalence.validate();
    } else if (kind == "bed") {
        file.kind = FileKind::bed;
        reject_unknown_keys(doc, {"problem_kind", "tumor", "n", "d", "n_target", "d_min",
                                  "d_max"},
                            "the problem document");
        file.bed.tumor = get_tissue(doc, "tumor");
        file.bed.n = get_integer(doc, "n", "the problem document");
        file.bed.dose = get_number(doc, "d", "the problem document");
        file.bed.n_target = get_integer(doc, "n_target", "the problem document");
        if (file.bed.n < 1 || file.bed.n_target < 1) bad("fraction counts must be at least 1");
        num::require_finite(file.bed.dose, "d");
        if (file.bed.dose <= 0.0) bad("d must be strictly positive");
        if (doc.contains("d_min") != doc.contains("d_max")) {
            bad("d_min and d_max must be supplied together");
        }
        if (doc.contains("d_min")) {
            DoseBounds b{get_number(doc, "d_min", "the problem document"),
                         get_number(doc, "d_max", "the problem document")};
            b.validate();
            file.bed.bounds = b;
        }
    } else {
        bad("problem_kind must be one of p1, p2, p3, bed");
    }
    return file;
}

std::string serialize_problem_file(const ProblemFile& file) {
    ordered_json doc;
    doc["problem_kind"] = to_string(file.kind);
    switch (file.kind) {
        case FileKind::p1:
        case FileKind::p2:
            doc["tumor"] = tissue_json(file.params.tumor);
            doc["oar"] = tissue_json(file.params.oar);
            doc["delta"] = file.params.delta;
            doc["d_min"] = file.params.bounds.d_min;
            doc["d_max"] = file.params.bounds.d_max;
            doc["gamma"] = file.gamma;
            break;
        case FileKind::p3:
            doc["tumor"] = tissue_json(file.equivalence.tumor);
            doc["d_min"] = file.equivalence.bounds.d_min;
            doc["d_max"] = file.equivalence.bounds.d_max;
            doc["gamma"] = file.equivalence.target_effect;
            break;
        case FileKind::bed:
            doc["tumor"] = tissue_json(file.bed.tumor);
            doc["n"] = file.bed.n;
            doc["d"] = file.bed.dose;
            doc["n_target"] = file.bed.n_target;
            if (file.bed.bounds) {
                doc["d_min"] = file.bed.bounds->d_min;
                doc["d_max"] = file.bed.bounds->d_max;
            }
            break;
    }
    return doc.dump(2) + "\n";
}

std::string render_protocol(const Protocol& p, int precision) {
    std::string out;
    for (std::size_t i = 0; i < p.groups().size(); ++i) {
        if (i > 0) out += " + ";
        out += std::to_string(p.groups()[i].count);
        out += "×";
        out += format_sig(p.groups()[i].dose, precision);
    }
    out += " Gy";
    return out;
}

std::string render_report(const SolutionReport& report, const RenderOptions& options) {
    const bool is_p1 = report.kind == ProblemKind::p1;
    const bool is_p3 = report.kind == ProblemKind::p3;
    const double e_tumor = is_p1 ? report.objective_primary : report.objective_secondary;
    const double e_oar = is_p1 ? report.objective_secondary
                               : (is_p3 ? std::numeric_limits<double>::quiet_NaN()
                                        : report.objective_primary);

    if (options.machine) {
        ordered_json doc;
        doc["problem_kind"] = to_string(report.kind);
        doc["case"] = report.case_name();
        doc["n_opt"] = report.n_opt;
        doc["protocol"] = protocol_json(report.protocol);
        doc["total_dose"] = report.protocol.total_dose();
        doc["e_tumor"] = e_tumor;
        doc["e_oar"] = e_oar;  // NaN serializes as null for p3
        doc["objective_primary"] = report.objective_primary;
        doc["objective_secondary"] = report.objective_secondary;
        doc["constraint_active"] = report.constraint_active;
        doc["gamma"] = report.gamma;
        doc["thresholds"] = ordered_json{{"lambda", report.thresholds.lambda},
                                         {"rho", report.thresholds.rho},
                                         {"omega", report.thresholds.omega}};
        ordered_json alts = ordered_json::array();
        for (const auto& a : report.alternates) {
            alts.push_back(ordered_json{{"n", a.n}, {"protocol", protocol_json(a.protocol)}});
        }
        doc["alternates"] = alts;
        return doc.dump(2) + "\n";
    }

    const int prec = options.precision;
    std::ostringstream out;
    out << "problem       " << to_string(report.kind) << "\n";
    out << "case          " << report.case_name() << "\n";
    out << "fractions     " << report.n_opt << "\n";
    out << "protocol      " << render_protocol(report.protocol, prec) << "\n";
    out << "total dose    " << format_sig(report.protocol.total_dose(), prec) << " Gy\n";
    out << "tumor effect  " << format_sig(e_tumor, prec) << "\n";
    out << "oar effect    " << (is_p3 ? std::string("n/a") : format_sig(e_oar, prec)) << "\n";
    out << "gamma         " << format_sig(report.gamma, prec) << "\n";
    out << "constraint    " << (report.constraint_active ? "active" : "inactive") << "\n";
    out << "lambda        " << format_sig(report.thresholds.lambda, prec) << "\n";
    out << "rho           " << format_sig(report.thresholds.rho, prec) << "\n";
    out << "omega         "
        << (std::isnan(report.thresholds.omega) ? std::string("n/a")
                                                : format_sig(report.thresholds.omega, prec))
        << "\n";
    if (report.alternates.empty()) {
        out << "alternates    none\n";
    } else {
        out << "alternates    " << report.alternates.size() << "\n";
        for (const auto& a : report.alternates) {
            out << "  N=" << a.n << "  " << render_protocol(a.protocol, prec) << "\n";
        }
    }
    return out.str();
}

std::optional<SweepParam> parse_sweep_param(const std::string& name) {
    if (name == "gamma") return SweepParam::gamma;
    if (name == "delta") return SweepParam::delta;
    if (name == "alpha_t") return SweepParam::alpha_t;
    if (name == "beta_t") return SweepParam::beta_t;
    if (name == "alpha_0") return SweepParam::alpha_0;
    if (name == "beta_0") return SweepParam::beta_0;
    if (name == "d_min") return SweepParam::d_min;
    if (name == "d_max") return SweepParam::d_max;
    return std::nullopt;
}

const char* to_string(SweepParam p) {
    switch (p) {
        case SweepParam::gamma: return "gamma";
        case SweepParam::delta: return "delta";
        case SweepParam::alpha_t: return "alpha_t";
        case SweepParam::beta_t: return "beta_t";
        case SweepParam::alpha_0: return "alpha_0";
        case SweepParam::beta_0: return "beta_0";
        case SweepParam::d_min: return "d_min";
        case SweepParam::d_max: return "d_max";
    }
    return "?";
}

void SweepSpec::validate() const {
    num::require_finite(start, "start");
    num::require_finite(stop, "stop");
    if (!(start < stop)) throw ValidationError("sweep start must be strictly below stop");
    if (steps < 2) throw ValidationError("a sweep needs at least 2 steps");
}

namespace {

ProblemFile with_param(const ProblemFile& base, SweepParam param, double value) {
    ProblemFile f = base;
    const bool is_p3 = base.kind == FileKind::p3;
    ProblemParams* params = is_p3 ? nullptr : &f.params;
    switch (param) {
        case SweepParam::gamma:
            if (is_p3) f.equivalence.target_effect = value;
            else f.gamma = value;
            return f;
        case SweepParam::alpha_t:
            if (is_p3) f.equivalence.tumor.alpha = value;
            else params->tumor.alpha = value;
            return f;
        case SweepParam::beta_t:
            if (is_p3) f.equivalence.tumor.beta = value;
            else params->tumor.beta = value;
            return f;
        case SweepParam::d_min:
            if (is_p3) f.equivalence.bounds.d_min = value;
            else params->bounds.d_min = value;
            return f;
        case SweepParam::d_max:
            if (is_p3) f.equivalence.bounds.d_max = value;
            else params->bounds.d_max = value;
            return f;
        case SweepParam::delta:
        case SweepParam::alpha_0:
        case SweepParam::beta_0:
            if (is_p3) {
                throw ValidationError("this problem kind has no OAR parameters to sweep");
            }
            if (param == SweepParam::delta) params->delta = value;
            else if (param == SweepParam::alpha_0) params->oar.alpha = value;
            else params->oar.beta = value;
            return f;
    }
    throw ValidationError("unknown sweep parameter");
}

}  // namespace

SolutionReport solve_problem_file(const ProblemFile& file, const SolverOptions& options) {
    switch (file.kind) {
        case FileKind::p1: return solve_p1(file.params, file.gamma, options);
        case FileKind::p2: return solve_p2(file.params, file.gamma, options);
        case FileKind::p3: return min_total_dose(file.equivalence);
        case FileKind::bed:
            throw ValidationError("conversion inputs are handled by the bed command");
    }
    throw ValidationError("unknown problem kind");
}

std::vector<SweepRow> run_sweep(const ProblemFile& file, const SweepSpec& spec,
                                const SolverOptions& options) {
    spec.validate();
    if (file.kind == FileKind::bed) {
        throw ValidationError("sweeps apply to p1, p2 and p3 problems only");
    }
    std::vector<SweepRow> rows;
    rows.reserve(static_cast<std::size_t>(spec.steps));
    for (std::int64_t i = 0; i < spec.steps; ++i) {
        const double value = spec.start + (spec.stop - spec.start) * static_cast<double>(i) /
                                              static_cast<double>(spec.steps - 1);
        ProblemFile varied = with_param(file, spec.param, value);
        SweepRow row;
        row.value = value;
        try {
            row.report = solve_problem_file(varied, options);
            row.status = "ok";
        } catch (const InfeasibleError&) {
            row.status = "infeasible";
        } catch (const InfeasibleNError&) {
            row.status = "infeasible";
        } catch (const CapExceededError&) {
            row.status = "cap_exceeded";
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string render_sweep(const std::vector<SweepRow>& rows, const SweepSpec& spec,
                         const RenderOptions& options) {
    const auto fmt = [&](double x) {
        return options.machine ? format_full(x) : format_sig(x, options.precision);
    };
    std::ostringstream out;
    out << to_string(spec.param)
        << "\tstatus\tn_opt\tcase\te_tumor\te_oar\tobjective_primary\tobjective_secondary\t"
           "omega_sign\n";
    bool non_decreasing = true;
    bool non_increasing = true;
    std::optional<std::int64_t> prev_n;
    for (const auto& row : rows) {
        out << fmt(row.value) << "\t" << row.status << "\t";
        if (row.report) {
            const SolutionReport& r = *row.report;
            const bool is_p1 = r.kind == ProblemKind::p1;
            const bool is_p3 = r.kind == ProblemKind::p3;
            const double e_tumor = is_p1 ? r.objective_primary : r.objective_secondary;
            const double e_oar = is_p1 ? r.objective_secondary
                                       : (is_p3 ? std::numeric_limits<double>::quiet_NaN()
                                                : r.objective_primary);
            out << r.n_opt << "\t" << r.case_name() << "\t" << fmt(e_tumor) << "\t"
                << (is_p3 ? "NA" : fmt(e_oar)) << "\t" << fmt(r.objective_primary) << "\t"
                << fmt(r.objective_secondary) << "\t" << omega_sign(r.thresholds) << "\n";
            if (prev_n) {
                if (r.n_opt < *prev_n) non_decreasing = false;
                if (r.n_opt > *prev_n) non_increasing = false;
            }
            prev_n = r.n_opt;
        } else {
            out << "NA\t" << (row.status == "infeasible" ? "Infeasible" : "NA")
                << "\tNA\tNA\tNA\tNA\tNA\n";
        }
    }
    const char* verdict = "none";
    if (non_decreasing && non_increasing) verdict = "constant";
    else if (non_decreasing) verdict = "non-decreasing";
    else if (non_increasing) verdict = "non-increasing";
    out << "# n_opt monotonic: " << verdict << "\n";
    return out.str();
}

}  // namespace fraxion
