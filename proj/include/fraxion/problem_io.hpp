#pragma once

/**
 * @file problem_io.hpp
 * @brief Problem files in, rendered reports and sweep tables out.
 *
 * A problem file is a single JSON document, one key per symbol: doses in
 * Gy, rates in 1/Gy and 1/Gy^2. Unknown fields are rejected. Machine
 * output is a JSON document with a schema that does not depend on the
 * case tag; sweep output is tab-delimited rows under a header line.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fraxion/equivalence.hpp"
#include "fraxion/p1_solver.hpp"
#include "fraxion/radiobiology.hpp"
#include "fraxion/solution_report.hpp"

namespace fraxion {

enum class FileKind { p1, p2, p3, bed };

const char* to_string(FileKind kind);

/// Uniform-schedule conversion request (kind = bed). Bounds are optional
/// and only drive the within-window flag in the rendered result.
struct BedQuery {
    Radiosensitivity tumor;
    std::int64_t n{0};
    double dose{0.0};
    std::int64_t n_target{0};
    std::optional<DoseBounds> bounds;
};

/// Parsed problem file. Exactly one of the payloads below is meaningful,
/// selected by `kind`.
struct ProblemFile {
    FileKind kind{FileKind::p1};
    ProblemParams params;          // p1, p2
    double gamma{0.0};             // p1, p2
    EquivalenceQuery equivalence;  // p3
    BedQuery bed;                  // bed
};

/// Parses and validates one problem document. Unknown fields, missing
/// fields, wrong types, and invalid values all raise ValidationError.
ProblemFile parse_problem_file(const std::string& text);

/// Canonical serialization: fixed field order, two-space indent, trailing
/// newline. parse -> serialize is byte-identical for canonical files.
std::string serialize_problem_file(const ProblemFile& file);

struct RenderOptions {
    bool machine = false;
    int precision = 6;  ///< significant digits in human output; machine output is full precision
};

/// Run-length protocol rendering, e.g. "1×1 + 1×5.58849 + 6×6 Gy".
std::string render_protocol(const Protocol& p, int precision);

/// One solve result in the selected format.
std::string render_report(const SolutionReport& report, const RenderOptions& options);

/// Parameters a sweep may vary.
enum class SweepParam { gamma, delta, alpha_t, beta_t, alpha_0, beta_0, d_min, d_max };

std::optional<SweepParam> parse_sweep_param(const std::string& name);
const char* to_string(SweepParam p);

struct SweepSpec {
    SweepParam param{SweepParam::gamma};
    double start{0.0};
    double stop{0.0};
    std::int64_t steps{0};

    /// Requires start < stop and steps >= 2.
    void validate() const;
};

struct SweepRow {
    double value{0.0};
    std::string status;  ///< "ok" or a failure class such as "infeasible"
    std::optional<SolutionReport> report;
};

/// Solves the file's problem once per swept value. Per-row infeasibility
/// is recorded in-row; validation failures abort.
std::vector<SweepRow> run_sweep(const ProblemFile& file, const SweepSpec& spec,
                                const SolverOptions& options);

/// Tab-delimited table plus a trailing monotonicity summary line.
std::string render_sweep(const std::vector<SweepRow>& rows, const SweepSpec& spec,
                         const RenderOptions& options);

/// Applies one solve according to the file kind (p1, p2 or p3).
SolutionReport solve_problem_file(const ProblemFile& file, const SolverOptions& options);

}  // namespace fraxion
