#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "precond_lab/error.hpp"
#include "precond_lab/iluff.hpp"
#include "precond_lab/krylov.hpp"
#include "precond_lab/sparse.hpp"

namespace precond_lab {

struct RunConfig {
    std::filesystem::path matrix_path;
    std::optional<std::filesystem::path> perm_path;
    PreconditionerKind precond = PreconditionerKind::iluff;
    double tau = 0.1;
    PivotMode pivot = PivotMode::general;
    GmresConfig gmres;
    std::optional<std::filesystem::path> rhs_path; // unset: b = A e
    std::optional<std::filesystem::path> report_path;
    std::optional<std::filesystem::path> history_path;
    std::optional<std::filesystem::path> factors_prefix;
};

struct ReportError {
    std::string code;
    std::string message;
    friend bool operator==(const ReportError&, const ReportError&) = default;
};

/// Per-run summary as written to the JSON report. Times are seconds rounded
/// to milliseconds and ttime is always ptime + it_time.
struct ExperimentReport {
    std::string matrix;
    Index n = 0;
    Index nnz = 0;
    std::string precond = "none";
    double tau = 0.0;
    std::string pivot = "general";
    std::optional<double> density;
    double ptime = 0.0;
    double it_time = 0.0;
    double ttime = 0.0;
    Index its = 0;
    bool converged = false;
    Index breakdowns = 0;
    double final_relres = 1.0;
    std::optional<ReportError> error;

    friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

std::string to_json(const ExperimentReport& r);
/// Throws Error(parse) on malformed input.
ExperimentReport report_from_json(const std::string& text);

struct ExperimentResult {
    ExperimentReport report;
    SolveReport solve;
    std::vector<double> x;

    bool ok() const noexcept { return !report.error && report.converged; }
};

/// A loaded system: A (already permuted when a permutation was given) and b.
struct Problem {
    std::string name;
    CsrMatrix a;
    std::vector<double> b;
};

/// Reads the matrix, applies the permutation, then forms b = A e (or reads
/// and permutes the RHS file). Throws Error.
Problem load_problem(const RunConfig& cfg);

/// Builds the preconditioner (timed), solves with right-preconditioned
/// GMRES (timed), and writes the report/history/factor files named in cfg.
/// Library errors are captured into report.error instead of propagating.
ExperimentResult run_experiment(const RunConfig& cfg);
ExperimentResult run_experiment(const Problem& problem, const RunConfig& cfg);

/// One run per tau over a single matrix load. A failing tau records its
/// error in that row and the sweep continues. When cfg.history_path is set,
/// each run writes <stem>_tau<tau><ext>.
std::vector<ExperimentResult> run_tau_sweep(const RunConfig& cfg, std::span<const double> taus);

/// iter,relres rows starting with iter=0.
void write_history_csv(std::span<const double> history, std::ostream& out);
void write_history_csv(std::span<const double> history, const std::filesystem::path& path);

/// tau,density,Ptime,It-Time,Ttime,Its,converged,breakdowns,error
void write_sweep_csv(std::span<const ExperimentResult> rows, std::ostream& out);
void write_sweep_csv(std::span<const ExperimentResult> rows, const std::filesystem::path& path);

std::string_view to_string(PreconditionerKind kind);
std::string_view to_string(PivotMode mode);
std::string_view to_string(ErrorCode code);
PreconditionerKind parse_preconditioner(std::string_view s);
PivotMode parse_pivot_mode(std::string_view s);

} // namespace precond_lab
