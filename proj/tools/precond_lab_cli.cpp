// precond-lab: load a Matrix Market system, build an ILUFF or FAPINV right
// preconditioner, solve with GMRES(m), and emit a JSON report and CSV history.
//
// Talks to the library only through the C interface.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "precond_lab/precond_lab.h"

namespace {

constexpr int exit_converged = 0;
constexpr int exit_not_converged = 1;
constexpr int exit_error = 2;

int print_report(pl_report* report) {
    size_t needed = 0;
    pl_report_json(report, nullptr, 0, &needed);
    std::string json(needed, '\0');
    if (pl_report_json(report, json.data(), json.size(), &needed) != PL_OK) {
        std::fprintf(stderr, "error: %s\n", pl_last_error());
        return exit_error;
    }
    json.resize(needed - 1);
    std::printf("%s\n", json.c_str());
    if (pl_report_error_code(report)) return exit_error;
    return pl_report_converged(report) ? exit_converged : exit_not_converged;
}

void print_error_json(const char* code, const char* message) {
    std::string escaped;
    for (const char* p = message; *p; ++p) {
        if (*p == '"' || *p == '\\') escaped += '\\';
        escaped += *p;
    }
    std::printf("{\n  \"converged\": false,\n  \"error\": {\"code\": \"%s\", \"message\": \"%s\"}\n}\n", code,
                escaped.c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Right-preconditioned GMRES with ILUFF / FAPINV preconditioners"};

    std::string matrix, perm, rhs = "ones", report, history, factors;
    std::string precond = "iluff", pivot = "general";
    double tau = 0.1;
    pl_gmres_config gmres = pl_gmres_default_config();
    std::vector<double> sweep;

    app.add_option("--matrix", matrix, "Matrix Market file")->required()->check(CLI::ExistingFile);
    app.add_option("--precond", precond, "Preconditioner")
        ->check(CLI::IsMember({"none", "iluff", "fapinv"}))
        ->capture_default_str();
    app.add_option("--tau", tau, "Absolute drop tolerance")->check(CLI::NonNegativeNumber)->capture_default_str();
    app.add_option("--pivot", pivot, "Pivot formula for iluff")
        ->check(CLI::IsMember({"general", "pd"}))
        ->capture_default_str();
    app.add_option("--restart", gmres.restart, "GMRES restart length")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--max-iters", gmres.max_iters, "Total inner iteration cap")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app.add_option("--tol", gmres.rel_tol, "Relative residual target")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--rhs", rhs, "'ones' for b = A e, or a file with one value per line")->capture_default_str();
    app.add_option("--perm", perm, "Permutation file, 1-based new position per line")->check(CLI::ExistingFile);
    app.add_option("--report", report, "JSON report path (sweep: CSV table path)");
    app.add_option("--history", history, "Residual history CSV path");
    app.add_option("--factors", factors, "Write factor files with this prefix");
    app.add_option("--sweep", sweep, "Comma-separated drop tolerances")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_converged : exit_error;
    }

    pl_run_config cfg = pl_run_config_default();
    cfg.matrix_path = matrix.c_str();
    cfg.perm_path = perm.empty() ? nullptr : perm.c_str();
    static const std::map<std::string, pl_precond_kind> kinds{
        {"none", PL_PRECOND_NONE}, {"iluff", PL_PRECOND_ILUFF}, {"fapinv", PL_PRECOND_FAPINV}};
    cfg.precond = kinds.at(precond);
    cfg.tau = tau;
    cfg.pivot = pivot == "pd" ? PL_PIVOT_POSITIVE_DEFINITE : PL_PIVOT_GENERAL;
    cfg.gmres = gmres;
    cfg.rhs_path = rhs == "ones" ? nullptr : rhs.c_str();
    cfg.history_path = history.empty() ? nullptr : history.c_str();
    cfg.factors_prefix = factors.empty() ? nullptr : factors.c_str();

    if (!sweep.empty()) {
        int all_converged = 0;
        const std::string table = report.empty() ? "-" : report;
        const pl_status s = pl_run_sweep(&cfg, sweep.data(), sweep.size(), table.c_str(), &all_converged);
        if (s != PL_OK) {
            print_error_json(pl_status_string(s), pl_last_error());
            return exit_error;
        }
        return all_converged ? exit_converged : exit_not_converged;
    }

    cfg.report_path = report.empty() ? nullptr : report.c_str();
    pl_report* result = nullptr;
    const pl_status s = pl_run_experiment(&cfg, &result);
    if (s != PL_OK) {
        print_error_json(pl_status_string(s), pl_last_error());
        return exit_error;
    }
    const int code = print_report(result);
    pl_report_free(result);
    return code;
}
