#include "precond_lab/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "precond_lab/error.hpp"
#include "precond_lab/fapinv.hpp"
#include "precond_lab/matrix_market.hpp"

namespace precond_lab {

using nlohmann::json;

std::string_view to_string(PreconditionerKind kind) {
    switch (kind) {
    case PreconditionerKind::none: return "none";
    case PreconditionerKind::iluff: return "iluff";
    case PreconditionerKind::fapinv: return "fapinv";
    }
    return "none";
}

std::string_view to_string(PivotMode mode) {
    return mode == PivotMode::positive_definite ? "pd" : "general";
}

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::numerical: return "numerical";
    case ErrorCode::not_positive_definite: return "not_positive_definite";
    }
    return "internal";
}

PreconditionerKind parse_preconditioner(std::string_view s) {
    if (s == "none") return PreconditionerKind::none;
    if (s == "iluff") return PreconditionerKind::iluff;
    if (s == "fapinv") return PreconditionerKind::fapinv;
    throw Error(ErrorCode::invalid_argument, "unknown preconditioner '" + std::string(s) + "'");
}

PivotMode parse_pivot_mode(std::string_view s) {
    if (s == "general") return PivotMode::general;
    if (s == "pd" || s == "positive_definite") return PivotMode::positive_definite;
    throw Error(ErrorCode::invalid_argument, "unknown pivot mode '" + std::string(s) + "'");
}

std::string to_json(const ExperimentReport& r) {
    json j = {
        {"matrix", r.matrix},
        {"n", r.n},
        {"nnz", r.nnz},
        {"precond", r.precond},
        {"tau", r.tau},
        {"pivot", r.pivot},
        {"density", r.density ? json(*r.density) : json(nullptr)},
        {"Ptime", r.ptime},
        {"It-Time", r.it_time},
        {"Ttime", r.ttime},
        {"Its", r.its},
        {"converged", r.converged},
        {"breakdowns", r.breakdowns},
        {"final_relres", r.final_relres},
        {"error", r.error ? json{{"code", r.error->code}, {"message", r.error->message}} : json(nullptr)},
    };
    return j.dump(2);
}

ExperimentReport report_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        ExperimentReport r;
        r.matrix = j.at("matrix").get<std::string>();
        r.n = j.at("n").get<Index>();
        r.nnz = j.at("nnz").get<Index>();
        r.precond = j.at("precond").get<std::string>();
        r.tau = j.at("tau").get<double>();
        r.pivot = j.at("pivot").get<std::string>();
        if (!j.at("density").is_null()) r.density = j.at("density").get<double>();
        r.ptime = j.at("Ptime").get<double>();
        r.it_time = j.at("It-Time").get<double>();
        r.ttime = j.at("Ttime").get<double>();
        r.its = j.at("Its").get<Index>();
        r.converged = j.at("converged").get<bool>();
        r.breakdowns = j.at("breakdowns").get<Index>();
        r.final_relres = j.at("final_relres").get<double>();
        if (const auto& e = j.at("error"); !e.is_null())
            r.error = ReportError{e.at("code").get<std::string>(), e.at("message").get<std::string>()};
        return r;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::parse, std::string("malformed report JSON: ") + e.what());
    }
}

Problem load_problem(const RunConfig& cfg) {
    Problem p;
    p.name = cfg.matrix_path.filename().string();
    p.a = read_matrix_market(cfg.matrix_path);
    std::optional<Permutation> perm;
    if (cfg.perm_path) {
        perm = read_permutation(*cfg.perm_path);
        p.a = apply_permutation(p.a, *perm);
    }
    if (cfg.rhs_path) {
        p.b = read_vector(*cfg.rhs_path);
        if (static_cast<Index>(p.b.size()) != p.a.size())
            throw Error(ErrorCode::dimension_mismatch, "RHS file has " + std::to_string(p.b.size()) +
                                                           " values, matrix dimension is " + std::to_string(p.a.size()));
        if (perm) p.b = apply_permutation(p.b, *perm);
    } else {
        p.b = make_rhs_ones_solution(p.a);
    }
    return p;
}

namespace {

// Shortest text that reads back to the same double.
std::string number(double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

double round_ms(double seconds) { return std::round(seconds * 1000.0) / 1000.0; }

void fill_error(ExperimentReport& r, const std::string& code, const std::string& message) {
    r.error = ReportError{code, message};
    r.converged = false;
}

ExperimentReport base_report(const RunConfig& cfg) {
    ExperimentReport r;
    r.matrix = cfg.matrix_path.string();
    r.precond = std::string(to_string(cfg.precond));
    r.tau = cfg.tau;
    r.pivot = std::string(to_string(cfg.pivot));
    return r;
}

void write_text(const std::string& text, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io, "cannot open " + path.string() + " for writing");
    out << text << '\n';
    if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

std::filesystem::path tau_suffixed(const std::filesystem::path& path, double tau) {
    std::ostringstream s;
    s << path.stem().string() << "_tau" << tau << path.extension().string();
    return path.parent_path() / s.str();
}

} // namespace

ExperimentResult run_experiment(const Problem& problem, const RunConfig& cfg) {
    ExperimentResult result;
    ExperimentReport& r = result.report;
    r = base_report(cfg);
    r.n = problem.a.size();
    r.nnz = problem.a.nnz();

    try {
        const DropRule rule(cfg.tau);
        if (cfg.precond == PreconditionerKind::fapinv && cfg.pivot != PivotMode::general)
            throw Error(ErrorCode::invalid_argument, "the positive-definite pivot applies to iluff only");

        const auto setup_start = std::chrono::steady_clock::now();
        Preconditioner m;
        if (cfg.precond != PreconditionerKind::none) {
            const ColumnCursorIndex cols(problem.a);
            if (cfg.precond == PreconditionerKind::iluff)
                m = Preconditioner(iluff_factorize(problem.a, cols, rule, cfg.pivot));
            else
                m = Preconditioner(ffinv_vector(problem.a, cols, rule));
        }
        const double setup = std::chrono::duration<double>(std::chrono::steady_clock::now() - setup_start).count();

        auto solved = gmres_right(problem.a, problem.b, m, cfg.gmres);
        result.solve = std::move(solved.report);
        result.x = std::move(solved.x);
        result.solve.setup_seconds = setup;
        result.solve.density = m.density(problem.a);
        result.solve.breakdown_count = m.breakdown_count();

        r.density = result.solve.density;
        r.ptime = round_ms(setup);
        r.it_time = round_ms(result.solve.solve_seconds);
        r.ttime = r.ptime + r.it_time;
        r.its = result.solve.iterations;
        r.converged = result.solve.converged;
        r.breakdowns = result.solve.breakdown_count;
        r.final_relres = result.solve.final_relative_residual;

        if (cfg.factors_prefix) {
            if (const auto* f = m.ildu()) write_factors(*f, *cfg.factors_prefix);
            if (const auto* g = m.inverse_factors()) write_factors(*g, *cfg.factors_prefix);
        }
        if (cfg.history_path) write_history_csv(result.solve.residual_history, *cfg.history_path);
    } catch (const Error& e) {
        fill_error(r, std::string(to_string(e.code())), e.what());
    } catch (const std::exception& e) {
        fill_error(r, "internal", e.what());
    }

    if (cfg.report_path) {
        try {
            write_text(to_json(r), *cfg.report_path);
        } catch (const Error& e) {
            if (!r.error) fill_error(r, std::string(to_string(e.code())), e.what());
        }
    }
    return result;
}

ExperimentResult run_experiment(const RunConfig& cfg) {
    try {
        return run_experiment(load_problem(cfg), cfg);
    } catch (const Error& e) {
        ExperimentResult result;
        result.report = base_report(cfg);
        fill_error(result.report, std::string(to_string(e.code())), e.what());
        if (cfg.report_path) {
            try {
                write_text(to_json(result.report), *cfg.report_path);
            } catch (const Error&) {
            }
        }
        return result;
    }
}

std::vector<ExperimentResult> run_tau_sweep(const RunConfig& cfg, std::span<const double> taus) {
    if (taus.empty()) throw Error(ErrorCode::invalid_argument, "tau sweep needs at least one value");
    const Problem problem = load_problem(cfg);
    std::vector<ExperimentResult> rows;
    rows.reserve(taus.size());
    for (double tau : taus) {
        RunConfig run = cfg;
        run.tau = tau;
        run.report_path.reset();
        run.factors_prefix.reset();
        if (cfg.history_path) run.history_path = tau_suffixed(*cfg.history_path, tau);
        rows.push_back(run_experiment(problem, run));
    }
    return rows;
}

void write_history_csv(std::span<const double> history, std::ostream& out) {
    out << "iter,relres\n";
    for (std::size_t k = 0; k < history.size(); ++k) out << k << ',' << number(history[k]) << '\n';
}

void write_history_csv(std::span<const double> history, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io, "cannot open " + path.string() + " for writing");
    write_history_csv(history, out);
    if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

} // namespace

void write_sweep_csv(std::span<const ExperimentResult> rows, std::ostream& out) {
    out << "tau,density,Ptime,It-Time,Ttime,Its,converged,breakdowns,error\n";
    for (const auto& row : rows) {
        const auto& r = row.report;
        out << number(r.tau) << ',' << (r.density ? number(*r.density) : std::string()) << ',' << number(r.ptime)
            << ',' << number(r.it_time) << ',' << number(r.ttime) << ',' << r.its << ','
            << (r.converged ? "true" : "false") << ',' << r.breakdowns << ','
            << (r.error ? csv_field(r.error->code + ": " + r.error->message) : std::string()) << '\n';
    }
}

void write_sweep_csv(std::span<const ExperimentResult> rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io, "cannot open " + path.string() + " for writing");
    write_sweep_csv(rows, out);
    if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

} // namespace precond_lab
