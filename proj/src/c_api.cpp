#include "precond_lab/precond_lab.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <memory>
#include <new>
#include <string>
#include <string_view>

#include "precond_lab/error.hpp"
#include "precond_lab/experiment.hpp"
#include "precond_lab/fapinv.hpp"
#include "precond_lab/iluff.hpp"
#include "precond_lab/krylov.hpp"
#include "precond_lab/matrix_market.hpp"

using namespace precond_lab;

struct pl_matrix {
    CsrMatrix a;
};

struct pl_precond {
    Preconditioner m;
    Index n = 0;
    double density = 0.0;
    double setup_seconds = 0.0;
};

struct pl_report {
    ExperimentReport report;
    SolveReport solve;
};

namespace {

thread_local std::string last_error;

pl_status status_of(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_argument: return PL_ERR_INVALID_ARGUMENT;
    case ErrorCode::io: return PL_ERR_IO;
    case ErrorCode::parse: return PL_ERR_PARSE;
    case ErrorCode::dimension_mismatch: return PL_ERR_DIMENSION;
    case ErrorCode::numerical: return PL_ERR_NUMERICAL;
    case ErrorCode::not_positive_definite: return PL_ERR_NOT_POSITIVE_DEFINITE;
    }
    return PL_ERR_INTERNAL;
}

pl_status fail(pl_status s, std::string message) {
    last_error = std::move(message);
    return s;
}

template <class F>
pl_status guarded(F&& body) {
    try {
        last_error.clear();
        body();
        return PL_OK;
    } catch (const Error& e) {
        return fail(status_of(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(PL_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(PL_ERR_INTERNAL, e.what());
    }
}

#define PL_REQUIRE(cond, what)                                                                    \
    do {                                                                                          \
        if (!(cond)) return fail(PL_ERR_INVALID_ARGUMENT, what);                                  \
    } while (0)

std::span<const double> in_span(const double* p, int64_t n) { return {p, static_cast<std::size_t>(n)}; }
std::span<double> out_span(double* p, int64_t n) { return {p, static_cast<std::size_t>(n)}; }

PreconditionerKind kind_of(pl_precond_kind k) {
    switch (k) {
    case PL_PRECOND_NONE: return PreconditionerKind::none;
    case PL_PRECOND_ILUFF: return PreconditionerKind::iluff;
    case PL_PRECOND_FAPINV: return PreconditionerKind::fapinv;
    }
    throw Error(ErrorCode::invalid_argument, "unknown preconditioner kind");
}

PivotMode pivot_of(pl_pivot_mode p) {
    switch (p) {
    case PL_PIVOT_GENERAL: return PivotMode::general;
    case PL_PIVOT_POSITIVE_DEFINITE: return PivotMode::positive_definite;
    }
    throw Error(ErrorCode::invalid_argument, "unknown pivot mode");
}

GmresConfig gmres_of(const pl_gmres_config& c) {
    return GmresConfig{.restart = c.restart, .max_iters = c.max_iters, .rel_tol = c.rel_tol};
}

RunConfig run_config_of(const pl_run_config& c) {
    if (!c.matrix_path) throw Error(ErrorCode::invalid_argument, "matrix_path is required");
    RunConfig r;
    r.matrix_path = c.matrix_path;
    if (c.perm_path) r.perm_path = c.perm_path;
    r.precond = kind_of(c.precond);
    r.tau = c.tau;
    r.pivot = pivot_of(c.pivot);
    r.gmres = gmres_of(c.gmres);
    if (c.rhs_path) r.rhs_path = c.rhs_path;
    if (c.report_path) r.report_path = c.report_path;
    if (c.history_path) r.history_path = c.history_path;
    if (c.factors_prefix) r.factors_prefix = c.factors_prefix;
    return r;
}

} // namespace

extern "C" {

const char* pl_last_error(void) { return last_error.c_str(); }

const char* pl_status_string(pl_status status) {
    switch (status) {
    case PL_OK: return "ok";
    case PL_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case PL_ERR_IO: return "io";
    case PL_ERR_PARSE: return "parse";
    case PL_ERR_DIMENSION: return "dimension_mismatch";
    case PL_ERR_NUMERICAL: return "numerical";
    case PL_ERR_NOT_POSITIVE_DEFINITE: return "not_positive_definite";
    case PL_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

pl_status pl_matrix_read_mm(const char* path, pl_matrix** out) {
    PL_REQUIRE(path && out, "pl_matrix_read_mm: null argument");
    return guarded([&] { *out = new pl_matrix{read_matrix_market(path)}; });
}

pl_status pl_matrix_write_mm(const pl_matrix* a, const char* path) {
    PL_REQUIRE(a && path, "pl_matrix_write_mm: null argument");
    return guarded([&] { write_matrix_market(a->a, path); });
}

pl_status pl_matrix_from_csr(int64_t n, const int64_t* row_ptr, const int64_t* col_idx, const double* values,
                             pl_matrix** out) {
    PL_REQUIRE(out && row_ptr && n >= 0, "pl_matrix_from_csr: invalid argument");
    return guarded([&] {
        const int64_t nnz = row_ptr[n];
        if (nnz < 0 || (nnz > 0 && (!col_idx || !values)))
            throw Error(ErrorCode::invalid_argument, "pl_matrix_from_csr: missing entry arrays");
        std::vector<Index> rp(row_ptr, row_ptr + n + 1);
        std::vector<Index> ci(col_idx, col_idx + nnz);
        std::vector<double> v(values, values + nnz);
        *out = new pl_matrix{CsrMatrix(n, std::move(rp), std::move(ci), std::move(v))};
    });
}

void pl_matrix_free(pl_matrix* a) { delete a; }

pl_status pl_matrix_dims(const pl_matrix* a, int64_t* n, int64_t* nnz) {
    PL_REQUIRE(a, "pl_matrix_dims: null matrix");
    if (n) *n = a->a.size();
    if (nnz) *nnz = a->a.nnz();
    return PL_OK;
}

pl_status pl_matrix_permute_file(const pl_matrix* a, const char* perm_path, pl_matrix** out) {
    PL_REQUIRE(a && perm_path && out, "pl_matrix_permute_file: null argument");
    return guarded([&] { *out = new pl_matrix{apply_permutation(a->a, read_permutation(perm_path))}; });
}

pl_status pl_matrix_multiply(const pl_matrix* a, const double* x, double* y, int64_t n) {
    PL_REQUIRE(a && x && y, "pl_matrix_multiply: null argument");
    return guarded([&] { a->a.multiply(in_span(x, n), out_span(y, n)); });
}

pl_status pl_precond_build(const pl_matrix* a, pl_precond_kind kind, double tau, pl_pivot_mode pivot,
                           pl_precond** out) {
    PL_REQUIRE(a && out, "pl_precond_build: null argument");
    return guarded([&] {
        const PreconditionerKind k = kind_of(kind);
        const PivotMode mode = pivot_of(pivot);
        const DropRule rule(tau);
        if (k == PreconditionerKind::fapinv && mode != PivotMode::general)
            throw Error(ErrorCode::invalid_argument, "the positive-definite pivot applies to iluff only");
        const auto start = std::chrono::steady_clock::now();
        auto p = std::make_unique<pl_precond>();
        p->n = a->a.size();
        if (k != PreconditionerKind::none) {
            const ColumnCursorIndex cols(a->a);
            if (k == PreconditionerKind::iluff)
                p->m = Preconditioner(iluff_factorize(a->a, cols, rule, mode));
            else
                p->m = Preconditioner(ffinv_vector(a->a, cols, rule));
        }
        p->setup_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        p->density = p->m.density(a->a).value_or(0.0);
        *out = p.release();
    });
}

void pl_precond_free(pl_precond* m) { delete m; }

pl_status pl_precond_apply(const pl_precond* m, const double* v, double* out, int64_t n) {
    PL_REQUIRE(m && v && out, "pl_precond_apply: null argument");
    PL_REQUIRE(v != out, "pl_precond_apply: output must not alias input");
    return guarded([&] {
        if (n != m->n) throw Error(ErrorCode::dimension_mismatch, "pl_precond_apply: length mismatch");
        m->m.apply(in_span(v, n), out_span(out, n));
    });
}

pl_status pl_precond_density(const pl_precond* m, double* density) {
    PL_REQUIRE(m && density, "pl_precond_density: null argument");
    *density = m->density;
    return PL_OK;
}

pl_status pl_precond_breakdowns(const pl_precond* m, int64_t* count) {
    PL_REQUIRE(m && count, "pl_precond_breakdowns: null argument");
    *count = m->m.breakdown_count();
    return PL_OK;
}

pl_status pl_precond_setup_seconds(const pl_precond* m, double* seconds) {
    PL_REQUIRE(m && seconds, "pl_precond_setup_seconds: null argument");
    *seconds = m->setup_seconds;
    return PL_OK;
}

pl_status pl_precond_write_factors(const pl_precond* m, const char* prefix) {
    PL_REQUIRE(m && prefix, "pl_precond_write_factors: null argument");
    return guarded([&] {
        if (const auto* f = m->m.ildu()) write_factors(*f, prefix);
        else if (const auto* g = m->m.inverse_factors()) write_factors(*g, prefix);
        else throw Error(ErrorCode::invalid_argument, "no factors to write for the identity preconditioner");
    });
}

pl_gmres_config pl_gmres_default_config(void) {
    const GmresConfig d;
    return pl_gmres_config{d.restart, d.max_iters, d.rel_tol};
}

pl_status pl_gmres_solve(const pl_matrix* a, const pl_precond* m, const double* b, double* x, int64_t n,
                         const pl_gmres_config* cfg, pl_report** out) {
    PL_REQUIRE(a && b && x && out, "pl_gmres_solve: null argument");
    return guarded([&] {
        if (n != a->a.size()) throw Error(ErrorCode::dimension_mismatch, "pl_gmres_solve: length mismatch");
        if (m && m->n != n) throw Error(ErrorCode::dimension_mismatch, "pl_gmres_solve: preconditioner size mismatch");
        static const Preconditioner identity;
        const GmresConfig c = cfg ? gmres_of(*cfg) : GmresConfig{};
        auto result = gmres_right(a->a, in_span(b, n), m ? m->m : identity, c);
        std::copy(result.x.begin(), result.x.end(), x);

        auto r = std::make_unique<pl_report>();
        r->solve = std::move(result.report);
        if (m) {
            r->solve.setup_seconds = m->setup_seconds;
            r->solve.density = m->m.density(a->a);
            r->solve.breakdown_count = m->m.breakdown_count();
        }
        auto& rep = r->report;
        rep.n = a->a.size();
        rep.nnz = a->a.nnz();
        rep.precond = std::string(to_string(m ? m->m.kind() : PreconditionerKind::none));
        rep.density = r->solve.density;
        rep.ptime = std::round(r->solve.setup_seconds * 1000.0) / 1000.0;
        rep.it_time = std::round(r->solve.solve_seconds * 1000.0) / 1000.0;
        rep.ttime = rep.ptime + rep.it_time;
        rep.its = r->solve.iterations;
        rep.converged = r->solve.converged;
        rep.breakdowns = r->solve.breakdown_count;
        rep.final_relres = r->solve.final_relative_residual;
        *out = r.release();
    });
}

pl_run_config pl_run_config_default(void) {
    pl_run_config c{};
    c.precond = PL_PRECOND_ILUFF;
    c.tau = 0.1;
    c.pivot = PL_PIVOT_GENERAL;
    c.gmres = pl_gmres_default_config();
    return c;
}

pl_status pl_run_experiment(const pl_run_config* cfg, pl_report** out) {
    PL_REQUIRE(cfg && out, "pl_run_experiment: null argument");
    return guarded([&] {
        auto result = run_experiment(run_config_of(*cfg));
        *out = new pl_report{std::move(result.report), std::move(result.solve)};
    });
}

pl_status pl_run_sweep(const pl_run_config* cfg, const double* taus, size_t count, const char* table_path,
                       int* all_converged) {
    PL_REQUIRE(cfg && taus && count > 0, "pl_run_sweep: invalid argument");
    return guarded([&] {
        const auto rows = run_tau_sweep(run_config_of(*cfg), {taus, count});
        if (table_path && std::string_view(table_path) == "-") {
            write_sweep_csv(rows, std::cout);
            std::cout.flush();
        } else if (table_path) {
            write_sweep_csv(rows, std::filesystem::path(table_path));
        }
        if (all_converged)
            *all_converged = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.ok(); }) ? 1 : 0;
    });
}

void pl_report_free(pl_report* r) { delete r; }

int pl_report_converged(const pl_report* r) { return r && r->report.converged && !r->report.error ? 1 : 0; }

int64_t pl_report_iterations(const pl_report* r) { return r ? r->report.its : 0; }

double pl_report_final_relres(const pl_report* r) { return r ? r->report.final_relres : 0.0; }

size_t pl_report_history_length(const pl_report* r) { return r ? r->solve.residual_history.size() : 0; }

size_t pl_report_history(const pl_report* r, double* out, size_t capacity) {
    if (!r || !out) return 0;
    const size_t k = std::min(capacity, r->solve.residual_history.size());
    std::copy_n(r->solve.residual_history.begin(), k, out);
    return k;
}

const char* pl_report_error_code(const pl_report* r) {
    return r && r->report.error ? r->report.error->code.c_str() : nullptr;
}

pl_status pl_report_json(const pl_report* r, char* buffer, size_t capacity, size_t* needed) {
    PL_REQUIRE(r, "pl_report_json: null report");
    return guarded([&] {
        const std::string text = to_json(r->report);
        if (needed) *needed = text.size() + 1;
        if (buffer && capacity > text.size()) std::memcpy(buffer, text.c_str(), text.size() + 1);
        else if (buffer && capacity > 0)
            throw Error(ErrorCode::invalid_argument, "pl_report_json: buffer too small");
    });
}

pl_status pl_report_write_history(const pl_report* r, const char* path) {
    PL_REQUIRE(r && path, "pl_report_write_history: null argument");
    return guarded([&] { write_history_csv(r->solve.residual_history, std::filesystem::path(path)); });
}

} // extern "C"
