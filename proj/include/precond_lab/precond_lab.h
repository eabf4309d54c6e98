/*
 * C interface to the precond_lab shared library.
 *
 * Objects are opaque handles created by the library and released with the
 * matching *_free function. Every fallible call returns a pl_status; on
 * failure the message of the most recent error on the calling thread is
 * available from pl_last_error().
 */
#ifndef PRECOND_LAB_H
#define PRECOND_LAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PRECOND_LAB_BUILDING)
#    define PL_API __declspec(dllexport)
#  else
#    define PL_API __declspec(dllimport)
#  endif
#else
#  define PL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pl_status {
    PL_OK = 0,
    PL_ERR_INVALID_ARGUMENT = 1,
    PL_ERR_IO = 2,
    PL_ERR_PARSE = 3,
    PL_ERR_DIMENSION = 4,
    PL_ERR_NUMERICAL = 5,
    PL_ERR_NOT_POSITIVE_DEFINITE = 6,
    PL_ERR_INTERNAL = 7
} pl_status;

typedef enum pl_precond_kind {
    PL_PRECOND_NONE = 0,
    PL_PRECOND_ILUFF = 1,
    PL_PRECOND_FAPINV = 2
} pl_precond_kind;

typedef enum pl_pivot_mode {
    PL_PIVOT_GENERAL = 0,
    PL_PIVOT_POSITIVE_DEFINITE = 1
} pl_pivot_mode;

typedef struct pl_matrix pl_matrix;
typedef struct pl_precond pl_precond;
typedef struct pl_report pl_report;

PL_API const char* pl_last_error(void);
PL_API const char* pl_status_string(pl_status status);

/* ---- matrices ---------------------------------------------------------- */

PL_API pl_status pl_matrix_read_mm(const char* path, pl_matrix** out);
PL_API pl_status pl_matrix_write_mm(const pl_matrix* a, const char* path);
/* Copies CSR arrays; row_ptr has n+1 entries, col_idx/values have row_ptr[n]. */
PL_API pl_status pl_matrix_from_csr(int64_t n, const int64_t* row_ptr, const int64_t* col_idx,
                                    const double* values, pl_matrix** out);
PL_API void pl_matrix_free(pl_matrix* a);
PL_API pl_status pl_matrix_dims(const pl_matrix* a, int64_t* n, int64_t* nnz);
/* P A P^T from a 1-based permutation file. */
PL_API pl_status pl_matrix_permute_file(const pl_matrix* a, const char* perm_path, pl_matrix** out);
/* y = A x, both of length n. */
PL_API pl_status pl_matrix_multiply(const pl_matrix* a, const double* x, double* y, int64_t n);

/* ---- preconditioners --------------------------------------------------- */

PL_API pl_status pl_precond_build(const pl_matrix* a, pl_precond_kind kind, double tau,
                                  pl_pivot_mode pivot, pl_precond** out);
PL_API void pl_precond_free(pl_precond* m);
PL_API pl_status pl_precond_apply(const pl_precond* m, const double* v, double* out, int64_t n);
PL_API pl_status pl_precond_density(const pl_precond* m, double* density);
PL_API pl_status pl_precond_breakdowns(const pl_precond* m, int64_t* count);
PL_API pl_status pl_precond_setup_seconds(const pl_precond* m, double* seconds);
/* <prefix>_L/_U (iluff) or _W/_Z (fapinv) .mtx plus <prefix>_D.txt. */
PL_API pl_status pl_precond_write_factors(const pl_precond* m, const char* prefix);

/* ---- GMRES ------------------------------------------------------------- */

typedef struct pl_gmres_config {
    int64_t restart;
    int64_t max_iters;
    double rel_tol;
} pl_gmres_config;

/* restart 50, max_iters 10000, rel_tol 1e-10 */
PL_API pl_gmres_config pl_gmres_default_config(void);

/* m may be NULL for no preconditioner. x receives the solution. */
PL_API pl_status pl_gmres_solve(const pl_matrix* a, const pl_precond* m, const double* b, double* x,
                                int64_t n, const pl_gmres_config* cfg, pl_report** out);

/* ---- experiments ------------------------------------------------------- */

typedef struct pl_run_config {
    const char* matrix_path;
    const char* perm_path;      /* NULL: no reordering */
    pl_precond_kind precond;
    double tau;
    pl_pivot_mode pivot;
    pl_gmres_config gmres;
    const char* rhs_path;       /* NULL: b = A e */
    const char* report_path;    /* NULL: no JSON file */
    const char* history_path;   /* NULL: no CSV file */
    const char* factors_prefix; /* NULL: factors not written */
} pl_run_config;

/* iluff, tau 0.1, general pivots, default GMRES settings, all paths NULL. */
PL_API pl_run_config pl_run_config_default(void);

/* Always yields a report on PL_OK; a failure inside the pipeline is recorded
 * in the report's error field (see pl_report_error_code). Non-OK status is
 * returned only for invalid arguments to this call itself. */
PL_API pl_status pl_run_experiment(const pl_run_config* cfg, pl_report** out);

/* Runs one experiment per tau over one matrix load and writes the combined
 * CSV table to table_path (NULL: not written, "-": standard output).
 * all_converged receives 1 when every row converged without error. */
PL_API pl_status pl_run_sweep(const pl_run_config* cfg, const double* taus, size_t count,
                              const char* table_path, int* all_converged);

/* ---- reports ----------------------------------------------------------- */

PL_API void pl_report_free(pl_report* r);
PL_API int pl_report_converged(const pl_report* r);
PL_API int64_t pl_report_iterations(const pl_report* r);
PL_API double pl_report_final_relres(const pl_report* r);
PL_API size_t pl_report_history_length(const pl_report* r);
/* Copies up to capacity history values; returns the number copied. */
PL_API size_t pl_report_history(const pl_report* r, double* out, size_t capacity);
/* NULL when the run succeeded. */
PL_API const char* pl_report_error_code(const pl_report* r);
/* Writes a NUL-terminated JSON document if capacity allows; *needed gets the
 * full length including the terminator. */
PL_API pl_status pl_report_json(const pl_report* r, char* buffer, size_t capacity, size_t* needed);
PL_API pl_status pl_report_write_history(const pl_report* r, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* PRECOND_LAB_H */
