#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "precond_lab/fapinv.hpp"
#include "precond_lab/iluff.hpp"
#include "precond_lab/sparse.hpp"

namespace precond_lab {

struct GmresConfig {
    Index restart = 50;
    Index max_iters = 10000;
    double rel_tol = 1e-10;
};

enum class PreconditionerKind { none, iluff, fapinv };

/// Right preconditioner M: identity, (L D^{-1} U)^{-1}, or Z D W.
class Preconditioner {
  public:
    Preconditioner() = default;
    explicit Preconditioner(IlduFactors f) : op_(std::move(f)) {}
    explicit Preconditioner(InverseFactors f) : op_(std::move(f)) {}

    PreconditionerKind kind() const noexcept;

    /// out = M v; out must not alias v.
    void apply(std::span<const double> v, std::span<double> out) const;

    /// Factor density relative to a, when a factorization is held.
    std::optional<double> density(const CsrMatrix& a) const;
    Index breakdown_count() const noexcept;

    const IlduFactors* ildu() const noexcept { return std::get_if<IlduFactors>(&op_); }
    const InverseFactors* inverse_factors() const noexcept { return std::get_if<InverseFactors>(&op_); }

  private:
    std::variant<std::monostate, IlduFactors, InverseFactors> op_;
};

struct SolveReport {
    bool converged = false;
    Index iterations = 0;                // inner iterations summed over restarts
    std::vector<double> residual_history; // ||r_k|| / ||r_0||, starting with 1 at k = 0
    double final_relative_residual = 0.0; // explicit ||b - A x|| / ||b||
    double setup_seconds = 0.0;
    double solve_seconds = 0.0;
    std::optional<double> density;
    Index breakdown_count = 0;
};

struct GmresResult {
    std::vector<double> x;
    SolveReport report;
};

/// Restarted GMRES on A M y = b with x = M y and a zero initial guess.
///
/// Each inner iteration appends the Givens least-squares residual estimate
/// to the history, which for right preconditioning is the residual of the
/// unpreconditioned system. When the estimate drops below rel_tol the
/// iterate is formed and its residual recomputed explicitly; convergence is
/// reported only if that explicit residual also satisfies rel_tol. Arnoldi
/// uses single-pass modified Gram-Schmidt. Non-finite values raise
/// Error(numerical).
GmresResult gmres_right(const CsrMatrix& a, std::span<const double> b, const Preconditioner& m,
                        const GmresConfig& cfg = {});

/// b = A e with e the all-ones vector.
std::vector<double> make_rhs_ones_solution(const CsrMatrix& a);

double norm2(std::span<const double> v);

} // namespace precond_lab
