#include "precond_lab/krylov.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "precond_lab/error.hpp"

namespace precond_lab {

namespace {

void check_finite(double v, Index iteration) {
    if (!std::isfinite(v))
        throw Error(ErrorCode::numerical, "GMRES: non-finite value at iteration " + std::to_string(iteration));
}

double dot(std::span<const double> x, std::span<const double> y) {
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

// Relative breakdown threshold on the orthogonalized Arnoldi vector.
constexpr double happy_breakdown_ratio = 1e-14;

} // namespace

PreconditionerKind Preconditioner::kind() const noexcept {
    if (std::holds_alternative<IlduFactors>(op_)) return PreconditionerKind::iluff;
    if (std::holds_alternative<InverseFactors>(op_)) return PreconditionerKind::fapinv;
    return PreconditionerKind::none;
}

void Preconditioner::apply(std::span<const double> v, std::span<double> out) const {
    if (const auto* f = ildu()) {
        apply_ildu_inverse(*f, v, out);
    } else if (const auto* g = inverse_factors()) {
        apply_factored_inverse(*g, v, out);
    } else {
        if (v.size() != out.size()) throw Error(ErrorCode::dimension_mismatch, "preconditioner: length mismatch");
        std::copy(v.begin(), v.end(), out.begin());
    }
}

std::optional<double> Preconditioner::density(const CsrMatrix& a) const {
    if (const auto* f = ildu()) return precond_lab::density(*f, a);
    if (const auto* g = inverse_factors()) return g->density(a);
    return std::nullopt;
}

Index Preconditioner::breakdown_count() const noexcept {
    if (const auto* f = ildu()) return f->breakdown_count;
    if (const auto* g = inverse_factors()) return g->breakdown_count;
    return 0;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

std::vector<double> make_rhs_ones_solution(const CsrMatrix& a) {
    const std::vector<double> e(static_cast<std::size_t>(a.size()), 1.0);
    return a.multiply(e);
}

GmresResult gmres_right(const CsrMatrix& a, std::span<const double> b, const Preconditioner& m,
                        const GmresConfig& cfg) {
    const Index n = a.size();
    if (static_cast<Index>(b.size()) != n)
        throw Error(ErrorCode::dimension_mismatch, "GMRES: right-hand side length differs from matrix dimension");
    if (cfg.restart < 1) throw Error(ErrorCode::invalid_argument, "GMRES: restart must be >= 1");
    if (cfg.max_iters < 0) throw Error(ErrorCode::invalid_argument, "GMRES: max_iters must be >= 0");
    if (!(cfg.rel_tol > 0.0)) throw Error(ErrorCode::invalid_argument, "GMRES: rel_tol must be > 0");
    for (double v : b) check_finite(v, 0);

    const auto start = std::chrono::steady_clock::now();
    const std::size_t nn = static_cast<std::size_t>(n);
    const Index m_max = cfg.restart;

    GmresResult result;
    result.x.assign(nn, 0.0);
    SolveReport& rep = result.report;
    rep.residual_history.push_back(1.0);
    rep.final_relative_residual = 1.0;

    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        rep.converged = true;
        rep.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return result;
    }

    std::vector<std::vector<double>> basis(static_cast<std::size_t>(m_max + 1), std::vector<double>(nn));
    // Hessenberg columns, h[k][i] = H(i, k).
    std::vector<std::vector<double>> h(static_cast<std::size_t>(m_max), std::vector<double>(static_cast<std::size_t>(m_max + 1)));
    std::vector<double> cs(static_cast<std::size_t>(m_max)), sn(static_cast<std::size_t>(m_max));
    std::vector<double> g(static_cast<std::size_t>(m_max + 1));
    std::vector<double> y(static_cast<std::size_t>(m_max));
    std::vector<double> r(b.begin(), b.end());
    std::vector<double> mv(nn), w(nn), u(nn);

    double rnorm = bnorm; // r_0 = b for x_0 = 0
    while (true) {
        if (rep.iterations >= cfg.max_iters) break;

        for (std::size_t p = 0; p < nn; ++p) basis[0][p] = r[p] / rnorm;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = rnorm;

        Index k = 0; // inner steps completed in this cycle
        while (k < m_max && rep.iterations < cfg.max_iters) {
            m.apply(basis[k], mv);
            a.multiply(mv, w);
            const double wnorm_in = norm2(w);
            check_finite(wnorm_in, rep.iterations + 1);

            auto& hk = h[k];
            for (Index i = 0; i <= k; ++i) {
                const double hik = dot(w, basis[i]);
                hk[i] = hik;
                for (std::size_t p = 0; p < nn; ++p) w[p] -= hik * basis[i][p];
            }
            const double hnext = norm2(w);
            hk[k + 1] = hnext;
            const bool happy = hnext <= happy_breakdown_ratio * wnorm_in;
            if (!happy)
                for (std::size_t p = 0; p < nn; ++p) basis[k + 1][p] = w[p] / hnext;

            for (Index i = 0; i < k; ++i) {
                const double t = cs[i] * hk[i] + sn[i] * hk[i + 1];
                hk[i + 1] = -sn[i] * hk[i] + cs[i] * hk[i + 1];
                hk[i] = t;
            }
            const double denom = std::hypot(hk[k], hk[k + 1]);
            if (denom == 0.0) {
                cs[k] = 1.0;
                sn[k] = 0.0;
            } else {
                cs[k] = hk[k] / denom;
                sn[k] = hk[k + 1] / denom;
            }
            hk[k] = cs[k] * hk[k] + sn[k] * hk[k + 1];
            hk[k + 1] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];

            ++k;
            ++rep.iterations;
            const double rel = std::abs(g[k]) / bnorm;
            check_finite(rel, rep.iterations);
            rep.residual_history.push_back(rel);
            if (rel < cfg.rel_tol || happy) break;
        }

        // y = H^{-1} g, u = V y, x += M u
        for (Index i = k - 1; i >= 0; --i) {
            double s = g[i];
            for (Index c = i + 1; c < k; ++c) s -= h[c][i] * y[c];
            y[i] = h[i][i] != 0.0 ? s / h[i][i] : 0.0;
        }
        std::fill(u.begin(), u.end(), 0.0);
        for (Index i = 0; i < k; ++i)
            for (std::size_t p = 0; p < nn; ++p) u[p] += y[i] * basis[i][p];
        m.apply(u, mv);
        for (std::size_t p = 0; p < nn; ++p) result.x[p] += mv[p];

        a.multiply(result.x, r);
        for (std::size_t p = 0; p < nn; ++p) r[p] = b[p] - r[p];
        rnorm = norm2(r);
        check_finite(rnorm, rep.iterations);
        rep.final_relative_residual = rnorm / bnorm;
        if (rep.final_relative_residual < cfg.rel_tol) {
            rep.converged = true;
            break;
        }
    }

    rep.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

} // namespace precond_lab
