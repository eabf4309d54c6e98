// Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion N   run one; exit 77 when it is skipped
//
// Criterion 6 needs fs_183_1.mtx, fs_183_6.mtx and sherman3.mtx in
// $PRECOND_LAB_MATRIX_DIR (default data/matrices in the source tree).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "generators.hpp"
#include "precond_lab/dense.hpp"
#include "precond_lab/error.hpp"
#include "precond_lab/fapinv.hpp"
#include "precond_lab/iluff.hpp"
#include "precond_lab/krylov.hpp"
#include "precond_lab/matrix_market.hpp"

using namespace precond_lab;
using namespace precond_lab::testing;
namespace fs = std::filesystem;

namespace {

enum class Outcome { pass, fail, skip };

struct Verdict {
    Outcome outcome = Outcome::pass;
    std::string detail;
};

class Checker {
  public:
    void expect(bool ok, const std::string& what) {
        if (!ok && failures_++ < 5) first_ += (first_.empty() ? "" : "; ") + what;
    }
    bool ok() const { return failures_ == 0; }
    std::string failures() const { return std::to_string(failures_) + " failure(s): " + first_; }

  private:
    int failures_ = 0;
    std::string first_;
};

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

Eigen::MatrixXd diag_of(const std::vector<double>& d, bool invert) {
    Eigen::VectorXd v(static_cast<Index>(d.size()));
    for (std::size_t j = 0; j < d.size(); ++j) v(static_cast<Index>(j)) = invert ? 1.0 / d[j] : d[j];
    return v.asDiagonal();
}

double relative_gap(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    return max_abs(x - y) / std::max(max_abs(x), 1e-300);
}

// Shared suite for criteria 1-3 and 8.
const std::vector<CsrMatrix>& general_suite() {
    static const std::vector<CsrMatrix> suite = [] {
        Rng rng(20240601);
        std::uniform_int_distribution<Index> size(5, 100);
        std::uniform_real_distribution<double> density(0.05, 0.30);
        std::vector<CsrMatrix> out;
        for (int k = 0; k < 50; ++k) {
            const Index n = size(rng);
            out.push_back(random_general(n, density(rng), rng));
        }
        return out;
    }();
    return suite;
}

Verdict criterion1() {
    const auto start = std::chrono::steady_clock::now();
    Checker c;
    double worst_w = 0.0, worst_l = 0.0;
    for (std::size_t k = 0; k < general_suite().size(); ++k) {
        const auto& a = general_suite()[k];
        const ColumnCursorIndex cols(a);
        const auto f = ffinv_vector(a, cols, DropRule(0.0));
        const auto g = iluff_factorize(a, cols, DropRule(0.0));
        const Eigen::MatrixXd ad = to_eigen(a);
        const double scale = a.max_abs();
        const double ew = max_abs(dense_w(f) * ad * dense_z(f) - diag_of(f.d, true)) / scale;
        const double el = max_abs(dense_l(g) * diag_of(g.d, true) * dense_u(g) - ad) / scale;
        worst_w = std::max(worst_w, ew);
        worst_l = std::max(worst_l, el);
        c.expect(ew <= 1e-10, fmt("matrix %zu: |WAZ-D^-1| = %.3g |A|", k, ew));
        c.expect(el <= 1e-10, fmt("matrix %zu: |LD^-1U-A| = %.3g |A|", k, el));
    }
    const double t = seconds_since(start);
    c.expect(t < 10.0, fmt("runtime %.2f s", t));
    const auto detail = fmt("50 matrices, max |WAZ-D^-1|/|A| = %.2e, max |LD^-1U-A|/|A| = %.2e, %.2f s", worst_w,
                            worst_l, t);
    return {c.ok() ? Outcome::pass : Outcome::fail, c.ok() ? detail : c.failures()};
}

Verdict criterion2() {
    Checker c;
    double worst = 0.0;
    for (std::size_t k = 0; k < general_suite().size(); ++k) {
        const auto& a = general_suite()[k];
        const ColumnCursorIndex cols(a);
        for (double tau : {0.0, 0.05, 0.1}) {
            const auto f = ffinv_vector(a, cols, DropRule(tau));
            const auto g = ffinv_scalar(a, cols, DropRule(tau));
            double gap = std::max(relative_gap(dense_w(f), dense_w(g)), relative_gap(dense_z(f), dense_z(g)));
            for (std::size_t j = 0; j < f.d.size(); ++j) gap = std::max(gap, std::abs(f.d[j] - g.d[j]) / std::abs(f.d[j]));
            worst = std::max(worst, gap);
            c.expect(gap <= 1e-12, fmt("matrix %zu tau %.2f: relative gap %.3g", k, tau, gap));
        }
    }
    return {c.ok() ? Outcome::pass : Outcome::fail,
            c.ok() ? fmt("150 factor pairs, max relative gap %.2e", worst) : c.failures()};
}

Verdict criterion3() {
    Checker c;
    double worst = 0.0;
    for (std::size_t k = 0; k < general_suite().size(); ++k) {
        const auto& a = general_suite()[k];
        const ColumnCursorIndex cols(a);
        const auto f = ffinv_vector(a, cols, DropRule(0.0));
        const auto g = iluff_factorize(a, cols, DropRule(0.0));
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a.size(), a.size());
        const double lw = max_abs(dense_l(g) * dense_w(f) - id);
        const double zu = max_abs(dense_z(f) * dense_u(g) - id);
        const double bound = 1e-10 * static_cast<double>(a.size());
        worst = std::max({worst, lw / static_cast<double>(a.size()), zu / static_cast<double>(a.size())});
        c.expect(lw <= bound, fmt("matrix %zu: |LW-I| = %.3g", k, lw));
        c.expect(zu <= bound, fmt("matrix %zu: |ZU-I| = %.3g", k, zu));
    }
    return {c.ok() ? Outcome::pass : Outcome::fail,
            c.ok() ? fmt("50 matrices, max |LW-I|/n, |ZU-I|/n = %.2e", worst) : c.failures()};
}

void check_h_pivots(Checker& c, const CsrMatrix& a, const std::string& label) {
    const auto comp = comparison_matrix(a);
    const ColumnCursorIndex cols(a), ccols(comp);
    for (double tau : {0.0, 0.1}) {
        const auto f = ffinv_vector(a, cols, DropRule(tau));
        const auto fc = ffinv_vector(comp, ccols, DropRule(tau));
        const auto g = iluff_factorize(a, cols, DropRule(tau));
        c.expect(f.breakdown_count == 0 && g.breakdown_count == 0, label + fmt(" tau %.1f: pivot safeguard", tau));
        for (Index j = 0; j < a.size(); ++j) {
            const bool neg = a.at(j, j) < 0.0;
            c.expect((f.d[j] < 0.0) == neg && (g.d[j] < 0.0) == neg, label + fmt(" tau %.1f: sign of d_%lld", tau, (long long)j));
            const double pa = std::abs(1.0 / f.d[j]), pc = 1.0 / fc.d[j];
            c.expect(pc > 0.0 && pa >= pc * (1.0 - 1e-12),
                     label + fmt(" tau %.1f: |1/d_%lld| = %.6g < %.6g", tau, (long long)j, pa, pc));
        }
    }
}

Verdict criterion4() {
    const auto start = std::chrono::steady_clock::now();
    Checker c;
    Rng rng(4242);
    std::uniform_int_distribution<Index> size(10, 200);
    std::uniform_real_distribution<double> density(0.01, 0.2);
    int m_count = 0, h_count = 0;
    for (int k = 0; k < 100; ++k) {
        const auto a = random_m_matrix(size(rng), density(rng), rng);
        const std::string label = "M-matrix " + std::to_string(k);
        const bool verified = is_m_matrix(DenseMatrix::from_csr(a));
        c.expect(verified, label + " rejected by oracle");
        if (!verified) continue;
        ++m_count;
        check_h_pivots(c, a, label);
        const ColumnCursorIndex cols(a);
        const auto exact = ffinv_vector(a, cols, DropRule(0.0));
        const auto approx = ffinv_vector(a, cols, DropRule(0.1));
        const Eigen::MatrixXd w = dense_w(exact), wh = dense_w(approx);
        const Eigen::MatrixXd z = dense_z(exact), zh = dense_z(approx);
        c.expect(wh.minCoeff() >= 0.0 && zh.minCoeff() >= 0.0, label + ": negative approximate factor entry");
        c.expect((w - wh).minCoeff() >= -1e-14 * max_abs(w), label + ": W >= W^ violated");
        c.expect((z - zh).minCoeff() >= -1e-14 * max_abs(z), label + ": Z >= Z^ violated");
    }
    for (int k = 0; k < 100; ++k) {
        const auto a = random_h_matrix(size(rng), density(rng), rng);
        const std::string label = "H-matrix " + std::to_string(k);
        const bool verified = is_h_matrix(DenseMatrix::from_csr(a));
        c.expect(verified, label + " rejected by oracle");
        if (!verified) continue;
        ++h_count;
        check_h_pivots(c, a, label);
    }
    const double t = seconds_since(start);
    c.expect(t < 60.0, fmt("runtime %.2f s", t));
    return {c.ok() ? Outcome::pass : Outcome::fail,
            c.ok() ? fmt("%d M-matrices and %d H-matrices verified, tau in {0, 0.1}, %.2f s", m_count, h_count, t)
                   : c.failures()};
}

Verdict criterion5() {
    Checker c;
    Rng rng(5151);
    std::uniform_int_distribution<Index> size(5, 100);
    std::uniform_real_distribution<double> density(0.05, 0.3);
    for (int k = 0; k < 200; ++k) {
        const bool spd = k < 100;
        const Index n = size(rng);
        const auto a = spd ? random_spd(n, density(rng), rng) : random_nonsymmetric_pd(n, density(rng), rng);
        const std::string label = (spd ? "SPD " : "nonsymmetric PD ") + std::to_string(k % 100);
        c.expect(min_symmetric_part_eigenvalue(a) > 0.0, label + ": symmetric part not PD");
        const ColumnCursorIndex cols(a);
        for (double tau : {0.0, 0.1, 0.5}) {
            try {
                const auto f = iluff_factorize(a, cols, DropRule(tau), PivotMode::positive_definite);
                c.expect(f.breakdown_count == 0, label + fmt(" tau %.1f: breakdown", tau));
                for (double d : f.d) c.expect(d > 0.0, label + fmt(" tau %.1f: d_j <= 0", tau));
            } catch (const Error& e) {
                c.expect(false, label + fmt(" tau %.1f: ", tau) + e.what());
            }
        }
    }
    return {c.ok() ? Outcome::pass : Outcome::fail,
            c.ok() ? std::string("100 SPD and 100 nonsymmetric PD matrices, tau in {0, 0.1, 0.5}") : c.failures()};
}

fs::path matrix_dir() {
    if (const char* env = std::getenv("PRECOND_LAB_MATRIX_DIR")) return env;
    return PRECOND_LAB_MATRIX_DIR;
}

struct ReferenceRun {
    SolveReport plain;
    SolveReport pre;
    double density = 0.0;
};

ReferenceRun solve_pair(const CsrMatrix& a) {
    const auto b = make_rhs_ones_solution(a);
    const GmresConfig cfg{50, 10000, 1e-10};
    ReferenceRun r;
    r.plain = gmres_right(a, b, Preconditioner{}, cfg).report;
    const Preconditioner m(iluff_factorize(a, ColumnCursorIndex(a), DropRule(0.1)));
    r.pre = gmres_right(a, b, m, cfg).report;
    r.density = *m.density(a);
    return r;
}

Verdict criterion6() {
    const auto dir = matrix_dir();
    std::vector<std::string> missing;
    for (const char* name : {"fs_183_1", "fs_183_6", "sherman3"})
        if (!fs::exists(dir / (std::string(name) + ".mtx"))) missing.push_back(name);
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        return {Outcome::skip, "matrix files not found in " + dir.string() + ": " + list};
    }
    Checker c;
    std::ostringstream detail;
    for (const char* name : {"fs_183_1", "fs_183_6"}) {
        const auto r = solve_pair(read_matrix_market(dir / (std::string(name) + ".mtx")));
        c.expect(r.plain.converged, std::string(name) + ": unpreconditioned GMRES(50) did not converge");
        c.expect(r.pre.converged && r.pre.iterations <= 20,
                 fmt("%s: ILUFF its %lld", name, (long long)r.pre.iterations));
        c.expect(r.density >= 0.3 && r.density <= 0.9, fmt("%s: density %.3f", name, r.density));
        if (r.plain.converged && r.pre.converged)
            c.expect(r.pre.iterations < r.plain.iterations, std::string(name) + ": preconditioned not faster");
        detail << name << " its " << r.plain.iterations << "->" << r.pre.iterations << " density "
               << fmt("%.3f", r.density) << "; ";
    }
    {
        const auto r = solve_pair(read_matrix_market(dir / "sherman3.mtx"));
        c.expect(!r.plain.converged, "sherman3: unpreconditioned GMRES(50) converged");
        c.expect(r.pre.converged && r.pre.iterations <= 5000,
                 fmt("sherman3: ILUFF its %lld", (long long)r.pre.iterations));
        if (r.plain.converged && r.pre.converged)
            c.expect(r.pre.iterations < r.plain.iterations, "sherman3: preconditioned not faster");
        detail << "sherman3 its " << (r.plain.converged ? std::to_string(r.plain.iterations) : "+") << "->"
               << r.pre.iterations;
    }
    return {c.ok() ? Outcome::pass : Outcome::fail, c.ok() ? detail.str() : c.failures()};
}

Verdict criterion7() {
    Rng rng(7007);
    const auto a = random_h_matrix(500, 0.01, rng, 0.01, 0.05);
    const auto b = make_rhs_ones_solution(a);
    const GmresConfig cfg{50, 10000, 1e-10};
    const ColumnCursorIndex cols(a);
    const auto coarse = gmres_right(a, b, Preconditioner(iluff_factorize(a, cols, DropRule(0.1))), cfg).report;
    const auto fine = gmres_right(a, b, Preconditioner(iluff_factorize(a, cols, DropRule(0.01))), cfg).report;
    const bool ok = coarse.converged && fine.converged && fine.iterations <= coarse.iterations;
    return {ok ? Outcome::pass : Outcome::fail,
            fmt("500x500 H-matrix: its(tau=0.1) = %lld%s, its(tau=0.01) = %lld%s", (long long)coarse.iterations,
                coarse.converged ? "" : " (not converged)", (long long)fine.iterations,
                fine.converged ? "" : " (not converged)")};
}

Verdict criterion8() {
    Checker c;
    Rng rng(8080);
    std::vector<CsrMatrix> matrices = general_suite();
    for (int k = 0; k < 20; ++k) matrices.push_back(random_h_matrix(40 + 5 * k, 0.1, rng));
    int runs = 0, converged = 0;
    double worst_err = 0.0, worst_res = 0.0;
    for (std::size_t k = 0; k < matrices.size(); ++k) {
        const auto& a = matrices[k];
        const double cond = condition_number(a);
        if (cond > 1e4 || !DenseMatrix::from_csr(a).inverse()) continue;
        const auto b = make_rhs_ones_solution(a);
        const ColumnCursorIndex cols(a);
        std::vector<Preconditioner> ms;
        ms.emplace_back();
        for (double tau : {0.0, 0.1}) {
            ms.emplace_back(iluff_factorize(a, cols, DropRule(tau)));
            ms.emplace_back(ffinv_vector(a, cols, DropRule(tau)));
        }
        for (const auto& m : ms) {
            ++runs;
            const auto res = gmres_right(a, b, m, GmresConfig{});
            if (!res.report.converged) continue;
            ++converged;
            double err = 0.0;
            for (double v : res.x) err = std::max(err, std::abs(v - 1.0));
            auto r = a.multiply(res.x);
            for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
            const double gap = std::abs(norm2(r) / norm2(b) - res.report.final_relative_residual);
            worst_err = std::max(worst_err, err);
            worst_res = std::max(worst_res, gap);
            c.expect(err <= 1e-5, fmt("matrix %zu: |x-e| = %.3g", k, err));
            c.expect(gap <= 1e-8, fmt("matrix %zu: residual mismatch %.3g", k, gap));
        }
    }
    c.expect(converged > 0, "no converged runs");
    return {c.ok() ? Outcome::pass : Outcome::fail,
            c.ok() ? fmt("%d/%d runs converged, max |x-e| = %.2e, max residual mismatch = %.2e", converged, runs,
                         worst_err, worst_res)
                   : c.failures()};
}

const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
    {"exact factorization at tau=0", criterion1},
    {"vector and scalar forms agree", criterion2},
    {"LW = I and ZU = I", criterion3},
    {"M- and H-matrix pivots", criterion4},
    {"positive-definite pivots", criterion5},
    {"fs_183_1, fs_183_6, sherman3", criterion6},
    {"smaller tau, fewer iterations", criterion7},
    {"solver accuracy", criterion8},
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    int only = 0;
    app.add_option("--criterion", only, "Run a single criterion")->check(CLI::Range(1, 8));
    CLI11_PARSE(app, argc, argv);

    bool failed = false, skipped = false;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        if (only != 0 && static_cast<std::size_t>(only) != k + 1) continue;
        Verdict v;
        try {
            v = criteria[k].second();
        } catch (const std::exception& e) {
            v = {Outcome::fail, std::string("exception: ") + e.what()};
        }
        const char* tag = v.outcome == Outcome::pass ? "PASS" : v.outcome == Outcome::fail ? "FAIL" : "SKIP";
        std::printf("[%s] criterion %zu (%s): %s\n", tag, k + 1, criteria[k].first, v.detail.c_str());
        std::fflush(stdout);
        failed |= v.outcome == Outcome::fail;
        skipped |= v.outcome == Outcome::skip;
    }
    if (failed) return 1;
    return only != 0 && skipped ? 77 : 0;
}
