#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "generators.hpp"
#include "precond_lab/error.hpp"
#include "precond_lab/fapinv.hpp"
#include "precond_lab/matrix_market.hpp"

using namespace precond_lab;
using namespace precond_lab::testing;

namespace {

const CsrMatrix tridiag2 = CsrMatrix::from_triplets(2, {{0, 0, 2.0}, {0, 1, -1.0}, {1, 0, -1.0}, {1, 1, 2.0}});

InverseFactors vec(const CsrMatrix& a, double tau) { return ffinv_vector(a, ColumnCursorIndex(a), DropRule(tau)); }

Eigen::MatrixXd diag_inverse(const InverseFactors& f) {
    Eigen::VectorXd v(f.n);
    for (Index j = 0; j < f.n; ++j) v(j) = 1.0 / f.d[j];
    return v.asDiagonal();
}

Eigen::MatrixXd diag(const InverseFactors& f) {
    return Eigen::Map<const Eigen::VectorXd>(f.d.data(), f.n).asDiagonal();
}

} // namespace

TEST_CASE("drop rule") {
    const DropRule r(0.1);
    CHECK(r.drops(0.05));
    CHECK(r.drops(-0.0999));
    CHECK_FALSE(r.drops(0.1));
    CHECK_FALSE(r.drops(-0.2));
    CHECK_FALSE(DropRule(0.0).drops(1e-300));
    CHECK_THROWS_AS(DropRule(-1.0), Error);
    CHECK_THROWS_AS(DropRule(NAN), Error);
}

TEST_CASE("identity") {
    const auto f = vec(CsrMatrix::identity(5), 0.0);
    CHECK(f.w_rows.nnz() == 0);
    CHECK(f.z_cols.nnz() == 0);
    for (double d : f.d) CHECK(d == 1.0);
    CHECK(f.breakdown_count == 0);
    CoefficientTrace trace;
    const auto g = ffinv_scalar(CsrMatrix::identity(5), ColumnCursorIndex(CsrMatrix::identity(5)), DropRule(0.0), &trace);
    CHECK(trace.alpha.empty());
    CHECK(trace.beta.empty());
    CHECK(g.w_rows.nnz() == 0);
}

TEST_CASE("2x2 tridiagonal example") {
    const auto f = vec(tridiag2, 0.0);
    CHECK(f.d[0] == doctest::Approx(0.5));
    CHECK(f.d[1] == doctest::Approx(2.0 / 3.0));
    const Eigen::MatrixXd w = dense_w(f), z = dense_z(f);
    CHECK(w(1, 0) == doctest::Approx(0.5));
    CHECK(w(0, 1) == 0.0);
    CHECK(z(0, 1) == doctest::Approx(0.5));
    CHECK(z(1, 0) == 0.0);
    const Eigen::MatrixXd inv = z * diag(f) * w;
    const Eigen::MatrixXd expect = to_eigen(tridiag2).inverse();
    CHECK(max_abs(inv - expect) < 1e-15);

    CoefficientTrace trace;
    const auto g = ffinv_scalar(tridiag2, ColumnCursorIndex(tridiag2), DropRule(0.0), &trace);
    REQUIRE(trace.alpha.size() == 1);
    REQUIRE(trace.beta.size() == 1);
    CHECK(trace.alpha[0].i == 0);
    CHECK(trace.alpha[0].step == 1);
    CHECK(trace.alpha[0].value == doctest::Approx(-0.5));
    CHECK(trace.beta[0].value == doctest::Approx(-0.5));
    CHECK(g.w_rows == f.w_rows);
    CHECK(g.z_cols == f.z_cols);
}

TEST_CASE("apply_factored_inverse") {
    const auto f = vec(tridiag2, 0.0);
    const auto y = apply_factored_inverse(f, std::vector<double>{1.0, 1.0});
    CHECK(y[0] == doctest::Approx(1.0));
    CHECK(y[1] == doctest::Approx(1.0));

    Rng rng(10);
    const auto a = random_general(10, 0.3, rng);
    const auto g = vec(a, 0.0);
    const auto x = apply_factored_inverse(g, a.multiply(std::vector<double>(10, 1.0)));
    for (double v : x) CHECK(std::abs(v - 1.0) <= 1e-10);

    const auto id = vec(CsrMatrix::identity(3), 0.0);
    const std::vector<double> v{3.0, -1.0, 2.0};
    CHECK(apply_factored_inverse(id, v) == v);
    CHECK_THROWS_AS(apply_factored_inverse(id, std::vector<double>{1.0}), Error);
    std::vector<double> buf{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(apply_factored_inverse(id, buf, buf), Error);
}

TEST_CASE("exactness at tau = 0") {
    Rng rng(100);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 5 + 5 * trial;
        const auto a = random_general(n, 0.15, rng);
        const auto f = vec(a, 0.0);
        const Eigen::MatrixXd r = dense_w(f) * to_eigen(a) * dense_z(f) - diag_inverse(f);
        CHECK(max_abs(r) <= 1e-10 * a.max_abs());
        CHECK(f.breakdown_count == 0);
    }
}

TEST_CASE("vector and scalar forms agree") {
    Rng rng(200);
    for (int trial = 0; trial < 12; ++trial) {
        const auto a = trial % 2 ? random_h_matrix(20, 0.2, rng) : random_general(20, 0.2, rng);
        for (double tau : {0.0, 0.05, 0.1, 0.3}) {
            const ColumnCursorIndex cols(a);
            const auto f = ffinv_vector(a, cols, DropRule(tau));
            const auto g = ffinv_scalar(a, cols, DropRule(tau));
            CHECK(max_abs(dense_w(f) - dense_w(g)) <= 1e-12 * std::max(1.0, max_abs(dense_w(f))));
            CHECK(max_abs(dense_z(f) - dense_z(g)) <= 1e-12 * std::max(1.0, max_abs(dense_z(f))));
            for (Index j = 0; j < a.size(); ++j) CHECK(std::abs(f.d[j] - g.d[j]) <= 1e-12 * std::abs(f.d[j]));
        }
    }
}

TEST_CASE("unit triangular structure and purge threshold at every tau") {
    Rng rng(300);
    const auto a = random_h_matrix(50, 0.1, rng);
    for (double tau : {0.0, 0.01, 0.1, 0.5}) {
        const auto f = vec(a, tau);
        for (Index j = 0; j < f.n; ++j) {
            for (auto i : f.w_rows.indices(j)) CHECK(i < j);
            for (auto i : f.z_cols.indices(j)) CHECK(i < j);
            for (double v : f.w_rows.values(j)) CHECK(std::abs(v) >= tau);
            for (double v : f.z_cols.values(j)) CHECK(std::abs(v) >= tau);
        }
    }
}

TEST_CASE("M-matrix: approximate factors bounded by the exact ones") {
    Rng rng(400);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = random_m_matrix(30, 0.15, rng);
        const auto exact = vec(a, 0.0);
        const auto approx = vec(a, 0.1);
        const Eigen::MatrixXd w = dense_w(exact), wh = dense_w(approx);
        const Eigen::MatrixXd z = dense_z(exact), zh = dense_z(approx);
        CHECK(wh.minCoeff() >= 0.0);
        CHECK(zh.minCoeff() >= 0.0);
        CHECK((w - wh).minCoeff() >= -1e-14);
        CHECK((z - zh).minCoeff() >= -1e-14);
        // Exact pivots are ratios of leading principal minors. Dropping
        // removes nonpositive terms from w_j A_{*j}, so approximate pivots
        // can only grow.
        const Eigen::MatrixXd dense = to_eigen(a);
        double previous = 1.0;
        for (Index j = 0; j < a.size(); ++j) {
            const double minor = dense.topLeftCorner(j + 1, j + 1).determinant();
            CHECK(1.0 / exact.d[j] == doctest::Approx(minor / previous).epsilon(1e-10));
            previous = minor;
            CHECK(1.0 / exact.d[j] > 0.0);
            CHECK(1.0 / approx.d[j] >= 1.0 / exact.d[j] * (1 - 1e-14));
        }
    }
}

TEST_CASE("H-matrix pivots dominate those of the comparison matrix") {
    Rng rng(500);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = random_h_matrix(40, 0.1, rng);
        const auto c = comparison_matrix(a);
        for (double tau : {0.0, 0.1}) {
            const auto f = vec(a, tau);
            const auto g = vec(c, tau);
            CHECK(f.breakdown_count == 0);
            for (Index j = 0; j < a.size(); ++j) {
                CHECK(std::signbit(f.d[j]) == std::signbit(a.at(j, j)));
                CHECK(1.0 / g.d[j] > 0.0);
                CHECK(std::abs(1.0 / f.d[j]) >= 1.0 / g.d[j] * (1 - 1e-12));
            }
        }
    }
}

TEST_CASE("zero pivot triggers the safeguard") {
    const auto a = CsrMatrix::from_triplets(2, {{0, 0, -0.0 + 1e-20}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}});
    const auto f = vec(a, 0.0);
    CHECK(f.breakdown_count >= 1);
    CHECK(std::abs(1.0 / f.d[0]) == doctest::Approx(std::sqrt(std::numeric_limits<double>::epsilon())));
    CHECK(f.d[0] > 0.0);
    for (double d : f.d) CHECK(std::isfinite(d));

    const auto b = CsrMatrix::from_triplets(2, {{0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}});
    CHECK(vec(b, 0.0).breakdown_count >= 1);
}

TEST_CASE("non-finite input is a numerical error") {
    const auto a = CsrMatrix::from_triplets(2, {{0, 0, 1.0}, {1, 0, INFINITY}, {1, 1, 1.0}});
    try {
        vec(a, 0.0);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::numerical);
    }
}

TEST_CASE("density counts W, Z and the diagonal") {
    CHECK(vec(CsrMatrix::identity(4), 0.0).density(CsrMatrix::identity(4)) == 1.0);
    CHECK(vec(tridiag2, 0.0).density(tridiag2) == 1.0);
}

TEST_CASE("factor files") {
    const auto f = vec(tridiag2, 0.0);
    const auto prefix = std::filesystem::temp_directory_path() / "precond_lab_fapinv_factors";
    write_factors(f, prefix);
    const auto w = read_matrix_market(prefix.string() + "_W.mtx");
    const auto z = read_matrix_market(prefix.string() + "_Z.mtx");
    const auto d = read_vector(prefix.string() + "_D.txt");
    CHECK(w == f.w_matrix());
    CHECK(z == f.z_matrix());
    CHECK(d == f.d);
    for (const char* s : {"_W.mtx", "_Z.mtx", "_D.txt"}) std::filesystem::remove(prefix.string() + s);
}
