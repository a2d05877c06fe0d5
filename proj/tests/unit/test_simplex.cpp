#include <doctest.h>

#include <random>
#include <vector>

#include "torsilimit/simplex.hpp"

using namespace torsilimit;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

/// Brute-force oracle: enumerate all basic solutions (n active constraints
/// drawn from rows and variable bounds), keep the feasible ones, return the
/// best objective. Independent of the simplex path.
struct VertexOracle {
    bool feasible = false;
    double objective = -1e300;
};

VertexOracle enumerate_vertices(const VectorXd& c, const MatrixXd& A, const VectorXd& b,
                                const VectorXd& lo, const VectorXd& up) {
    const int n = static_cast<int>(c.size());
    const int m = static_cast<int>(A.rows());
    // Constraint list: m rows (a.x = b), then x_j = lo_j, then x_j = up_j.
    const int total = m + 2 * n;
    std::vector<int> pick(n);
    VertexOracle best;

    auto feasible = [&](const VectorXd& x) {
        for (int i = 0; i < m; ++i)
            if (A.row(i).dot(x) > b(i) + 1e-7) return false;
        for (int j = 0; j < n; ++j)
            if (x(j) < lo(j) - 1e-7 || x(j) > up(j) + 1e-7) return false;
        return true;
    };

    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == n) {
            MatrixXd M(n, n);
            VectorXd rhs(n);
            for (int r = 0; r < n; ++r) {
                int k = pick[r];
                if (k < m) {
                    M.row(r) = A.row(k);
                    rhs(r) = b(k);
                } else if (k < m + n) {
                    M.row(r).setZero();
                    M(r, k - m) = 1.0;
                    rhs(r) = lo(k - m);
                } else {
                    M.row(r).setZero();
                    M(r, k - m - n) = 1.0;
                    rhs(r) = up(k - m - n);
                }
            }
            Eigen::FullPivLU<MatrixXd> lu(M);
            if (!lu.isInvertible()) return;
            VectorXd x = lu.solve(rhs);
            if (!feasible(x)) return;
            best.feasible = true;
            best.objective = std::max(best.objective, c.dot(x));
            return;
        }
        for (int k = start; k < total; ++k) {
            pick[depth] = k;
            rec(k + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

}  // namespace

TEST_SUITE("simplex") {

TEST_CASE("one variable against one row") {
    VectorXd c(1), b(1), lo(1), up(1);
    MatrixXd A(1, 1);
    c << 1;
    A << 1;
    b << 5;
    lo << 0;
    up << 8;
    auto sol = simplex_solve(c, A, b, lo, up);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(5.0));
}

TEST_CASE("conflicting bound and row is infeasible") {
    VectorXd c(1), b(1), lo(1), up(1);
    MatrixXd A(1, 1);
    c << 1;
    A << 1;
    b << 5;
    lo << 6;
    up << 8;
    CHECK(simplex_solve(c, A, b, lo, up).status == LpStatus::Infeasible);
}

TEST_CASE("two sites on a shared generator row") {
    VectorXd c(2), b(1), lo(2), up(2);
    MatrixXd A(1, 2);
    c << 1, 1;
    A << 1, 1;
    b << 10;
    lo << 4.8, 4.8;
    up << 8, 8;
    auto sol = simplex_solve(c, A, b, lo, up);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(10.0));
    CHECK(sol.x(0) >= 4.8 - 1e-9);
    CHECK(sol.x(1) >= 4.8 - 1e-9);
    CHECK(sol.nonunique);  // the whole face x1 + x2 = 10 is optimal
}

TEST_CASE("infinite structural bounds are rejected") {
    VectorXd c(1), b(0), lo(1), up(1);
    MatrixXd A(0, 1);
    c << 1;
    lo << 0;
    up << std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(simplex_solve(c, A, b, lo, up), std::invalid_argument);
}

TEST_CASE("box-only problems pick the right bound") {
    VectorXd c(3), b(0), lo(3), up(3);
    MatrixXd A(0, 3);
    c << 2, -1, 0;
    lo << -1, -2, -3;
    up << 4, 5, 6;
    auto sol = simplex_solve(c, A, b, lo, up);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.x(0) == doctest::Approx(4));
    CHECK(sol.x(1) == doctest::Approx(-2));
    CHECK(sol.objective == doctest::Approx(10.0));
}

TEST_CASE("negative coefficients and negative bounds") {
    // maximize x1 - x2 with -x1 + x2 <= 1, x1 + x2 <= 3, boxes [-2, 4].
    VectorXd c(2), b(2), lo(2), up(2);
    MatrixXd A(2, 2);
    c << 1, -1;
    A << -1, 1, 1, 1;
    b << 1, 3;
    lo << -2, -2;
    up << 4, 4;
    auto sol = simplex_solve(c, A, b, lo, up);
    REQUIRE(sol.status == LpStatus::Optimal);
    // Optimum at x = (4-eps...): row2: x1 + x2 <= 3 -> x1 = 4 needs x2 <= -1;
    // objective 4 - (-2) = 6 with row2: 4 - 2 = 2 <= 3 ok, row1: -4 - 2 <= 1 ok.
    CHECK(sol.objective == doctest::Approx(6.0));
}

TEST_CASE("randomized instances match vertex enumeration") {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> nd(1, 3), md(0, 4);
    std::uniform_real_distribution<double> coef(-2.0, 2.0), width(0.5, 3.0), shift(-1.5, 1.5);

    int infeasible_seen = 0;
    for (int trial = 0; trial < 400; ++trial) {
        int n = nd(rng), m = md(rng);
        VectorXd c(n), lo(n), up(n), b(m);
        MatrixXd A(m, n);
        for (int j = 0; j < n; ++j) {
            c(j) = coef(rng);
            lo(j) = shift(rng);
            up(j) = lo(j) + width(rng);
        }
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) A(i, j) = coef(rng);
            b(i) = coef(rng);
        }

        auto sol = simplex_solve(c, A, b, lo, up);
        auto oracle = enumerate_vertices(c, A, b, lo, up);

        if (oracle.feasible) {
            REQUIRE_MESSAGE(sol.status == LpStatus::Optimal, "trial ", trial);
            CHECK_MESSAGE(sol.objective == doctest::Approx(oracle.objective).epsilon(1e-6),
                          "trial ", trial);
        } else {
            ++infeasible_seen;
            CHECK_MESSAGE(sol.status == LpStatus::Infeasible, "trial ", trial);
        }
    }
    CHECK(infeasible_seen > 10);  // the mix actually exercises phase 1
}

}  // TEST_SUITE
