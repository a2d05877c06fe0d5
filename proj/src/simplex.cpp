#include "torsilimit/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace torsilimit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Where { Lower, Upper, Basic };

struct Tableau {
    // Columns: n structural, m slacks, then any artificials.
    Eigen::MatrixXd cols;   // m x N
    Eigen::VectorXd lower, upper;
    Eigen::VectorXd b;
    std::vector<Where> where;
    std::vector<int> basis;  // basis[r] = column index basic in row r
    int m = 0, N = 0;

    double nonbasic_value(int j) const { return where[j] == Where::Upper ? upper(j) : lower(j); }

    Eigen::VectorXd basic_values(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu) const {
        Eigen::VectorXd rhs = b;
        for (int j = 0; j < N; ++j) {
            if (where[j] == Where::Basic) continue;
            double v = nonbasic_value(j);
            if (v != 0.0) rhs -= cols.col(j) * v;
        }
        return lu.solve(rhs);
    }
};

struct IterationResult {
    bool optimal = false;
    bool unbounded = false;
    bool nonunique = false;
};

/// One phase of the bounded-variable simplex, maximizing obj over the tableau.
/// `frozen` columns may never enter the basis (retired artificials).
IterationResult run_phase(Tableau& t, const Eigen::VectorXd& obj, const std::vector<bool>& frozen,
                          double tol, int& iterations) {
    const int guard = 50000 + 200 * (t.N + t.m);
    for (;;) {
        if (++iterations > guard)
            throw std::runtime_error("simplex iteration guard tripped (cycling?)");

        Eigen::MatrixXd B(t.m, t.m);
        for (int r = 0; r < t.m; ++r) B.col(r) = t.cols.col(t.basis[r]);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu_t(B.transpose().eval());

        Eigen::VectorXd xb = t.basic_values(lu);
        Eigen::VectorXd cb(t.m);
        for (int r = 0; r < t.m; ++r) cb(r) = obj(t.basis[r]);
        Eigen::VectorXd y = lu_t.solve(cb);

        // Bland: entering variable is the smallest improving index.
        int enter = -1;
        bool any_zero_rc = false;
        for (int j = 0; j < t.N; ++j) {
            if (t.where[j] == Where::Basic || frozen[j]) continue;
            if (t.upper(j) - t.lower(j) < tol) continue;  // fixed variable
            double d = obj(j) - y.dot(t.cols.col(j));
            bool improving =
                (t.where[j] == Where::Lower && d > tol) || (t.where[j] == Where::Upper && d < -tol);
            if (std::abs(d) <= tol) any_zero_rc = true;
            if (improving) {
                enter = j;
                break;
            }
        }
        if (enter < 0) return {true, false, any_zero_rc};

        double sign = t.where[enter] == Where::Lower ? 1.0 : -1.0;
        Eigen::VectorXd w = lu.solve(t.cols.col(enter));

        // Ratio test: entering moves by sign * step; basics move by -sign * w.
        // The bound flip competes as a candidate with variable index = enter;
        // ties go to the smallest variable index (Bland).
        double best_step = t.upper(enter) - t.lower(enter);
        int best_row = -1;
        int best_var = enter;
        Where best_to = Where::Lower;
        for (int r = 0; r < t.m; ++r) {
            double rate = -sign * w(r);
            if (std::abs(rate) <= 1e-11) continue;
            int jb = t.basis[r];
            double room;
            Where to;
            if (rate < 0) {  // basic decreases toward its lower bound
                if (t.lower(jb) == -kInf) continue;
                room = (xb(r) - t.lower(jb)) / -rate;
                to = Where::Lower;
            } else {  // basic increases toward its upper bound
                if (t.upper(jb) == kInf) continue;
                room = (t.upper(jb) - xb(r)) / rate;
                to = Where::Upper;
            }
            room = std::max(room, 0.0);  // degenerate step when already at the bound
            bool better = room < best_step - 1e-12;
            bool tie = std::abs(room - best_step) <= 1e-12 && jb < best_var;
            if (better || tie) {
                best_step = room;
                best_row = r;
                best_var = jb;
                best_to = to;
            }
        }

        if (!std::isfinite(best_step)) return {false, true, false};

        if (best_row < 0) {
            // Bound flip: the entering variable crosses to its other bound.
            t.where[enter] = t.where[enter] == Where::Lower ? Where::Upper : Where::Lower;
            continue;
        }

        t.where[t.basis[best_row]] = best_to;
        t.basis[best_row] = enter;
        t.where[enter] = Where::Basic;
    }
}

}  // namespace

LpSolution simplex_solve(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                         const Eigen::VectorXd& b, const Eigen::VectorXd& lower,
                         const Eigen::VectorXd& upper, double tol) {
    const int n = static_cast<int>(c.size());
    const int m = static_cast<int>(A.rows());
    if (A.cols() != n || b.size() != m || lower.size() != n || upper.size() != n)
        throw std::invalid_argument("simplex_solve: inconsistent dimensions");
    for (int j = 0; j < n; ++j) {
        if (!std::isfinite(lower(j)) || !std::isfinite(upper(j)))
            throw std::invalid_argument("simplex_solve: structural bounds must be finite");
        if (lower(j) > upper(j) + tol) return {LpStatus::Infeasible, {}, 0.0, false, 0};
    }

    LpSolution out;
    if (m == 0) {
        out.status = LpStatus::Optimal;
        out.x.resize(n);
        for (int j = 0; j < n; ++j) {
            out.x(j) = c(j) > tol ? upper(j) : lower(j);
            if (std::abs(c(j)) <= tol && upper(j) - lower(j) > tol) out.nonunique = true;
        }
        out.objective = c.dot(out.x);
        return out;
    }

    // Start with structural variables at their lower bounds, slacks basic.
    Tableau t;
    t.m = m;
    Eigen::VectorXd s0 = b - A * lower;
    std::vector<int> art_rows;
    for (int r = 0; r < m; ++r)
        if (s0(r) < -tol) art_rows.push_back(r);
    const int p = static_cast<int>(art_rows.size());
    t.N = n + m + p;
    t.cols.setZero(m, t.N);
    t.cols.leftCols(n) = A;
    t.cols.block(0, n, m, m).setIdentity();
    t.lower.setZero(t.N);
    t.upper.setConstant(t.N, kInf);
    t.lower.head(n) = lower;
    t.upper.head(n) = upper;
    t.b = b;
    t.where.assign(t.N, Where::Lower);
    t.basis.resize(m);
    for (int r = 0; r < m; ++r) {
        t.basis[r] = n + r;
        t.where[n + r] = Where::Basic;
    }
    for (int a = 0; a < p; ++a) {
        int r = art_rows[a];
        int j = n + m + a;
        t.cols(r, j) = -1.0;       // A x + s - a = b with a >= 0 picking up the violation
        t.basis[r] = j;
        t.where[j] = Where::Basic;
        t.where[n + r] = Where::Lower;  // the displaced slack waits at zero
    }

    std::vector<bool> frozen(t.N, false);
    out.iterations = 0;

    if (p > 0) {
        Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(t.N);
        for (int a = 0; a < p; ++a) phase1(n + m + a) = -1.0;
        IterationResult r1 = run_phase(t, phase1, frozen, tol, out.iterations);
        if (r1.unbounded)
            throw std::runtime_error("simplex phase 1 unbounded; formulation bug");
        Eigen::MatrixXd B(m, m);
        for (int r = 0; r < m; ++r) B.col(r) = t.cols.col(t.basis[r]);
        Eigen::VectorXd xb = t.basic_values(Eigen::PartialPivLU<Eigen::MatrixXd>(B));
        double infeas = 0.0;
        for (int r = 0; r < m; ++r)
            if (t.basis[r] >= n + m) infeas += std::max(0.0, xb(r));
        if (infeas > tol) {
            out.status = LpStatus::Infeasible;
            return out;
        }
        // Retire artificials: pin them to zero so they never re-enter.
        for (int j = n + m; j < t.N; ++j) {
            frozen[j] = true;
            t.upper(j) = 0.0;
        }
    }

    Eigen::VectorXd obj = Eigen::VectorXd::Zero(t.N);
    obj.head(n) = c;
    IterationResult r2 = run_phase(t, obj, frozen, tol, out.iterations);
    if (r2.unbounded) {
        out.status = LpStatus::Unbounded;
        return out;
    }

    Eigen::MatrixXd B(m, m);
    for (int r = 0; r < m; ++r) B.col(r) = t.cols.col(t.basis[r]);
    Eigen::VectorXd xb = t.basic_values(Eigen::PartialPivLU<Eigen::MatrixXd>(B));
    out.x.resize(n);
    for (int j = 0; j < n; ++j)
        out.x(j) = t.where[j] == Where::Basic ? 0.0 : t.nonbasic_value(j);
    for (int r = 0; r < m; ++r)
        if (t.basis[r] < n) out.x(t.basis[r]) = xb(r);
    // Clean tiny bound violations from floating-point noise.
    for (int j = 0; j < n; ++j)
        out.x(j) = std::min(std::max(out.x(j), lower(j)), upper(j));
    out.objective = c.dot(out.x);
    out.status = LpStatus::Optimal;
    out.nonunique = r2.nonunique;
    return out;
}

}  // namespace torsilimit
