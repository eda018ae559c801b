#include "otrp/simplex.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace otrp {

namespace {

constexpr double kEps = 1e-9;

// Condensed tableau: rows = constraints, one extra objective row, columns =
// structural + surplus + artificial + rhs. Bland's rule on both choices.
struct Tableau {
    Eigen::MatrixXd T;          // (m + 1) x (cols + 1)
    std::vector<int> basis;     // basis column per row
    int m = 0;
    int cols = 0;

    double& rhs(int r) { return T(r, cols); }
    double& obj(int c) { return T(m, c); }

    void pivot(int pr, int pc) {
        T.row(pr) /= T(pr, pc);
        for (int r = 0; r <= m; ++r) {
            if (r == pr) continue;
            const double f = T(r, pc);
            if (f != 0.0) T.row(r) -= f * T.row(pr);
        }
        basis[pr] = pc;
    }

    // Bland: entering = lowest-index column with negative reduced cost;
    // leaving = min ratio, ties broken by lowest basis column index.
    // Returns 0 on optimum, 1 after a pivot, -1 when unbounded.
    int step(int col_limit) {
        int pc = -1;
        for (int c = 0; c < col_limit; ++c) {
            if (T(m, c) < -kEps) {
                pc = c;
                break;
            }
        }
        if (pc < 0) return 0;
        int pr = -1;
        double best = 0.0;
        for (int r = 0; r < m; ++r) {
            if (T(r, pc) > kEps) {
                const double ratio = rhs(r) / T(r, pc);
                if (pr < 0 || ratio < best - 1e-12 ||
                    (std::abs(ratio - best) <= 1e-12 && basis[r] < basis[pr])) {
                    pr = r;
                    best = ratio;
                }
            }
        }
        if (pr < 0) return -1;
        pivot(pr, pc);
        return 1;
    }
};

}  // namespace

LpResult simplex_min(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                     const Eigen::VectorXd& c, int max_pivots) {
    const int m = int(A.rows());
    const int n = int(A.cols());
    if (b.size() != m || c.size() != n)
        throw std::invalid_argument("simplex_min: dimension mismatch");

    LpResult out;
    if (m == 0) {
        // only x >= 0 remains; min of c'x is at the origin when c >= 0
        for (int j = 0; j < n; ++j)
            if (c(j) < 0.0) {
                out.status = LpStatus::unbounded;
                return out;
            }
        out.status = LpStatus::optimal;
        out.x = Eigen::VectorXd::Zero(n);
        out.objective = 0.0;
        return out;
    }

    // Equilibrate rows to unit max magnitude; mixed constraint scales
    // otherwise push reduced-cost noise past the pivot tolerance.
    Eigen::MatrixXd As = A;
    Eigen::VectorXd bs = b;
    for (int r = 0; r < m; ++r) {
        const double sc = As.row(r).cwiseAbs().maxCoeff();
        if (sc > 0.0) {
            As.row(r) /= sc;
            bs(r) /= sc;
        }
    }

    // Row normal form: A x - s = b with b >= 0 after sign flips.
    // Rows flipped to surplus coefficient +1 take the surplus as basis;
    // the rest get artificial variables.
    std::vector<int> art_rows;
    for (int r = 0; r < m; ++r)
        if (bs(r) > 0.0) art_rows.push_back(r);
    const int n_art = int(art_rows.size());

    Tableau tab;
    tab.m = m;
    tab.cols = n + m + n_art;
    tab.T = Eigen::MatrixXd::Zero(m + 1, tab.cols + 1);
    tab.basis.assign(m, -1);

    int art = 0;
    for (int r = 0; r < m; ++r) {
        const double sgn = bs(r) > 0.0 ? 1.0 : -1.0;
        tab.T.block(r, 0, 1, n) = sgn * As.row(r);
        tab.T(r, n + r) = -sgn;  // surplus for the >= constraint
        tab.rhs(r) = sgn * bs(r);
        if (bs(r) > 0.0) {
            tab.T(r, n + m + art) = 1.0;
            tab.basis[r] = n + m + art;
            ++art;
        } else {
            tab.basis[r] = n + r;  // flipped row: surplus enters with +1
        }
    }

    int pivots = 0;

    if (n_art > 0) {
        // phase 1: min sum of artificials
        for (int r = 0; r < m; ++r)
            if (tab.basis[r] >= n + m) tab.T.row(m) -= tab.T.row(r);
        while (true) {
            const int rc = tab.step(n + m);  // artificials never re-enter
            if (rc == 0) break;
            // phase 1 is bounded below by zero, so a "no pivot row" report
            // is a stall at noise level; the infeasibility check decides
            if (rc < 0) break;
            if (++pivots > max_pivots) {
                out.status = LpStatus::iteration_limit;
                return out;
            }
        }
        double infeas = 0.0;
        for (int r = 0; r < m; ++r)
            if (tab.basis[r] >= n + m) infeas += tab.rhs(r);
        if (infeas > 1e-7) {
            out.status = LpStatus::infeasible;
            return out;
        }
        // drive leftover artificials out of the basis or drop their rows
        for (int r = 0; r < m; ++r) {
            if (tab.basis[r] < n + m) continue;
            int pc = -1;
            for (int cidx = 0; cidx < n + m; ++cidx)
                if (std::abs(tab.T(r, cidx)) > kEps) {
                    pc = cidx;
                    break;
                }
            if (pc >= 0)
                tab.pivot(r, pc);
            else
                tab.rhs(r) = 0.0;  // redundant row
        }
    }

    // phase 2 objective row over structural + surplus columns
    tab.T.row(m).setZero();
    tab.T.block(m, 0, 1, n) = c.transpose();
    for (int r = 0; r < m; ++r) {
        if (tab.basis[r] < n + m && std::abs(tab.T(m, tab.basis[r])) > 0.0)
            tab.T.row(m) -= tab.T(m, tab.basis[r]) * tab.T.row(r);
    }

    while (true) {
        const int rc = tab.step(n + m);
        if (rc == 0) break;
        if (rc < 0) {
            out.status = LpStatus::unbounded;
            return out;
        }
        if (++pivots > max_pivots) {
            out.status = LpStatus::iteration_limit;
            return out;
        }
    }

    out.x = Eigen::VectorXd::Zero(n);
    for (int r = 0; r < m; ++r)
        if (tab.basis[r] < n) out.x(tab.basis[r]) = tab.rhs(r);
    out.objective = c.dot(out.x);
    out.status = LpStatus::optimal;
    return out;
}

}  // namespace otrp
