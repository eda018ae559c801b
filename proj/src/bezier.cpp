#include "otrp/bezier.hpp"

#include <Eigen/QR>
#include <cmath>
#include <stdexcept>
#include <string>

namespace otrp {

namespace {

void check_eps(double eps) {
    if (!(eps >= 0.0 && eps <= 1.0))
        throw std::invalid_argument("curve parameter must lie in [0, 1], got " +
                                    std::to_string(eps));
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= double(n - k + i) / double(i);
    return r;
}

}  // namespace

Eigen::VectorXd bernstein_basis(int degree, double eps) {
    if (degree < 0) throw std::invalid_argument("bernstein_basis: degree must be >= 0");
    check_eps(eps);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(degree + 1);
    b(0) = 1.0;
    for (int d = 1; d <= degree; ++d) {
        for (int k = d; k >= 1; --k) b(k) = eps * b(k - 1) + (1.0 - eps) * b(k);
        b(0) = (1.0 - eps) * b(0);
    }
    return b;
}

Eigen::VectorXd bernstein_basis_derivative(int degree, double eps, int order) {
    if (order < 0) throw std::invalid_argument("bernstein_basis_derivative: order must be >= 0");
    if (order == 0) return bernstein_basis(degree, eps);
    check_eps(eps);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(degree + 1);
    if (order > degree) return out;

    const Eigen::VectorXd low = bernstein_basis(degree - order, eps);
    double falling = 1.0;
    for (int i = 0; i < order; ++i) falling *= double(degree - i);

    // B^{(n)}_{d,k} = (d)_n * sum_i (-1)^i C(n,i) B_{d-n, k-n+i}
    for (int k = 0; k <= degree; ++k) {
        double acc = 0.0;
        for (int i = 0; i <= order; ++i) {
            const int idx = k - order + i;
            if (idx < 0 || idx > degree - order) continue;
            const double sign = (i % 2 == 0) ? 1.0 : -1.0;
            acc += sign * binomial(order, i) * low(idx);
        }
        out(k) = falling * acc;
    }
    return out;
}

BezierCurve::BezierCurve(Eigen::MatrixXd control_points) : pts_(std::move(control_points)) {
    if (pts_.cols() < 2)
        throw std::invalid_argument("BezierCurve: at least two control points required");
    if (pts_.rows() < 1) throw std::invalid_argument("BezierCurve: empty dimension");
}

Eigen::VectorXd BezierCurve::eval(double eps, int order) const {
    if (pts_.cols() < 2) throw std::logic_error("BezierCurve: not initialized");
    if (order < 0) throw std::invalid_argument("BezierCurve::eval: order must be >= 0");
    check_eps(eps);
    const int d = degree();
    if (order > d) return Eigen::VectorXd::Zero(dim());

    Eigen::MatrixXd work = pts_;
    double scale = 1.0;
    for (int t = 0; t < order; ++t) {
        const int cols = int(work.cols());
        for (int i = 0; i + 1 < cols; ++i) work.col(i) = work.col(i + 1) - work.col(i);
        work.conservativeResize(Eigen::NoChange, cols - 1);
        scale *= double(d - t);
    }
    int cols = int(work.cols());
    while (cols > 1) {
        for (int i = 0; i + 1 < cols; ++i)
            work.col(i) = (1.0 - eps) * work.col(i) + eps * work.col(i + 1);
        --cols;
    }
    return scale * work.col(0);
}

double polyline_length(const Eigen::MatrixXd& points) {
    double total = 0.0;
    for (int i = 0; i + 1 < points.cols(); ++i) total += (points.col(i + 1) - points.col(i)).norm();
    return total;
}

std::vector<double> polyline_arc_fractions(const Eigen::MatrixXd& points) {
    const int n = int(points.cols());
    std::vector<double> t(n, 0.0);
    const double total = polyline_length(points);
    if (total <= 0.0) {
        for (int i = 0; i < n; ++i) t[i] = n > 1 ? double(i) / double(n - 1) : 0.0;
        return t;
    }
    double acc = 0.0;
    for (int i = 1; i < n; ++i) {
        acc += (points.col(i) - points.col(i - 1)).norm();
        t[i] = acc / total;
    }
    t[n - 1] = 1.0;
    return t;
}

Eigen::MatrixXd resample_polyline(const Eigen::MatrixXd& points, int count) {
    if (count < 2) throw std::invalid_argument("resample_polyline: count must be >= 2");
    if (points.cols() < 1) throw std::invalid_argument("resample_polyline: empty polyline");
    const double total = polyline_length(points);
    Eigen::MatrixXd out(points.rows(), count);
    if (total <= 0.0) {
        for (int i = 0; i < count; ++i) out.col(i) = points.col(0);
        return out;
    }
    int seg = 0;
    double seg_start = 0.0;
    double seg_len = (points.col(1) - points.col(0)).norm();
    for (int i = 0; i < count; ++i) {
        const double target = total * double(i) / double(count - 1);
        while (seg + 2 < points.cols() && seg_start + seg_len < target) {
            seg_start += seg_len;
            ++seg;
            seg_len = (points.col(seg + 1) - points.col(seg)).norm();
        }
        const double local = seg_len > 0.0 ? (target - seg_start) / seg_len : 0.0;
        const double u = std::min(std::max(local, 0.0), 1.0);
        out.col(i) = (1.0 - u) * points.col(seg) + u * points.col(seg + 1);
    }
    out.col(0) = points.col(0);
    out.col(count - 1) = points.col(points.cols() - 1);
    return out;
}

BezierFit fit_bezier_lsq(const Eigen::MatrixXd& data, const std::vector<double>& params,
                         int n_ctrl, bool clamp_ends) {
    const int n = int(data.cols());
    if (int(params.size()) != n)
        throw std::invalid_argument("fit_bezier_lsq: parameter count mismatch");
    if (n < 2) throw std::invalid_argument("fit_bezier_lsq: need at least two data points");
    if (n_ctrl < 2) throw std::invalid_argument("fit_bezier_lsq: need at least two control points");
    if (clamp_ends && n_ctrl < 4)
        throw std::invalid_argument("fit_bezier_lsq: clamped fit needs at least four control points");

    const int degree = n_ctrl - 1;
    Eigen::MatrixXd M(n, n_ctrl);
    for (int i = 0; i < n; ++i) M.row(i) = bernstein_basis(degree, params[i]).transpose();

    BezierFit out;
    Eigen::MatrixXd ctrl(data.rows(), n_ctrl);

    if (!clamp_ends) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
        if (qr.rank() < n_ctrl) {
            out.rank_deficient = true;
            ctrl = resample_polyline(data, n_ctrl);
        } else {
            ctrl = qr.solve(data.transpose()).transpose();
        }
    } else {
        const Eigen::VectorXd first = data.col(0), last = data.col(n - 1);
        const int nf = n_ctrl - 4;
        if (nf == 0) {
            ctrl.col(0) = first;
            ctrl.col(1) = first;
            ctrl.col(2) = last;
            ctrl.col(3) = last;
        } else {
            Eigen::MatrixXd Mf(n, nf);
            for (int j = 0; j < nf; ++j) Mf.col(j) = M.col(j + 2);
            Eigen::MatrixXd rhs = data.transpose();
            rhs -= (M.col(0) + M.col(1)) * first.transpose();
            rhs -= (M.col(n_ctrl - 2) + M.col(n_ctrl - 1)) * last.transpose();
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Mf);
            if (qr.rank() < nf) {
                out.rank_deficient = true;
                ctrl = resample_polyline(data, n_ctrl);
            } else {
                const Eigen::MatrixXd free = qr.solve(rhs).transpose();
                ctrl.middleCols(2, nf) = free;
            }
            ctrl.col(0) = first;
            ctrl.col(1) = first;
            ctrl.col(n_ctrl - 2) = last;
            ctrl.col(n_ctrl - 1) = last;
        }
    }
    out.curve = BezierCurve(std::move(ctrl));
    return out;
}

ReferenceFit fit_reference(const Eigen::MatrixXd& waypoints, int n_ctrl, bool clamp_ends) {
    if (waypoints.cols() < 2)
        throw std::invalid_argument("fit_reference: need at least two waypoints");

    ReferenceFit out;
    out.waypoint_params = polyline_arc_fractions(waypoints);

    BezierFit fit = fit_bezier_lsq(waypoints, out.waypoint_params, n_ctrl, clamp_ends);
    out.curve = fit.curve;
    out.degenerate_fallback = fit.rank_deficient;

    double acc = 0.0;
    for (int i = 0; i < waypoints.cols(); ++i)
        acc += (out.curve.eval(out.waypoint_params[i]) - waypoints.col(i)).squaredNorm();
    out.rms_error = std::sqrt(acc / double(waypoints.cols()));
    return out;
}

}  // namespace otrp
