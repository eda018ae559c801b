#pragma once

#include <Eigen/Core>
#include <vector>

namespace otrp {

// Bernstein basis of the given degree evaluated at eps in [0, 1].
Eigen::VectorXd bernstein_basis(int degree, double eps);

// order-th derivative of every basis function; order > degree gives zeros.
Eigen::VectorXd bernstein_basis_derivative(int degree, double eps, int order);

class BezierCurve {
public:
    BezierCurve() = default;
    explicit BezierCurve(Eigen::MatrixXd control_points);  // dim x count, count >= 2

    int degree() const { return int(pts_.cols()) - 1; }
    int count() const { return int(pts_.cols()); }
    int dim() const { return int(pts_.rows()); }
    const Eigen::MatrixXd& control_points() const { return pts_; }

    // de Casteljau on forward-differenced control points; order > degree
    // yields the zero vector, eps outside [0, 1] is rejected.
    Eigen::VectorXd eval(double eps, int order = 0) const;

private:
    Eigen::MatrixXd pts_;
};

// cumulative arc-length fractions of a polyline given by columns; a
// zero-length polyline gets uniform fractions.
std::vector<double> polyline_arc_fractions(const Eigen::MatrixXd& points);

double polyline_length(const Eigen::MatrixXd& points);

// count points spaced uniformly in arc length along the polyline.
Eigen::MatrixXd resample_polyline(const Eigen::MatrixXd& points, int count);

// Least-squares Bezier fit of data columns at the given parameters.
// clamp_ends pins p0 = first, p_last = last and duplicates both end control
// points so the curve leaves and arrives with zero velocity.
struct BezierFit {
    BezierCurve curve;
    bool rank_deficient = false;
};
BezierFit fit_bezier_lsq(const Eigen::MatrixXd& data, const std::vector<double>& params,
                         int n_ctrl, bool clamp_ends);

struct ReferenceFit {
    BezierCurve curve;
    bool degenerate_fallback = false;
    double rms_error = 0.0;
    std::vector<double> waypoint_params;  // arc-length fractions of the waypoints
};

// Smooth reference through ordered waypoints (columns), parameterized by
// arc-length fraction. Rank-deficient fits fall back to control points placed
// uniformly along the waypoint polyline and report it.
ReferenceFit fit_reference(const Eigen::MatrixXd& waypoints, int n_ctrl, bool clamp_ends);

}  // namespace otrp
