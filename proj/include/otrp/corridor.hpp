#pragma once

#include <json.hpp>
#include <vector>

#include "otrp/bezier.hpp"

namespace otrp {

// Axis-aligned ellipsoid { q : sum_d u_d (q - center)_d^2 <= 1 }.
struct Ellipsoid {
    Eigen::VectorXd center;
    Eigen::VectorXd inv_radii_sq;  // u_d = 1 / r_d^2

    double membership(const Eigen::VectorXd& q) const;
    Eigen::VectorXd radii() const;
    void validate() const;
};

// Largest axis-aligned ellipsoid around center that keeps every collision
// point (columns) outside: LP over u with per-axis floor u_min.
Ellipsoid fit_ellipsoid(const Eigen::VectorXd& center, const Eigen::MatrixXd& collision_points,
                        double u_min = 1e-6);

struct CorridorKnot {
    double eps = 0.0;
    Ellipsoid ellipsoid;
};

// n-th derivatives of the corridor frame at one parameter value.
struct CorridorSample {
    Eigen::VectorXd center;    // center^{(n)}
    Eigen::VectorXd axes;      // diagonal of C^{(n)}, C = diag(1/s_d)
    Eigen::VectorXd inv_axes;  // diagonal of (C^{-1})^{(n)}, i.e. s^{(n)}
};

// Smoothly interpolated tube of axis-aligned ellipsoids along a center curve.
// Radii are interpolated as s_d(eps) = u_d^{-1/2} with a least-squares Bezier
// through the knot values; a uniform shrink restores collision exclusion when
// the interpolation swallows a point between knots.
class CorridorSpec {
public:
    CorridorSpec() = default;

    static CorridorSpec build(std::vector<CorridorKnot> knots, BezierCurve center_curve,
                              const std::vector<Eigen::MatrixXd>* knot_collision_points = nullptr,
                              int axes_ctrl_count = 0);

    CorridorSample interpolate(double eps, int order) const;

    struct Containment {
        bool inside = false;
        double margin = 0.0;  // 1 - sum u_d (q - center)_d^2
    };
    Containment contains(double eps, const Eigen::VectorXd& q) const;

    const std::vector<CorridorKnot>& knots() const { return knots_; }
    const BezierCurve& center_curve() const { return center_curve_; }
    const BezierCurve& axes_curve() const { return axes_curve_; }
    double shrink_factor() const { return shrink_; }
    int config_dim() const { return center_curve_.dim(); }

    nlohmann::json to_json() const;
    static CorridorSpec from_json(const nlohmann::json& j);

private:
    std::vector<CorridorKnot> knots_;
    BezierCurve center_curve_;
    BezierCurve axes_curve_;  // s-space: one row per axis
    double shrink_ = 1.0;

    void validate_positivity() const;
};

}  // namespace otrp
