#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "otrp/bezier.hpp"
#include "otrp/rng.hpp"

using namespace otrp;

TEST_CASE("basis functions are a nonnegative partition of unity") {
    otrp::Rng rng(41);
    for (int degree : {0, 1, 3, 7, 14}) {
        for (int rep = 0; rep < 10; ++rep) {
            const double eps = rng.uniform();
            const Eigen::VectorXd b = bernstein_basis(degree, eps);
            REQUIRE(b.size() == degree + 1);
            CHECK(b.minCoeff() >= 0.0);
            CHECK(b.sum() == doctest::Approx(1.0).epsilon(1e-13));
            CHECK((b - oracles::bernstein_direct(degree, eps)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("basis endpoints pick out the first and last function") {
    const Eigen::VectorXd b0 = bernstein_basis(4, 0.0);
    const Eigen::VectorXd b1 = bernstein_basis(4, 1.0);
    CHECK(b0(0) == 1.0);
    CHECK(b0.tail(4).cwiseAbs().maxCoeff() == 0.0);
    CHECK(b1(4) == 1.0);
    CHECK(b1.head(4).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("basis derivatives match central finite differences") {
    otrp::Rng rng(42);
    for (int degree : {2, 5, 9}) {
        for (int rep = 0; rep < 5; ++rep) {
            const double eps = rng.uniform(0.05, 0.95);
            for (int order : {1, 2}) {
                const Eigen::VectorXd d = bernstein_basis_derivative(degree, eps, order);
                const Eigen::VectorXd fd = oracles::central_diff_vec(
                    [&](double t) { return bernstein_basis_derivative(degree, t, order - 1); },
                    eps);
                const double scale = std::max(1.0, fd.cwiseAbs().maxCoeff());
                CHECK((d - fd).cwiseAbs().maxCoeff() / scale < 1e-6);
            }
        }
    }
}

TEST_CASE("derivative order beyond the degree vanishes") {
    const Eigen::VectorXd d = bernstein_basis_derivative(3, 0.37, 4);
    CHECK(d.cwiseAbs().maxCoeff() == 0.0);
    CHECK(bernstein_basis_derivative(0, 0.5, 1).cwiseAbs().maxCoeff() == 0.0);
    // order zero is the plain basis
    CHECK((bernstein_basis_derivative(3, 0.4, 0) - bernstein_basis(3, 0.4)).cwiseAbs().maxCoeff() ==
          0.0);
}

TEST_CASE("curve evaluation agrees with the basis expansion") {
    otrp::Rng rng(43);
    Eigen::MatrixXd ctrl(3, 6);
    for (int i = 0; i < ctrl.size(); ++i) ctrl(i / 6, i % 6) = rng.normal();
    const BezierCurve c(ctrl);
    CHECK(c.degree() == 5);
    CHECK(c.dim() == 3);
    for (int rep = 0; rep < 10; ++rep) {
        const double eps = rng.uniform();
        const Eigen::VectorXd direct = ctrl * bernstein_basis(5, eps);
        CHECK((c.eval(eps) - direct).cwiseAbs().maxCoeff() < 1e-13);
    }
    CHECK((c.eval(0.0) - ctrl.col(0)).norm() == 0.0);
    CHECK((c.eval(1.0) - ctrl.col(5)).norm() == 0.0);
    CHECK(c.eval(0.3, 6).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(c.eval(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(c.eval(1.1), std::invalid_argument);
    CHECK_THROWS_AS(BezierCurve(Eigen::MatrixXd::Zero(3, 1)), std::invalid_argument);
}

TEST_CASE("curve derivatives match central finite differences") {
    otrp::Rng rng(44);
    Eigen::MatrixXd ctrl(2, 8);
    for (int i = 0; i < ctrl.size(); ++i) ctrl(i / 8, i % 8) = rng.normal();
    const BezierCurve c(ctrl);
    for (int rep = 0; rep < 8; ++rep) {
        const double eps = rng.uniform(0.05, 0.95);
        for (int order : {1, 2}) {
            const Eigen::VectorXd fd = oracles::central_diff_vec(
                [&](double t) { return c.eval(t, order - 1); }, eps);
            const double scale = std::max(1.0, fd.cwiseAbs().maxCoeff());
            CHECK((c.eval(eps, order) - fd).cwiseAbs().maxCoeff() / scale < 1e-6);
        }
    }
}

TEST_CASE("arc fractions and length of simple polylines") {
    Eigen::MatrixXd pts(2, 3);
    pts << 0.0, 1.0, 1.0, 0.0, 0.0, 2.0;
    CHECK(polyline_length(pts) == doctest::Approx(3.0).epsilon(1e-14));
    const auto fr = polyline_arc_fractions(pts);
    REQUIRE(fr.size() == 3);
    CHECK(fr[0] == 0.0);
    CHECK(fr[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(fr[2] == 1.0);

    // zero-length polyline degrades to uniform fractions
    Eigen::MatrixXd same = Eigen::MatrixXd::Zero(2, 4);
    const auto fu = polyline_arc_fractions(same);
    CHECK(fu[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(fu[3] == 1.0);
}

TEST_CASE("resampling spaces points uniformly in arc length") {
    Eigen::MatrixXd pts(2, 4);
    pts << 0.0, 2.0, 2.0, 5.0, 0.0, 0.0, 1.0, 1.0;
    const int count = 13;
    const Eigen::MatrixXd rs = resample_polyline(pts, count);
    REQUIRE(rs.cols() == count);
    CHECK((rs.col(0) - pts.col(0)).norm() < 1e-12);
    CHECK((rs.col(count - 1) - pts.col(3)).norm() < 1e-12);
    const double total = polyline_length(pts);
    const double step = total / double(count - 1);
    for (int i = 1; i < count; ++i) {
        const double d = (rs.col(i) - rs.col(i - 1)).norm();
        CHECK(std::abs(d - step) <= 0.01 * step);
    }
}

TEST_CASE("collinear input stays on its line through resampling and fitting") {
    Eigen::Vector2d a(1.0, -2.0), dir(0.6, 0.8);
    Eigen::MatrixXd pts(2, 6);
    for (int i = 0; i < 6; ++i) pts.col(i) = a + double(i * i) * 0.1 * dir;

    const Eigen::MatrixXd rs = resample_polyline(pts, 9);
    for (int i = 0; i < 9; ++i) {
        const Eigen::Vector2d d = rs.col(i) - a;
        CHECK(std::abs(d(0) * dir(1) - d(1) * dir(0)) < 1e-10);
    }

    const auto fit = fit_bezier_lsq(pts, polyline_arc_fractions(pts), 4, false);
    REQUIRE_FALSE(fit.rank_deficient);
    for (double eps : {0.0, 0.2, 0.5, 0.8, 1.0}) {
        const Eigen::Vector2d d = fit.curve.eval(eps) - a;
        CHECK(std::abs(d(0) * dir(1) - d(1) * dir(0)) < 1e-9);
    }
}

TEST_CASE("square fits interpolate their data") {
    otrp::Rng rng(45);
    const int n = 6;
    Eigen::MatrixXd data(3, n);
    for (int i = 0; i < data.size(); ++i) data(i / n, i % n) = rng.normal();
    std::vector<double> params(n);
    for (int i = 0; i < n; ++i) params[i] = double(i) / double(n - 1);
    const auto fit = fit_bezier_lsq(data, params, n, false);
    REQUIRE_FALSE(fit.rank_deficient);
    for (int i = 0; i < n; ++i)
        CHECK((fit.curve.eval(params[i]) - data.col(i)).norm() < 1e-8);
}

TEST_CASE("clamped fits rest at both ends") {
    otrp::Rng rng(46);
    const int n = 12;
    Eigen::MatrixXd data(3, n);
    Eigen::Vector3d prev = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i) {
        prev += Eigen::Vector3d(0.5, rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2));
        data.col(i) = prev;
    }
    std::vector<double> params = polyline_arc_fractions(data);
    const auto fit = fit_bezier_lsq(data, params, 8, true);
    REQUIRE_FALSE(fit.rank_deficient);
    CHECK((fit.curve.eval(0.0) - data.col(0)).norm() < 1e-12);
    CHECK((fit.curve.eval(1.0) - data.col(n - 1)).norm() < 1e-12);
    CHECK(fit.curve.eval(0.0, 1).norm() < 1e-10);
    CHECK(fit.curve.eval(1.0, 1).norm() < 1e-10);
}

TEST_CASE("fit parameter validation") {
    Eigen::MatrixXd data = Eigen::MatrixXd::Zero(2, 4);
    std::vector<double> params{0.0, 0.3, 0.7, 1.0};
    CHECK_THROWS_AS(fit_bezier_lsq(data, {0.0, 1.0}, 3, false), std::invalid_argument);
    CHECK_THROWS_AS(fit_bezier_lsq(data, params, 1, false), std::invalid_argument);
    CHECK_THROWS_AS(fit_bezier_lsq(data, params, 3, true), std::invalid_argument);
    CHECK_THROWS_AS(fit_bezier_lsq(Eigen::MatrixXd::Zero(2, 1), {0.5}, 2, false),
                    std::invalid_argument);
}

TEST_CASE("underdetermined fits report the polyline fallback") {
    Eigen::MatrixXd data(3, 3);
    data << 0.0, 1.0, 2.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0;
    const auto fit = fit_bezier_lsq(data, {0.0, 0.5, 1.0}, 15, false);
    CHECK(fit.rank_deficient);
    CHECK(fit.curve.count() == 15);
    // fallback control points trace the input polyline
    CHECK((fit.curve.control_points().col(0) - data.col(0)).norm() < 1e-12);
    CHECK((fit.curve.control_points().col(14) - data.col(2)).norm() < 1e-12);

    const auto ref = fit_reference(data, 15, false);
    CHECK(ref.degenerate_fallback);
}

TEST_CASE("reference fit parameterizes waypoints by arc fraction") {
    otrp::Rng rng(47);
    const int n = 20;
    Eigen::MatrixXd wp(3, n);
    Eigen::Vector3d pos = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i) {
        pos += Eigen::Vector3d(0.8, rng.uniform(-0.4, 0.4), rng.uniform(-0.3, 0.3));
        wp.col(i) = pos;
    }
    const auto ref = fit_reference(wp, 15, true);
    REQUIRE_FALSE(ref.degenerate_fallback);
    REQUIRE(int(ref.waypoint_params.size()) == n);
    const auto fr = polyline_arc_fractions(wp);
    for (int i = 0; i < n; ++i) CHECK(ref.waypoint_params[i] == doctest::Approx(fr[i]));
    CHECK(ref.rms_error >= 0.0);
    CHECK((ref.curve.eval(0.0) - wp.col(0)).norm() < 1e-12);
    CHECK((ref.curve.eval(1.0) - wp.col(n - 1)).norm() < 1e-12);
}

TEST_CASE("least squares fit is at least as tight as coordinate descent") {
    otrp::Rng rng(48);
    for (int rep = 0; rep < 3; ++rep) {
        const int n = 20;
        Eigen::MatrixXd wp(3, n);
        Eigen::Vector3d pos(0.0, 0.0, 0.0);
        for (int i = 0; i < n; ++i) {
            pos += Eigen::Vector3d(1.0, rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
            wp.col(i) = pos;
        }
        const auto ref = fit_reference(wp, 15, true);
        REQUIRE_FALSE(ref.degenerate_fallback);
        const double oracle_rms =
            oracles::cd_bezier_rms(wp, ref.waypoint_params, 15, true, 4000);
        CHECK(ref.rms_error <= oracle_rms + 1e-6);
    }
}
