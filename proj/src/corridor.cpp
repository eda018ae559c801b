#include "otrp/corridor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "otrp/simplex.hpp"

namespace otrp {

namespace {

constexpr int kValidationGrid = 1000;
constexpr double kExclusionSlack = 1e-9;

}  // namespace

double Ellipsoid::membership(const Eigen::VectorXd& q) const {
    if (q.size() != center.size())
        throw std::invalid_argument("Ellipsoid::membership: dimension mismatch");
    return (inv_radii_sq.array() * (q - center).array().square()).sum();
}

Eigen::VectorXd Ellipsoid::radii() const {
    return inv_radii_sq.array().rsqrt();
}

void Ellipsoid::validate() const {
    if (center.size() == 0 || center.size() != inv_radii_sq.size())
        throw std::invalid_argument("Ellipsoid: center/axes dimension mismatch");
    if (!(inv_radii_sq.minCoeff() > 0.0))
        throw std::invalid_argument("Ellipsoid: all inverse squared radii must be positive");
}

Ellipsoid fit_ellipsoid(const Eigen::VectorXd& center, const Eigen::MatrixXd& collision_points,
                        double u_min) {
    const int d = int(center.size());
    if (d == 0) throw std::invalid_argument("fit_ellipsoid: empty center");
    if (!(u_min > 0.0)) throw std::invalid_argument("fit_ellipsoid: u_min must be positive");
    if (collision_points.cols() > 0 && collision_points.rows() != d)
        throw std::invalid_argument("fit_ellipsoid: point dimension mismatch");

    const int m = int(collision_points.cols());
    Eigen::MatrixXd sq(m, d);
    for (int p = 0; p < m; ++p) {
        const Eigen::VectorXd delta = collision_points.col(p) - center;
        if (delta.norm() <= 1e-12)
            throw std::invalid_argument(
                "fit_ellipsoid: collision point coincides with the center");
        sq.row(p) = delta.array().square().transpose();
    }

    // A constraint row is redundant when another row is componentwise <= it,
    // so only Pareto-minimal rows reach the LP. Sorting by row sum first makes
    // every potential dominator appear before its victims.
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return sq.row(a).sum() < sq.row(b).sum(); });
    std::vector<int> keep;
    for (int idx : order) {
        bool dominated = false;
        for (int k : keep) {
            if ((sq.row(k).array() <= sq.row(idx).array()).all()) {
                dominated = true;
                break;
            }
        }
        if (!dominated) keep.push_back(idx);
    }

    Ellipsoid e;
    e.center = center;
    e.inv_radii_sq = Eigen::VectorXd::Constant(d, u_min);

    std::vector<int> active;
    for (int k : keep)
        if (1.0 - u_min * sq.row(k).sum() > 0.0) active.push_back(k);

    if (!active.empty()) {
        Eigen::MatrixXd A(int(active.size()), d);
        Eigen::VectorXd b(int(active.size()));
        for (int r = 0; r < int(active.size()); ++r) {
            A.row(r) = sq.row(active[r]);
            b(r) = 1.0 - u_min * sq.row(active[r]).sum();
        }
        const LpResult lp = simplex_min(A, b, Eigen::VectorXd::Ones(d));
        if (lp.status != LpStatus::optimal)
            throw std::runtime_error("fit_ellipsoid: interior LP failed unexpectedly");
        e.inv_radii_sq += lp.x;
    }

    for (int p = 0; p < m; ++p) {
        const double msh = e.membership(collision_points.col(p));
        if (msh < 1.0 - kExclusionSlack)
            throw std::runtime_error("fit_ellipsoid: exclusion violated after solve (membership " +
                                     std::to_string(msh) + ")");
    }
    return e;
}

CorridorSpec CorridorSpec::build(std::vector<CorridorKnot> knots, BezierCurve center_curve,
                                 const std::vector<Eigen::MatrixXd>* knot_collision_points,
                                 int axes_ctrl_count) {
    if (knots.size() < 2) throw std::invalid_argument("CorridorSpec: need at least two knots");
    const int d = int(knots.front().ellipsoid.center.size());
    if (center_curve.dim() != d)
        throw std::invalid_argument("CorridorSpec: center curve dimension mismatch");
    for (size_t k = 0; k < knots.size(); ++k) {
        knots[k].ellipsoid.validate();
        if (int(knots[k].ellipsoid.center.size()) != d)
            throw std::invalid_argument("CorridorSpec: knot dimension mismatch");
        if (k > 0 && !(knots[k].eps > knots[k - 1].eps))
            throw std::invalid_argument("CorridorSpec: knot parameters must strictly increase");
    }
    if (std::abs(knots.front().eps) > 1e-12 || std::abs(knots.back().eps - 1.0) > 1e-12)
        throw std::invalid_argument("CorridorSpec: knots must cover [0, 1]");
    if (knot_collision_points && knot_collision_points->size() != knots.size())
        throw std::invalid_argument("CorridorSpec: one collision set per knot expected");

    const int K = int(knots.size());
    Eigen::MatrixXd sdata(d, K);
    std::vector<double> params(K);
    for (int k = 0; k < K; ++k) {
        sdata.col(k) = knots[k].ellipsoid.inv_radii_sq.array().rsqrt().matrix();
        params[k] = knots[k].eps;
    }

    int n_ctrl = axes_ctrl_count > 0 ? axes_ctrl_count : 15;
    n_ctrl = std::min(n_ctrl, K);
    n_ctrl = std::max(n_ctrl, 2);

    const BezierFit fit = fit_bezier_lsq(sdata, params, n_ctrl, false);
    if (fit.rank_deficient)
        throw std::runtime_error("CorridorSpec: axes interpolation is rank deficient");

    CorridorSpec spec;
    spec.knots_ = std::move(knots);
    spec.center_curve_ = std::move(center_curve);
    spec.axes_curve_ = fit.curve;
    spec.validate_positivity();

    if (knot_collision_points) {
        // exclusion audit on a dense grid against the bracketing knots' points
        double min_membership = std::numeric_limits<double>::infinity();
        for (int gi = 0; gi < kValidationGrid; ++gi) {
            const double eps = double(gi) / double(kValidationGrid - 1);
            size_t hi = 0;
            while (hi + 1 < spec.knots_.size() && spec.knots_[hi].eps < eps) ++hi;
            const size_t lo = hi > 0 ? hi - 1 : 0;
            const Eigen::VectorXd s = spec.axes_curve_.eval(eps, 0);
            const Eigen::VectorXd u = s.array().square().inverse().matrix();
            const Eigen::VectorXd ctr = spec.center_curve_.eval(eps, 0);
            for (size_t ki : {lo, hi}) {
                const Eigen::MatrixXd& pts = (*knot_collision_points)[ki];
                for (int p = 0; p < pts.cols(); ++p) {
                    const double msh =
                        (u.array() * (pts.col(p) - ctr).array().square()).sum();
                    min_membership = std::min(min_membership, msh);
                }
                if (lo == hi) break;
            }
        }
        if (min_membership < 1.0) {
            if (!(min_membership > 0.0))
                throw std::runtime_error(
                    "CorridorSpec: a collision point crosses the corridor centerline");
            const double beta = std::sqrt(min_membership);
            Eigen::MatrixXd ctrl = spec.axes_curve_.control_points();
            spec.axes_curve_ = BezierCurve(beta * ctrl);
            for (auto& kn : spec.knots_) kn.ellipsoid.inv_radii_sq /= beta * beta;
            spec.shrink_ = beta;
        }
    }
    return spec;
}

void CorridorSpec::validate_positivity() const {
    for (int gi = 0; gi < kValidationGrid; ++gi) {
        const double eps = double(gi) / double(kValidationGrid - 1);
        const Eigen::VectorXd s = axes_curve_.eval(eps, 0);
        if (!(s.minCoeff() > 0.0))
            throw std::runtime_error(
                "CorridorSpec: interpolated radii lose positivity at eps = " +
                std::to_string(eps));
    }
}

CorridorSample CorridorSpec::interpolate(double eps, int order) const {
    if (order < 0 || order > 2)
        throw std::invalid_argument("CorridorSpec::interpolate: order must be 0, 1 or 2");
    CorridorSample out;
    out.center = center_curve_.eval(eps, order);
    const Eigen::VectorXd s = axes_curve_.eval(eps, 0);
    if (order == 0) {
        out.inv_axes = s;
        out.axes = s.array().inverse().matrix();
        return out;
    }
    const Eigen::VectorXd s1 = axes_curve_.eval(eps, 1);
    if (order == 1) {
        out.inv_axes = s1;
        out.axes = (-s1.array() / s.array().square()).matrix();
        return out;
    }
    const Eigen::VectorXd s2 = axes_curve_.eval(eps, 2);
    out.inv_axes = s2;
    out.axes = ((2.0 * s1.array().square() - s.array() * s2.array()) / s.array().cube()).matrix();
    return out;
}

CorridorSpec::Containment CorridorSpec::contains(double eps, const Eigen::VectorXd& q) const {
    const Eigen::VectorXd s = axes_curve_.eval(eps, 0);
    const Eigen::VectorXd ctr = center_curve_.eval(eps, 0);
    if (q.size() != ctr.size())
        throw std::invalid_argument("CorridorSpec::contains: dimension mismatch");
    const double msh = ((q - ctr).array() / s.array()).square().sum();
    Containment c;
    c.margin = 1.0 - msh;
    c.inside = c.margin >= -1e-9;
    return c;
}

nlohmann::json CorridorSpec::to_json() const {
    nlohmann::json j;
    j["knots"] = nlohmann::json::array();
    for (const auto& k : knots_) {
        nlohmann::json kj;
        kj["eps"] = k.eps;
        kj["center"] = std::vector<double>(k.ellipsoid.center.data(),
                                           k.ellipsoid.center.data() + k.ellipsoid.center.size());
        kj["u"] = std::vector<double>(
            k.ellipsoid.inv_radii_sq.data(),
            k.ellipsoid.inv_radii_sq.data() + k.ellipsoid.inv_radii_sq.size());
        j["knots"].push_back(kj);
    }
    auto ctrl_to_json = [](const BezierCurve& c) {
        nlohmann::json arr = nlohmann::json::array();
        for (int i = 0; i < c.count(); ++i) {
            const Eigen::VectorXd col = c.control_points().col(i);
            arr.push_back(std::vector<double>(col.data(), col.data() + col.size()));
        }
        return arr;
    };
    j["center_ctrl"] = ctrl_to_json(center_curve_);
    j["axes_ctrl"] = ctrl_to_json(axes_curve_);
    return j;
}

CorridorSpec CorridorSpec::from_json(const nlohmann::json& j) {
    CorridorSpec spec;
    for (const auto& kj : j.at("knots")) {
        CorridorKnot k;
        k.eps = kj.at("eps").get<double>();
        const auto c = kj.at("center").get<std::vector<double>>();
        const auto u = kj.at("u").get<std::vector<double>>();
        k.ellipsoid.center = Eigen::Map<const Eigen::VectorXd>(c.data(), long(c.size()));
        k.ellipsoid.inv_radii_sq = Eigen::Map<const Eigen::VectorXd>(u.data(), long(u.size()));
        k.ellipsoid.validate();
        spec.knots_.push_back(std::move(k));
    }
    if (spec.knots_.size() < 2)
        throw std::invalid_argument("CorridorSpec::from_json: need at least two knots");
    auto curve_from_json = [](const nlohmann::json& arr) {
        if (!arr.is_array() || arr.size() < 2)
            throw std::invalid_argument("CorridorSpec::from_json: malformed control points");
        const auto first = arr[0].get<std::vector<double>>();
        Eigen::MatrixXd ctrl(first.size(), arr.size());
        for (size_t i = 0; i < arr.size(); ++i) {
            const auto col = arr[i].get<std::vector<double>>();
            if (col.size() != first.size())
                throw std::invalid_argument(
                    "CorridorSpec::from_json: inconsistent control point dimension");
            ctrl.col(long(i)) = Eigen::Map<const Eigen::VectorXd>(col.data(), long(col.size()));
        }
        return BezierCurve(std::move(ctrl));
    };
    spec.center_curve_ = curve_from_json(j.at("center_ctrl"));
    spec.axes_curve_ = curve_from_json(j.at("axes_ctrl"));
    for (size_t k = 1; k < spec.knots_.size(); ++k)
        if (!(spec.knots_[k].eps > spec.knots_[k - 1].eps))
            throw std::invalid_argument("CorridorSpec::from_json: knots must strictly increase");
    spec.validate_positivity();
    return spec;
}

}  // namespace otrp
