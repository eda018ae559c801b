#include "otrp/lifting.hpp"

#include <Eigen/QR>
#include <cmath>
#include <stdexcept>
#include <string>

namespace otrp {

void LiftConfig::validate() const {
    if (N_q < 1 || N_y < 1 || N_J < 1)
        throw std::invalid_argument("LiftConfig: dimensions must be positive");
    if (N_y % N_q != 0)
        throw std::invalid_argument("LiftConfig: N_y must be a multiple of N_q");
    if (N_y < N_q) throw std::invalid_argument("LiftConfig: N_y must be at least N_q");
}

ParamPoint ParamPoint::zero(const LiftConfig& cfg) {
    cfg.validate();
    ParamPoint p;
    p.blocks.assign(cfg.N_J, Eigen::VectorXd::Zero(cfg.N_y));
    return p;
}

ParamPoint ParamPoint::from_flat(const LiftConfig& cfg, const Eigen::VectorXd& y) {
    cfg.validate();
    if (y.size() != cfg.N_J * cfg.N_y)
        throw std::invalid_argument("ParamPoint: flat vector has wrong dimension");
    ParamPoint p;
    p.blocks.reserve(cfg.N_J);
    for (int j = 0; j < cfg.N_J; ++j) p.blocks.push_back(y.segment(j * cfg.N_y, cfg.N_y));
    p.validate();
    return p;
}

Eigen::VectorXd ParamPoint::flatten() const {
    const int nb = int(blocks.size());
    const int bd = nb > 0 ? int(blocks[0].size()) : 0;
    Eigen::VectorXd y(nb * bd);
    for (int j = 0; j < nb; ++j) y.segment(j * bd, bd) = blocks[j];
    return y;
}

void ParamPoint::validate() const {
    for (size_t j = 0; j < blocks.size(); ++j)
        if (blocks[j].norm() > 1.0 + 1e-9)
            throw std::invalid_argument("ParamPoint: block " + std::to_string(j) +
                                        " leaves the unit ball (norm " +
                                        std::to_string(blocks[j].norm()) + ")");
}

Eigen::VectorXd proj_basis(const LiftConfig& cfg, double eps, int order) {
    cfg.validate();
    if (order < 0 || order > 2)
        throw std::invalid_argument("proj_basis: order must be 0, 1 or 2");
    const int deg = cfg.proj_curve_degree();
    const Eigen::VectorXd b = bernstein_basis(deg, eps);
    const double r = b.norm();
    const Eigen::VectorXd bbar = b / r;
    if (order == 0) return bbar;

    const Eigen::VectorXd b1 = bernstein_basis_derivative(deg, eps, 1);
    const double rp = b.dot(b1) / r;
    const Eigen::VectorXd bbar1 = (b1 - bbar * rp) / r;
    if (order == 1) return bbar1;

    const Eigen::VectorXd b2 = bernstein_basis_derivative(deg, eps, 2);
    const double rpp = (b1.squaredNorm() + b.dot(b2) - rp * rp) / r;
    return (b2 - 2.0 * bbar1 * rp - bbar * rpp) / r;
}

Eigen::MatrixXd proj_matrix(const LiftConfig& cfg, double eps, int order) {
    const Eigen::VectorXd bbar = proj_basis(cfg, eps, order);
    const int per = cfg.per_axis();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(cfg.N_q, cfg.N_y);
    for (int d = 0; d < cfg.N_q; ++d) L.block(d, d * per, 1, per) = bbar.transpose();
    return L;
}

Eigen::VectorXd block_basis(const LiftConfig& cfg, double eps, int order) {
    cfg.validate();
    return bernstein_basis_derivative(cfg.block_curve_degree(), eps, order);
}

LiftedMap::LiftedMap(LiftConfig cfg, CorridorSpec corridor)
    : cfg_(cfg), corridor_(std::move(corridor)) {
    cfg_.validate();
    if (corridor_.config_dim() != cfg_.N_q)
        throw std::invalid_argument("LiftedMap: corridor dimension does not match N_q");
}

Eigen::MatrixXd LiftedMap::map_matrix(double eps, int order) const {
    if (order < 0 || order > 2)
        throw std::invalid_argument("LiftedMap::map_matrix: order must be 0, 1 or 2");

    const int per = cfg_.per_axis();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(cfg_.N_q, cfg_.N_J * cfg_.N_y);

    Eigen::VectorXd s[3], bbar[3], bb[3];
    for (int k = 0; k <= order; ++k) {
        s[k] = corridor_.interpolate(eps, k).inv_axes;
        bbar[k] = proj_basis(cfg_, eps, k);
        bb[k] = block_basis(cfg_, eps, k);
    }

    static const int kTerms[3][6][4] = {
        {{0, 0, 0, 1}},
        {{1, 0, 0, 1}, {0, 1, 0, 1}, {0, 0, 1, 1}},
        {{2, 0, 0, 1}, {0, 2, 0, 1}, {0, 0, 2, 1}, {1, 1, 0, 2}, {1, 0, 1, 2}, {0, 1, 1, 2}},
    };
    static const int kTermCount[3] = {1, 3, 6};

    for (int t = 0; t < kTermCount[order]; ++t) {
        const int a = kTerms[order][t][0];
        const int b = kTerms[order][t][1];
        const int c = kTerms[order][t][2];
        const double coef = double(kTerms[order][t][3]);
        for (int j = 0; j < cfg_.N_J; ++j) {
            const double w = coef * bb[c](j);
            if (w == 0.0) continue;
            for (int d = 0; d < cfg_.N_q; ++d) {
                const double f = w * s[a](d);
                if (f == 0.0) continue;
                L.block(d, j * cfg_.N_y + d * per, 1, per) += f * bbar[b].transpose();
            }
        }
    }
    return L;
}

Eigen::VectorXd LiftedMap::traj_eval(const ParamPoint& y, double eps, int order) const {
    if (int(y.blocks.size()) != cfg_.N_J)
        throw std::invalid_argument("traj_eval: block count mismatch");
    const Eigen::MatrixXd L = map_matrix(eps, order);
    return L * y.flatten() + corridor_.interpolate(eps, order).center;
}

double LiftedMap::feasible_radius(double eps, const Eigen::VectorXd& q) const {
    if (cfg_.N_J != 1)
        throw std::invalid_argument("feasible_radius: defined for single-block maps only");
    if (q.size() != cfg_.N_q)
        throw std::invalid_argument("feasible_radius: configuration dimension mismatch");

    const Eigen::MatrixXd L = map_matrix(eps, 0);
    const Eigen::VectorXd rhs = q - corridor_.interpolate(eps, 0).center;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(L);
    const Eigen::VectorXd y_star = cod.solve(rhs);

    const double nsq = y_star.squaredNorm();
    if (std::sqrt(nsq) > 1.0 + 1e-9)
        throw std::invalid_argument("feasible_radius: configuration is outside the corridor (||y*|| " +
                                    std::to_string(std::sqrt(nsq)) + ")");
    return std::sqrt(std::max(0.0, 1.0 - nsq));
}

}  // namespace otrp
