#include "otrp/objective.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace otrp {

CostSpec CostSpec::uniform(int order, int n_samples, double horizon, double rho) {
    if (n_samples < 1) throw std::invalid_argument("CostSpec: need at least one sample");
    CostSpec spec;
    spec.derivative_order = order;
    // Midpoint grid: a plain sample mean is then midpoint quadrature, free of
    // the endpoint bias that clamped references concentrate at eps 0 and 1.
    spec.samples.resize(n_samples);
    for (int i = 0; i < n_samples; ++i)
        spec.samples[i] = (double(i) + 0.5) / double(n_samples);
    spec.horizon = horizon;
    spec.rho = rho;
    return spec;
}

void CostSpec::validate() const {
    if (derivative_order < 0 || derivative_order > 2)
        throw std::invalid_argument("CostSpec: derivative order must be 0, 1 or 2");
    if (samples.empty()) throw std::invalid_argument("CostSpec: sample list is empty");
    for (double e : samples)
        if (!(e >= 0.0 && e <= 1.0))
            throw std::invalid_argument("CostSpec: samples must lie in [0, 1]");
    if (!weights.empty()) {
        if (weights.size() != samples.size())
            throw std::invalid_argument("CostSpec: weight count must match sample count");
        for (double w : weights)
            if (!(w > 0.0)) throw std::invalid_argument("CostSpec: weights must be positive");
    }
    if (!(horizon > 0.0)) throw std::invalid_argument("CostSpec: horizon must be positive");
}

std::vector<double> CostSpec::effective_weights() const {
    if (!weights.empty()) return weights;
    return std::vector<double>(samples.size(), 1.0 / double(samples.size()));
}

QuadraticObjective build_quadratic(const LiftedMap& map, const CostSpec& spec) {
    spec.validate();
    const LiftConfig& cfg = map.config();
    const int D = cfg.N_J * cfg.N_y;
    const int n = spec.derivative_order;
    const double scale = std::pow(spec.horizon, -double(n));
    const std::vector<double> w = spec.effective_weights();

    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(D, D);
    Eigen::VectorXd glin = Eigen::VectorXd::Zero(D);
    double constant = 0.0;
    for (size_t i = 0; i < spec.samples.size(); ++i) {
        const Eigen::MatrixXd A = scale * map.map_matrix(spec.samples[i], n);
        const Eigen::VectorXd b = scale * map.corridor().interpolate(spec.samples[i], n).center;
        gram.noalias() += (2.0 * w[i]) * (A.transpose() * A);
        glin.noalias() += (2.0 * w[i]) * (A.transpose() * b);
        constant += w[i] * b.squaredNorm();
    }
    gram = 0.5 * (gram + gram.transpose().eval());

    const double rho_eff =
        spec.rho >= 0.0 ? spec.rho : 1e-8 * std::max(gram.diagonal().maxCoeff(), 0.0);
    Eigen::MatrixXd Q = gram;
    Q.diagonal().array() += 2.0 * rho_eff;

    for (int j = 0; j < cfg.N_J; ++j) {
        const EigenFactorization f =
            eig_decompose(Q.block(j * cfg.N_y, j * cfg.N_y, cfg.N_y, cfg.N_y));
        if (f.min_eigenvalue() < 1e-10)
            throw std::runtime_error(
                "build_quadratic: diagonal block " + std::to_string(j) +
                " has minimum eigenvalue " + std::to_string(f.min_eigenvalue()) +
                " after regularization; increase rho or add samples");
    }

    return {OrthTrpProblem(cfg.N_J, cfg.N_y, std::move(Q), std::move(glin)), constant, rho_eff};
}

double objective_value(const LiftedMap& map, const CostSpec& spec, const ParamPoint& y,
                       std::optional<double> rho_override) {
    spec.validate();
    const int n = spec.derivative_order;
    const double scale = std::pow(spec.horizon, -double(n));
    const std::vector<double> w = spec.effective_weights();
    const double rho = rho_override ? *rho_override : std::max(spec.rho, 0.0);

    const Eigen::VectorXd yf = y.flatten();
    double acc = 0.0;
    for (size_t i = 0; i < spec.samples.size(); ++i)
        acc += w[i] * (scale * map.traj_eval(y, spec.samples[i], n)).squaredNorm();
    return acc + rho * yf.squaredNorm();
}

double average_acceleration(const LiftedMap& map, const CostSpec& spec, const ParamPoint& y) {
    spec.validate();
    const double inv_T2 = 1.0 / (spec.horizon * spec.horizon);
    double acc = 0.0;
    for (double e : spec.samples) acc += (inv_T2 * map.traj_eval(y, e, 2)).norm();
    return acc / double(spec.samples.size());
}

}  // namespace otrp
