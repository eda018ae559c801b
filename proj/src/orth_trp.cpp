#include "otrp/orth_trp.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace otrp {

namespace {

constexpr double kExactBlockTol = 1e-12;
constexpr double kFixedNormSlack = 1e-12;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

OrthTrpProblem::OrthTrpProblem(int n_blocks, int block_dim, Eigen::MatrixXd Q, Eigen::VectorXd g,
                               std::map<int, Eigen::VectorXd> fixed_blocks)
    : n_blocks_(n_blocks),
      block_dim_(block_dim),
      Q_(std::move(Q)),
      g_(std::move(g)),
      fixed_(std::move(fixed_blocks)) {
    if (n_blocks_ < 1 || block_dim_ < 1)
        throw std::invalid_argument("OrthTrpProblem: block grid must be non-empty");
    const int d = dim();
    if (Q_.rows() != d || Q_.cols() != d || g_.size() != d)
        throw std::invalid_argument("OrthTrpProblem: Q/g dimensions do not match the block grid");
    const double scale = std::max(1.0, Q_.cwiseAbs().maxCoeff());
    if ((Q_ - Q_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("OrthTrpProblem: assembled Q not symmetric");
    for (int i = 0; i < n_blocks_; ++i) {
        const EigenFactorization f = eig_decompose(Q_block(i, i));
        if (!(f.min_eigenvalue() > 0.0))
            throw std::invalid_argument("OrthTrpProblem: diagonal block " + std::to_string(i) +
                                        " is not positive definite (min eigenvalue " +
                                        std::to_string(f.min_eigenvalue()) + ")");
    }
    for (const auto& [i, v] : fixed_) {
        if (i < 0 || i >= n_blocks_)
            throw std::invalid_argument("OrthTrpProblem: fixed block index out of range");
        if (v.size() != block_dim_)
            throw std::invalid_argument("OrthTrpProblem: fixed block value has wrong dimension");
        if (v.norm() > 1.0 + kFixedNormSlack)
            throw std::invalid_argument("OrthTrpProblem: fixed block " + std::to_string(i) +
                                        " violates the unit-ball constraint");
    }
}

OrthTrpProblem OrthTrpProblem::from_blocks(
    const std::vector<std::vector<Eigen::MatrixXd>>& Q_blocks,
    const std::vector<Eigen::VectorXd>& g_blocks, std::map<int, Eigen::VectorXd> fixed_blocks) {
    const int nb = int(Q_blocks.size());
    if (nb == 0 || int(g_blocks.size()) != nb)
        throw std::invalid_argument("OrthTrpProblem: block lists empty or inconsistent");
    const int bd = int(g_blocks[0].size());
    Eigen::MatrixXd Q(nb * bd, nb * bd);
    Eigen::VectorXd g(nb * bd);
    for (int i = 0; i < nb; ++i) {
        if (int(Q_blocks[i].size()) != nb)
            throw std::invalid_argument("OrthTrpProblem: block grid is not square");
        g.segment(i * bd, bd) = g_blocks[i];
        for (int j = 0; j < nb; ++j) Q.block(i * bd, j * bd, bd, bd) = Q_blocks[i][j];
    }
    return OrthTrpProblem(nb, bd, std::move(Q), std::move(g), std::move(fixed_blocks));
}

OrthTrpProblem OrthTrpProblem::with_fixed_blocks(
    std::map<int, Eigen::VectorXd> fixed_blocks) const {
    return OrthTrpProblem(n_blocks_, block_dim_, Q_, g_, std::move(fixed_blocks));
}

double OrthTrpProblem::objective(const Eigen::VectorXd& y) const {
    if (y.size() != dim()) throw std::invalid_argument("objective: dimension mismatch");
    return 0.5 * y.dot(Q_ * y) + g_.dot(y);
}

Eigen::VectorXd OrthTrpState::flatten() const {
    const int nb = int(y_blocks.size());
    const int bd = nb > 0 ? int(y_blocks[0].size()) : 0;
    Eigen::VectorXd y(nb * bd);
    for (int i = 0; i < nb; ++i) y.segment(i * bd, bd) = y_blocks[i];
    return y;
}

std::string to_string(BlockMode m) {
    return m == BlockMode::single_dual_step ? "single_dual_step" : "exact_block_solve";
}

BlockMode block_mode_from_string(const std::string& s) {
    if (s == "single_dual_step" || s == "single") return BlockMode::single_dual_step;
    if (s == "exact_block_solve" || s == "exact") return BlockMode::exact_block_solve;
    throw std::invalid_argument("unknown block mode: " + s);
}

void SolverConfig::validate() const {
    if (max_sweeps < 1) throw std::invalid_argument("SolverConfig: max_sweeps must be >= 1");
    if (!(kkt_tol > 0.0)) throw std::invalid_argument("SolverConfig: kkt_tol must be positive");
    if (!(objective_tol >= 0.0))
        throw std::invalid_argument("SolverConfig: objective_tol must be non-negative");
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::kkt_met: return "kkt_met";
        case SolveStatus::objective_stagnated: return "objective_stagnated";
        default: return "max_sweeps_reached";
    }
}

std::vector<std::optional<EigenFactorization>> precompute_factorizations(
    const OrthTrpProblem& p) {
    std::vector<std::optional<EigenFactorization>> out(p.block_count());
    for (int i = 0; i < p.block_count(); ++i) {
        if (p.is_fixed(i)) continue;
        EigenFactorization f = eig_decompose(p.Q_block(i, i));
        if (!(f.min_eigenvalue() > 0.0))
            throw std::runtime_error("precompute_factorizations: block " + std::to_string(i) +
                                     " is not positive definite");
        out[i] = std::move(f);
    }
    return out;
}

Eigen::VectorXd block_offset(const OrthTrpProblem& p, const std::vector<Eigen::VectorXd>& y_blocks,
                             int i) {
    if (i < 0 || i >= p.block_count())
        throw std::invalid_argument("block_offset: block index out of range");
    if (int(y_blocks.size()) != p.block_count())
        throw std::invalid_argument("block_offset: state size mismatch");
    Eigen::VectorXd c = p.g_block(i);
    for (int j = 0; j < p.block_count(); ++j) {
        if (j == i) continue;
        c.noalias() += p.Q_block(i, j) * y_blocks[j];
    }
    return c;
}

OrthTrpState initial_state(const OrthTrpProblem& p) {
    OrthTrpState s;
    s.y_blocks.assign(p.block_count(), Eigen::VectorXd::Zero(p.block_dim()));
    s.lambda_blocks.assign(p.block_count(), std::nullopt);
    for (const auto& [i, v] : p.fixed_blocks()) s.y_blocks[i] = v;
    s.sweep_count = 0;
    s.objective = p.objective(s.flatten());
    s.kkt_residual = kkt_residual(p, s.y_blocks, s.lambda_blocks);
    return s;
}

OrthTrpState sweep(const OrthTrpProblem& p, const OrthTrpState& s,
                   const std::vector<std::optional<EigenFactorization>>& factorizations,
                   const SolverConfig& config, std::vector<double>* objective_trace,
                   std::vector<double>* max_norm_trace) {
    if (int(factorizations.size()) != p.block_count())
        throw std::invalid_argument("sweep: factorization list size mismatch");
    OrthTrpState next = s;
    for (int i = 0; i < p.block_count(); ++i) {
        if (p.is_fixed(i)) continue;
        if (!factorizations[i])
            throw std::invalid_argument("sweep: missing factorization for free block " +
                                        std::to_string(i));
        const Eigen::VectorXd c = block_offset(p, next.y_blocks, i);
        if (config.block_mode == BlockMode::exact_block_solve) {
            const TrpSolution sol =
                trp_solve_factored(*factorizations[i], c, 1.0, kExactBlockTol);
            next.y_blocks[i] = sol.x;
            next.lambda_blocks[i] = sol.lambda;
        } else {
            const TrpStepResult r = trp_step(*factorizations[i], c, next.lambda_blocks[i]);
            next.y_blocks[i] = r.y;
            next.lambda_blocks[i] = r.lambda;
        }
        if (objective_trace) objective_trace->push_back(p.objective(next.flatten()));
        if (max_norm_trace) {
            double mx = 0.0;
            for (const auto& yb : next.y_blocks) mx = std::max(mx, yb.norm());
            max_norm_trace->push_back(mx);
        }
    }
    next.sweep_count = s.sweep_count + 1;
    next.objective = p.objective(next.flatten());
    next.kkt_residual = kkt_residual(p, next.y_blocks, next.lambda_blocks);
    return next;
}

double kkt_residual(const OrthTrpProblem& p, const std::vector<Eigen::VectorXd>& y_blocks,
                    const std::vector<std::optional<double>>& lambda_blocks) {
    if (int(y_blocks.size()) != p.block_count() ||
        int(lambda_blocks.size()) != p.block_count())
        throw std::invalid_argument("kkt_residual: state size mismatch");
    double worst = 0.0;
    for (int i = 0; i < p.block_count(); ++i) {
        if (p.is_fixed(i)) continue;
        const double lam = lambda_blocks[i].value_or(0.0);
        const Eigen::VectorXd c = block_offset(p, y_blocks, i);
        const Eigen::VectorXd stat =
            p.Q_block(i, i) * y_blocks[i] + lam * y_blocks[i] + c;
        const double nrm = y_blocks[i].norm();
        worst = std::max(worst, stat.norm());
        worst = std::max(worst, std::max(0.0, nrm - 1.0));
        worst = std::max(worst, std::abs(lam * (nrm - 1.0)));
    }
    return worst;
}

std::pair<OrthTrpState, ConvergenceReport> solve(const OrthTrpProblem& p,
                                                 const SolverConfig& config) {
    config.validate();
    ConvergenceReport rep;

    const auto t_fac = std::chrono::steady_clock::now();
    const auto factorizations = precompute_factorizations(p);
    rep.factorize_seconds = seconds_since(t_fac);

    OrthTrpState state = initial_state(p);

    std::vector<double>* obj_trace = config.record_trace ? &rep.block_objective_trace : nullptr;
    std::vector<double>* norm_trace = config.record_trace ? &rep.block_max_norm_trace : nullptr;

    int stagnant = 0;
    const auto t_sweep = std::chrono::steady_clock::now();
    rep.status = SolveStatus::max_sweeps_reached;
    for (int k = 0; k < config.max_sweeps; ++k) {
        const double prev_obj = state.objective;
        state = sweep(p, state, factorizations, config, obj_trace, norm_trace);
        if (state.kkt_residual <= config.kkt_tol) {
            rep.status = SolveStatus::kkt_met;
            break;
        }
        const double rel =
            std::abs(state.objective - prev_obj) / std::max(1.0, std::abs(state.objective));
        stagnant = rel < config.objective_tol ? stagnant + 1 : 0;
        if (stagnant >= 5) {
            rep.status = SolveStatus::objective_stagnated;
            break;
        }
    }
    rep.sweep_seconds = seconds_since(t_sweep);
    rep.sweeps = state.sweep_count;
    rep.kkt_residual = state.kkt_residual;
    rep.objective = state.objective;
    return {std::move(state), rep};
}

DenseForm assemble_dense(const OrthTrpProblem& p) {
    const int bd = p.block_dim();
    DenseForm out;
    for (int i = 0; i < p.block_count(); ++i)
        if (!p.is_fixed(i)) out.free_blocks.push_back(i);
    const int nf = int(out.free_blocks.size());

    Eigen::VectorXd v = Eigen::VectorXd::Zero(p.dim());
    for (const auto& [i, val] : p.fixed_blocks()) v.segment(i * bd, bd) = val;

    out.Q.resize(nf * bd, nf * bd);
    out.g.resize(nf * bd);
    for (int a = 0; a < nf; ++a) {
        const int i = out.free_blocks[a];
        Eigen::VectorXd gi = p.g_block(i);
        for (const auto& [j, val] : p.fixed_blocks()) gi.noalias() += p.Q_block(i, j) * val;
        out.g.segment(a * bd, bd) = gi;
        for (int b = 0; b < nf; ++b)
            out.Q.block(a * bd, b * bd, bd, bd) = p.Q_block(i, out.free_blocks[b]);
    }
    out.constant = 0.5 * v.dot(p.Q() * v) + p.g().dot(v);
    return out;
}

}  // namespace otrp
