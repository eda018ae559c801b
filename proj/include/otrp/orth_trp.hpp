#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "otrp/trp.hpp"

namespace otrp {

// Block-partitioned quadratic with one unit-ball constraint per block:
//   min 1/2 y'Qy + g'y   subject to  ||y_j|| <= 1 for every block j.
// Fixed blocks hold a prescribed value and are never updated.
class OrthTrpProblem {
public:
    OrthTrpProblem(int n_blocks, int block_dim, Eigen::MatrixXd Q, Eigen::VectorXd g,
                   std::map<int, Eigen::VectorXd> fixed_blocks = {});

    static OrthTrpProblem from_blocks(const std::vector<std::vector<Eigen::MatrixXd>>& Q_blocks,
                                      const std::vector<Eigen::VectorXd>& g_blocks,
                                      std::map<int, Eigen::VectorXd> fixed_blocks = {});

    int block_count() const { return n_blocks_; }
    int block_dim() const { return block_dim_; }
    int dim() const { return n_blocks_ * block_dim_; }

    const Eigen::MatrixXd& Q() const { return Q_; }
    const Eigen::VectorXd& g() const { return g_; }

    Eigen::MatrixXd Q_block(int i, int j) const {
        return Q_.block(i * block_dim_, j * block_dim_, block_dim_, block_dim_);
    }
    Eigen::VectorXd g_block(int i) const { return g_.segment(i * block_dim_, block_dim_); }

    const std::map<int, Eigen::VectorXd>& fixed_blocks() const { return fixed_; }
    bool is_fixed(int i) const { return fixed_.count(i) > 0; }

    OrthTrpProblem with_fixed_blocks(std::map<int, Eigen::VectorXd> fixed_blocks) const;

    double objective(const Eigen::VectorXd& y) const;

private:
    int n_blocks_ = 0;
    int block_dim_ = 0;
    Eigen::MatrixXd Q_;
    Eigen::VectorXd g_;
    std::map<int, Eigen::VectorXd> fixed_;
};

struct OrthTrpState {
    std::vector<Eigen::VectorXd> y_blocks;
    std::vector<std::optional<double>> lambda_blocks;
    int sweep_count = 0;
    double objective = 0.0;
    double kkt_residual = 0.0;

    Eigen::VectorXd flatten() const;
};

enum class BlockMode { single_dual_step, exact_block_solve };

std::string to_string(BlockMode m);
BlockMode block_mode_from_string(const std::string& s);

struct SolverConfig {
    int max_sweeps = 500;
    double kkt_tol = 1e-8;
    BlockMode block_mode = BlockMode::single_dual_step;
    double objective_tol = 1e-12;  // relative stagnation threshold
    bool record_trace = false;

    void validate() const;
};

enum class SolveStatus { kkt_met, objective_stagnated, max_sweeps_reached };

std::string to_string(SolveStatus s);

struct ConvergenceReport {
    SolveStatus status = SolveStatus::max_sweeps_reached;
    int sweeps = 0;
    double kkt_residual = 0.0;
    double objective = 0.0;
    double factorize_seconds = 0.0;
    double sweep_seconds = 0.0;
    // populated when SolverConfig::record_trace is set; one entry per block update
    std::vector<double> block_objective_trace;
    std::vector<double> block_max_norm_trace;
};

// One factorization per non-fixed diagonal block (fixed slots stay empty).
std::vector<std::optional<EigenFactorization>> precompute_factorizations(
    const OrthTrpProblem& p);

// c_i = g_i + sum_{j != i} Q_ij y_j with the freshest block values.
Eigen::VectorXd block_offset(const OrthTrpProblem& p, const std::vector<Eigen::VectorXd>& y_blocks,
                             int i);

OrthTrpState initial_state(const OrthTrpProblem& p);

// One full pass over the blocks in ascending index order.
OrthTrpState sweep(const OrthTrpProblem& p, const OrthTrpState& s,
                   const std::vector<std::optional<EigenFactorization>>& factorizations,
                   const SolverConfig& config, std::vector<double>* objective_trace = nullptr,
                   std::vector<double>* max_norm_trace = nullptr);

// max over non-fixed blocks of stationarity, feasibility and complementary
// slackness residuals; unset duals are treated as zero.
double kkt_residual(const OrthTrpProblem& p, const std::vector<Eigen::VectorXd>& y_blocks,
                    const std::vector<std::optional<double>>& lambda_blocks);

std::pair<OrthTrpState, ConvergenceReport> solve(const OrthTrpProblem& p,
                                                 const SolverConfig& config = {});

// Dense reduced form with fixed blocks condensed into the linear term and a
// constant, so objectives can be compared against a generic dense solver.
struct DenseForm {
    Eigen::MatrixXd Q;
    Eigen::VectorXd g;
    double constant = 0.0;
    std::vector<int> free_blocks;  // free-slot -> original block index
};
DenseForm assemble_dense(const OrthTrpProblem& p);

}  // namespace otrp
