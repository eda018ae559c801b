#pragma once

#include <optional>
#include <vector>

#include "otrp/lifting.hpp"
#include "otrp/orth_trp.hpp"

namespace otrp {

// Weighted mean-square derivative cost over the horizon plus Tikhonov term.
struct CostSpec {
    int derivative_order = 2;
    std::vector<double> samples;  // eps values in [0, 1]
    std::vector<double> weights;  // positive; empty means uniform 1/n
    double horizon = 1.0;         // seconds
    double rho = -1.0;            // negative selects 1e-8 * max Gram diagonal

    static CostSpec uniform(int order, int n_samples, double horizon, double rho = -1.0);
    void validate() const;
    std::vector<double> effective_weights() const;
};

struct QuadraticObjective {
    OrthTrpProblem problem;
    double constant = 0.0;
    double rho_effective = 0.0;
};

// Q = 2 sum_i w_i A_i' A_i + 2 rho I, g = 2 sum_i w_i A_i' b_i,
// constant = sum_i w_i ||b_i||^2, with A_i and b_i the T^{-n}-scaled map and
// center derivatives at sample i.
QuadraticObjective build_quadratic(const LiftedMap& map, const CostSpec& spec);

// Direct sampled evaluation of the same cost; must agree with the assembled
// quadratic form to 1e-9 relative. rho_override supplies the resolved
// regularizer when the spec uses the automatic default.
double objective_value(const LiftedMap& map, const CostSpec& spec, const ParamPoint& y,
                       std::optional<double> rho_override = std::nullopt);

// mean over samples of || (1/T^2) d^2 q / d eps^2 ||.
double average_acceleration(const LiftedMap& map, const CostSpec& spec, const ParamPoint& y);

}  // namespace otrp
