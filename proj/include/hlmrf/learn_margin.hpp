#pragma once

// Large-margin weight learning with the one-slack cutting-plane method.
//
//     min_{w >= 0, xi >= 0}  1/2 ||w||^2 + C xi
//     s.t.  w . (Phi(truth) - Phi(y~)) <= -L(truth, y~) + xi   for all y~ in K
//
// K grows by the most violated constraint found by loss-augmented inference.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hlmrf/admm.hpp"
#include "hlmrf/model.hpp"

namespace hlmrf {

struct MarginConstraint {
    std::vector<double> feature_gap;  ///< Phi(truth) - Phi(candidate)
    double loss = 0.0;
};

struct LmeConfig {
    double C = 0.1;
    double violation_tolerance = 1e-4;
    std::size_t max_oracle_calls = 50;
    std::size_t dca_max_flips = 25;
    /// Templates whose weight may change; empty means all of them.  Frozen
    /// templates keep the weight given as the starting point.
    std::vector<bool> learnable;

    void validate() const;
};

double l1_loss(std::span<const double> truth, std::span<const double> candidate);

struct SeparationResult {
    Assignment candidate;
    /// w . (Phi(truth) - Phi(candidate)) + L(truth, candidate) - xi
    double violation = 0.0;
    double loss = 0.0;
    /// True when the DCA sign iteration hit dca_max_flips.
    bool flip_limit_reached = false;
    std::size_t dca_rounds = 0;
    InferenceDiagnostics diagnostics;
};

/// Loss-augmented MPE: argmin_y  f_w(y) - L(truth, y).  Exact for Boolean
/// truth; interior truth values are handled by the DCA sign iteration
/// starting from the rounded labels.
SeparationResult separation_oracle(const GroundModel& model, std::span<const double> truth,
                                   const TemplateWeights& weights, double current_slack, const LmeConfig& config,
                                   const AdmmConfig& infer_config, std::optional<ConsensusState>* warm = nullptr);

struct MarginQpSolution {
    std::vector<double> weights;
    double slack = 0.0;
    double objective = 0.0;
    /// Dual multipliers of the cuts.
    std::vector<double> duals;
    double kkt_residual = 0.0;
};

/// Solves the margin QP over the given cuts.  The bound of cut k is
/// feature_gap_k . w + loss_k <= xi; `loss` may be any real here (frozen
/// templates fold into it), while cuts stored by lme_train keep loss >= 0.
MarginQpSolution solve_margin_qp(const std::vector<MarginConstraint>& constraints, double C,
                                 std::size_t dimension);

/// Largest KKT violation of (weights, slack, duals) for the margin QP.
double margin_qp_kkt_residual(const std::vector<MarginConstraint>& constraints, double C,
                              std::span<const double> weights, double slack, std::span<const double> duals);

struct LmeResult {
    TemplateWeights weights;
    double slack = 0.0;
    std::vector<MarginConstraint> cuts;
    /// QP objective after each re-solve.
    std::vector<double> objective_history;
    /// Violation of each cut when it was added.
    std::vector<double> cut_violations;
    std::size_t oracle_calls = 0;
    bool converged = false;
    double max_kkt_residual = 0.0;
};

LmeResult lme_train(const GroundModel& model, std::span<const double> truth, const LmeConfig& config,
                    const AdmmConfig& infer_config, std::optional<TemplateWeights> initial = std::nullopt);

}  // namespace hlmrf
