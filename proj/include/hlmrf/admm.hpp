#pragma once

// MPE inference by consensus ADMM.
//
// Every potential and every constraint owns local copies of the variables it
// touches plus one Lagrange multiplier per copy.  An iteration updates the
// multipliers and solves each subproblem in closed form (potentials first,
// then constraints), then averages copies into the consensus and clips the
// consensus to [0,1].  The box is enforced on the consensus only.

#include <cstddef>
#include <span>
#include <vector>

#include "hlmrf/model.hpp"

namespace hlmrf {

struct AdmmConfig {
    double rho = 1.0;
    std::size_t max_iterations = 25000;
    double primal_tolerance = 1e-5;
    double dual_tolerance = 1e-5;
    /// Sequential index-order sweeps.  When false, subproblems of large models
    /// are solved concurrently.
    bool deterministic = true;

    void validate() const;
};

/// Consensus values plus flat per-subproblem copies and multipliers.
/// Subproblem i (potentials 0..m-1, then constraints m..m+r-1) owns entries
/// [offsets[i], offsets[i+1]) of `copies` and `multipliers`, ordered like the
/// terms of its functional.
struct ConsensusState {
    Assignment consensus;
    std::vector<double> copies;
    std::vector<double> multipliers;
    std::vector<std::size_t> offsets;

    /// Consensus 0.5 everywhere, copies equal to the consensus, zero multipliers.
    static ConsensusState initial(const GroundModel& model);

    bool matches(const GroundModel& model) const;

    std::span<double> local_copies(std::size_t subproblem) {
        return {copies.data() + offsets[subproblem], offsets[subproblem + 1] - offsets[subproblem]};
    }
    std::span<double> local_multipliers(std::size_t subproblem) {
        return {multipliers.data() + offsets[subproblem], offsets[subproblem + 1] - offsets[subproblem]};
    }
};

struct InferenceDiagnostics {
    std::size_t iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    bool converged = false;
    /// Energy of the returned assignment (loss-augmentation terms excluded).
    double energy = 0.0;
};

struct InferenceResult {
    Assignment assignment;
    ConsensusState state;
    InferenceDiagnostics diagnostics;
};

/// Minimizes  f_w(y) + sum_i bias_i * y_i  over the feasible set.  `linear_bias`
/// is either empty or one coefficient per variable; it is how loss-augmented
/// inference adds its linear terms without touching the weights.
///
/// Converged means both normalized residuals are within tolerance and the
/// consensus violates no constraint by more than the primal tolerance.
/// Running out of iterations is not an error: the last iterate is returned
/// with converged = false.
InferenceResult mpe_infer(const GroundModel& model, const TemplateWeights& weights, const AdmmConfig& config = {},
                          const ConsensusState* warm_start = nullptr, std::span<const double> linear_bias = {});

/// argmin_y  weight * max{ell(y), 0}^p + (rho/2) ||y - z||^2, with `z` and the
/// result indexed like the potential's terms.
std::vector<double> prox_potential(const HingePotential& potential, double weight, std::span<const double> z,
                                   double rho);

/// Euclidean projection of `z` onto the constraint set, `z` indexed like the
/// constraint's terms.  Throws InfeasibleError for a violated constant constraint.
std::vector<double> project_constraint(const LinearConstraint& constraint, std::span<const double> z);

/// Averages copy + multiplier/rho over each variable's copies and clips to
/// [0,1].  Variables without copies keep their value (or move to the box
/// corner their bias prefers).
void consensus_step(const GroundModel& model, ConsensusState& state, double rho,
                    std::span<const double> linear_bias = {});

struct Residuals {
    double primal = 0.0;
    double dual = 0.0;
};

/// primal = ||copy - consensus|| and dual = rho * ||consensus change|| (taken
/// per copy), both divided by sqrt(total copy count).
Residuals compute_residuals(const GroundModel& model, const ConsensusState& state,
                            std::span<const double> previous_consensus, double rho);

}  // namespace hlmrf
