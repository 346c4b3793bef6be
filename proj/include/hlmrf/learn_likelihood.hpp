#pragma once

// Weight learning by MPE-approximate maximum likelihood and by maximum
// pseudolikelihood, both optimized with the projected fixed-step scheme of
// the voted perceptron.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hlmrf/admm.hpp"
#include "hlmrf/model.hpp"

namespace hlmrf {

struct PerceptronConfig {
    std::size_t steps = 100;
    double step_size = 1.0;
    /// Divide the q-th gradient component by the number of groundings of template q.
    bool scale_by_groundings = true;
    /// Return the mean of all post-projection iterates instead of the last one.
    bool average_iterates = true;
    /// Templates whose weight may change; empty means all of them.
    std::vector<bool> learnable;

    void validate() const;
};

struct MpleConfig {
    std::size_t samples_per_variable = 1000;
    std::uint64_t seed = 0;
    /// Sample the variables of functional equality constraints jointly from
    /// their simplex.  When false, any constraint makes MPLE an error.
    bool block_constraints = true;

    void validate() const;
};

struct TrainingResult {
    TemplateWeights weights;
    std::size_t steps = 0;
    /// Inference calls that hit the iteration limit.
    std::size_t unconverged_inferences = 0;
};

/// Gradient of the objective to *minimize*, evaluated at the given weights.
using DescentGradient = std::function<std::vector<double>(const TemplateWeights&)>;

/// w <- max{w - step * g(w), 0} for `steps` iterations; frozen templates
/// never move.  Returns the average of the iterates after each step (not
/// counting the initial point) or the final iterate.
TemplateWeights voted_perceptron(const TemplateWeights& initial, const PerceptronConfig& config,
                                 const DescentGradient& gradient);

// ---------------------------------------------------------------------------
// Maximum likelihood

struct MleGradient {
    /// Phi(MPE state) - Phi(truth): the log-likelihood gradient with the
    /// expectation replaced by the most probable state.
    std::vector<double> gradient;
    InferenceDiagnostics diagnostics;
};

/// `warm` is read as a warm start when it matches the model and overwritten
/// with the final ADMM state.
MleGradient mle_gradient(const GroundModel& model, std::span<const double> truth, const TemplateWeights& weights,
                         const AdmmConfig& infer_config, bool scale_by_groundings,
                         std::optional<ConsensusState>* warm = nullptr);

TrainingResult mle_train(const GroundModel& model, std::span<const double> truth, const PerceptronConfig& config,
                         const AdmmConfig& infer_config, std::optional<TemplateWeights> initial = std::nullopt);

// ---------------------------------------------------------------------------
// Maximum pseudolikelihood

/// A set of variables resampled together: a single unconstrained variable,
/// or the free variables of a functional constraint  sum(y) = total.
struct SamplingUnit {
    std::vector<std::size_t> variables;
    double total = 1.0;
};

/// Throws ModelError if a constraint is not a functional sum over variables
/// disjoint from every other constraint, or if constraints exist and block
/// sampling is disabled.
std::vector<SamplingUnit> sampling_units(const GroundModel& model, bool block_constraints);

struct ConditionalEstimate {
    /// Per-template expectation of the summed potentials that touch the unit.
    std::vector<double> expected;
    /// Delta-method standard error of each component.
    std::vector<double> standard_error;
    std::size_t potential_evaluations = 0;
};

/// Self-normalized uniform-proposal Monte Carlo over the conditional density
/// of `unit` given all other variables at `truth`.  The RNG stream depends only
/// on (config.seed, stream).
ConditionalEstimate conditional_expectation(const GroundModel& model, std::span<const double> truth,
                                            const TemplateWeights& weights, const SamplingUnit& unit,
                                            const MpleConfig& config, std::uint64_t stream = 0);

/// Local template sums of the potentials touching `unit`, at `point`.
std::vector<double> local_features(const GroundModel& model, std::span<const double> point, const SamplingUnit& unit);

struct MpleGradient {
    /// sum over units of E[local sum] - local sum at truth: the gradient of
    /// the log-pseudolikelihood.
    std::vector<double> gradient;
    std::size_t potential_evaluations = 0;
};

MpleGradient mple_gradient(const GroundModel& model, std::span<const double> truth, const TemplateWeights& weights,
                           const MpleConfig& config);

TrainingResult mple_train(const GroundModel& model, std::span<const double> truth, const PerceptronConfig& config,
                          const MpleConfig& mple_config, std::optional<TemplateWeights> initial = std::nullopt);

}  // namespace hlmrf
