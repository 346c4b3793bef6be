#pragma once

// Reference implementations used only by the tests.  Nothing here shares an
// algorithm with the library code it checks.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hlmrf/grounding.hpp"
#include "hlmrf/model.hpp"
#include "hlmrf/model_file.hpp"

namespace hlmrf::oracles {

struct MpeOracleResult {
    Assignment assignment;
    double energy = 0.0;
};

/// Exhaustive grid search with step `h` followed by pattern-search refinement
/// down to step 1e-7.  Each equality constraint is solved for one variable,
/// so every point visited is exactly feasible.  Throws InfeasibleError when
/// no grid point is feasible.  Needs num_variables <= 4.
MpeOracleResult brute_force_mpe(const GroundModel& model, const TemplateWeights& weights, double h = 0.02);

struct QuadratureResult {
    /// Per template, expected sum of the potentials touching the variable.
    std::vector<double> expected;
    /// log of the integral over [0,1] of exp(-local energy).
    double log_normalizer = 0.0;
};

/// Conditional of one unconstrained variable given the rest at `point`,
/// integrated by composite Simpson with `resolution` panels per piece; pieces
/// are split at the hinge kinks.
QuadratureResult quadrature_conditional(const GroundModel& model, std::span<const double> point,
                                        const TemplateWeights& weights, std::size_t variable,
                                        std::size_t resolution = 2000);

/// Log-pseudolikelihood of `point` with every variable unconstrained.
double quadrature_log_pseudolikelihood(const GroundModel& model, std::span<const double> point,
                                       const TemplateWeights& weights, std::size_t resolution = 2000);

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Central differences, one coordinate at a time.
std::vector<double> finite_diff_gradient(const ScalarFunction& f, std::span<const double> point, double h);

struct GeneratorConfig {
    std::uint64_t seed = 0;
    std::size_t variables = 4;
    std::size_t potentials = 8;
    std::size_t templates = 3;
    /// Probability that a potential is squared.
    double squared_fraction = 0.5;
    /// Upper bound; each constraint takes a disjoint block of variables.
    std::size_t constraints = 2;
    /// Include inequality constraints as well as equalities.
    bool inequalities = true;
    double max_weight = 2.0;
    std::size_t max_terms = 3;
};

struct RandomInstance {
    GroundModel model;
    TemplateWeights weights;
    /// A feasible point the constraints were built around.
    Assignment feasible_point;
};

/// Coefficients in [-2,2], constants in [-1,1], weights in (0, max_weight].
RandomInstance generate_random_model(const GeneratorConfig& config);

// ---------------------------------------------------------------------------
// Synthetic relational tasks

struct TaskSplit {
    Database db;
    Assignment truth;
};

struct SyntheticTask {
    ModelFile model;
    TaskSplit train;
    TaskSplit test;
};

struct CitationConfig {
    std::uint64_t seed = 0;
    std::size_t nodes = 40;
    /// Fraction of seed labels flipped.
    double label_noise = 0.15;
    /// Fraction of nodes whose label is observed.
    double seeded_fraction = 0.5;
    /// Probability that an edge joins two nodes of the same class.
    double homophily = 0.9;
    std::size_t edges_per_node = 4;
};

/// Two classes.  Train and test are independent graphs drawn from the same
/// distribution; targets are Label atoms of the unseeded nodes.
SyntheticTask generate_citation_task(const CitationConfig& config);

struct TrustConfig {
    std::uint64_t seed = 0;
    std::size_t nodes = 100;
    std::size_t triangles = 350;
    /// Fraction of edge signs flipped (applied separately to within- and
    /// cross-faction edges).
    double flip_fraction = 0.1;
    /// Fraction of edges whose sign is hidden at test time.
    double test_fraction = 0.3;
    bool squared = true;
};

/// Two factions with balanced-triad signs.  Test: hidden edges are targets,
/// all other edges observed.  Train: the other edges only, a share of them
/// hidden as training targets.
SyntheticTask generate_trust_task(const TrustConfig& config);

struct SyntheticTasks {
    SyntheticTask citation;
    SyntheticTask trust;
};

SyntheticTasks generate_synthetic_tasks(std::uint64_t seed);

/// Writes predicate TSVs, targets.tsv and truth/ in the layout the CLI reads.
void write_split(const SyntheticTask& task, const TaskSplit& split, const std::filesystem::path& directory);

}  // namespace hlmrf::oracles
