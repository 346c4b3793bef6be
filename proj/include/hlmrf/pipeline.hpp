#pragma once

// Command-line pipeline: ground, infer, learn and eval over a model file and a
// data directory.
//
// Data directory layout:
//   <Predicate>.tsv   observed atoms, one per row: args... [value]
//   targets.tsv       target atoms: predicate args...
//   truth/            optional; <Predicate>.tsv rows with true target values
//
// Output files (tab-separated, six fractional digits):
//   ground.tsv        variables, constraints and groundings per template
//   inferred.tsv      predicate args... value, in variable order
//   weights.tsv       template weight
//   metrics.tsv       metric value
//   diagnostics.tsv   solver diagnostics of the last command

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hlmrf/model.hpp"

namespace hlmrf {

struct PipelineOptions {
    std::string command;
    std::filesystem::path model;
    std::filesystem::path data;
    std::string method = "mle";
    double rho = 1.0;
    std::size_t max_iterations = 25000;
    std::uint64_t seed = 0;
    bool deterministic = false;
    std::filesystem::path out = ".";
    /// Weights for infer (defaults to the model file, learnable templates at 1.0).
    std::optional<std::filesystem::path> weights;
    /// Predictions for eval (defaults to <out>/inferred.tsv).
    std::optional<std::filesystem::path> predictions;
    /// Truth directory for learn and eval (defaults to <data>/truth).
    std::optional<std::filesystem::path> truth;
};

/// Runs one command.  Returns the process exit status; on failure a single
/// "error: ..." line goes to `diagnostics`.  Non-convergence only warns.
int run_pipeline(const PipelineOptions& options, std::ostream& diagnostics);

/// Formats with six fractional digits; negative zero prints as 0.000000.
std::string format_decimal(double value);

/// Reads weights.tsv; templates not listed keep `defaults`.
TemplateWeights read_weights_file(const std::filesystem::path& file, const TemplateWeights& defaults);

}  // namespace hlmrf
