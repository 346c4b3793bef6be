#pragma once

// Evaluation metrics.  All functions throw std::invalid_argument on empty or
// mismatched input.

#include <cstddef>
#include <span>
#include <vector>

namespace hlmrf {

/// Fraction of groups whose highest prediction sits at the true label.
/// Argmax ties resolve to the lowest position within the group, for both
/// predictions and truth.
double categorical_accuracy(std::span<const double> predictions, std::span<const double> truth,
                            const std::vector<std::vector<std::size_t>>& groups);

/// Probability that a random positive outscores a random negative; ties
/// count one half.  Needs both classes present.
double auc_roc(std::span<const double> scores, std::span<const int> labels);

/// Area under the precision-recall step curve for `positive_class` (0 or 1).
/// For class 0 the ranking is reversed, so low scores are confident negatives.
double auc_pr(std::span<const double> scores, std::span<const int> labels, int positive_class = 1);

struct RegressionErrors {
    double mse = 0.0;
    double mae = 0.0;
};

RegressionErrors regression_errors(std::span<const double> predictions, std::span<const double> truth);

}  // namespace hlmrf
