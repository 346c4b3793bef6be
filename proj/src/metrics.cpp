#include "hlmrf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hlmrf {

namespace {

std::size_t argmax(std::span<const double> values, const std::vector<std::size_t>& group) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < group.size(); ++k) {
        if (values[group[k]] > values[group[best]]) best = k;
    }
    return best;
}

void check_binary(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
    std::size_t positives = 0;
    for (int l : labels) {
        if (l != 0 && l != 1) throw std::invalid_argument("labels must be 0 or 1");
        positives += static_cast<std::size_t>(l);
    }
    if (positives == 0 || positives == labels.size()) throw std::invalid_argument("need both classes");
}

}  // namespace

double categorical_accuracy(std::span<const double> predictions, std::span<const double> truth,
                            const std::vector<std::vector<std::size_t>>& groups) {
    if (predictions.size() != truth.size()) throw std::invalid_argument("predictions and truth differ in length");
    if (groups.empty()) throw std::invalid_argument("no label groups");
    std::size_t correct = 0;
    for (const auto& group : groups) {
        if (group.empty()) throw std::invalid_argument("empty label group");
        for (auto i : group) {
            if (i >= truth.size()) throw std::invalid_argument("label group index out of range");
        }
        if (argmax(predictions, group) == argmax(truth, group)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(groups.size());
}

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
    check_binary(scores, labels);
    // Mann-Whitney U via midranks.
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
    double positive_rank_sum = 0.0;
    double positives = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) {
                positive_rank_sum += midrank;
                positives += 1.0;
            }
        }
        i = j;
    }
    const double negatives = static_cast<double>(scores.size()) - positives;
    return (positive_rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

double auc_pr(std::span<const double> scores, std::span<const int> labels, int positive_class) {
    check_binary(scores, labels);
    if (positive_class != 0 && positive_class != 1) throw std::invalid_argument("positive class must be 0 or 1");
    const double direction = positive_class == 1 ? 1.0 : -1.0;
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return direction * scores[a] > direction * scores[b]; });
    double total_positive = 0.0;
    for (int l : labels) total_positive += l == positive_class ? 1.0 : 0.0;

    double area = 0.0;
    double tp = 0.0;
    double seen = 0.0;
    double previous_recall = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            if (labels[order[j]] == positive_class) tp += 1.0;
            seen += 1.0;
            ++j;
        }
        const double recall = tp / total_positive;
        area += (recall - previous_recall) * (tp / seen);
        previous_recall = recall;
        i = j;
    }
    return area;
}

RegressionErrors regression_errors(std::span<const double> predictions, std::span<const double> truth) {
    if (predictions.size() != truth.size()) throw std::invalid_argument("predictions and truth differ in length");
    if (predictions.empty()) throw std::invalid_argument("no values to compare");
    RegressionErrors out;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = predictions[i] - truth[i];
        out.mse += d * d;
        out.mae += std::abs(d);
    }
    const auto n = static_cast<double>(predictions.size());
    out.mse /= n;
    out.mae /= n;
    return out;
}

}  // namespace hlmrf
