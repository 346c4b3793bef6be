#include "hlmrf/learn_margin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hlmrf/errors.hpp"

namespace hlmrf {

void LmeConfig::validate() const {
    if (!(C > 0.0)) throw std::invalid_argument("LME C must be positive");
    if (!(violation_tolerance > 0.0)) throw std::invalid_argument("LME violation tolerance must be positive");
    if (max_oracle_calls == 0 || dca_max_flips == 0) {
        throw std::invalid_argument("LME oracle and DCA limits must be positive");
    }
}

double l1_loss(std::span<const double> truth, std::span<const double> candidate) {
    if (truth.size() != candidate.size()) throw StructuralError("loss arguments differ in length");
    double loss = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) loss += std::abs(truth[i] - candidate[i]);
    return loss;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

bool is_boolean(double v) { return v == 0.0 || v == 1.0; }

// Minimum distance past the truth value before a DCA sign is considered wrong.
constexpr double kSideTolerance = 1e-6;

}  // namespace

SeparationResult separation_oracle(const GroundModel& model, std::span<const double> truth,
                                   const TemplateWeights& weights, double current_slack, const LmeConfig& config,
                                   const AdmmConfig& infer_config, std::optional<ConsensusState>* warm) {
    config.validate();
    const auto n = model.num_variables();
    if (truth.size() != n) throw StructuralError("truth length does not match the model");

    // sign +1: candidate assumed above truth, loss term -(y - t); sign -1: below.
    std::vector<double> sign(n);
    for (std::size_t i = 0; i < n; ++i) sign[i] = truth[i] < 0.5 ? 1.0 : -1.0;
    std::vector<double> bias(n);

    const auto truth_features = template_features(model, truth);
    const double truth_energy = dot(weights.values(), truth_features);

    SeparationResult best;
    best.violation = -std::numeric_limits<double>::infinity();
    std::optional<ConsensusState> local_warm;
    auto& state = warm ? *warm : local_warm;

    for (std::size_t round = 1;; ++round) {
        for (std::size_t i = 0; i < n; ++i) bias[i] = -sign[i];
        const ConsensusState* start = (state && state->matches(model)) ? &*state : nullptr;
        auto result = mpe_infer(model, weights, infer_config, start, bias);
        state = std::move(result.state);

        const double loss = l1_loss(truth, result.assignment);
        const double violation = truth_energy - result.diagnostics.energy + loss - current_slack;
        if (violation > best.violation) {
            best.candidate = result.assignment;
            best.violation = violation;
            best.loss = loss;
            best.diagnostics = result.diagnostics;
        }
        best.dca_rounds = round;

        std::size_t flips = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (is_boolean(truth[i])) continue;
            const double y = result.assignment[i];
            if (sign[i] > 0.0 && y < truth[i] - kSideTolerance) {
                sign[i] = -1.0;
                ++flips;
            } else if (sign[i] < 0.0 && y > truth[i] + kSideTolerance) {
                sign[i] = 1.0;
                ++flips;
            }
        }
        if (flips == 0) break;
        if (round >= config.dca_max_flips) {
            best.flip_limit_reached = true;
            break;
        }
    }
    return best;
}

double margin_qp_kkt_residual(const std::vector<MarginConstraint>& constraints, double C,
                              std::span<const double> weights, double slack, std::span<const double> duals) {
    const auto s = weights.size();
    double worst = std::max(-slack, 0.0);
    double dual_sum = 0.0;
    std::vector<double> nu(weights.begin(), weights.end());
    for (std::size_t k = 0; k < constraints.size(); ++k) {
        const auto& cut = constraints[k];
        const double residual = dot(cut.feature_gap, weights) + cut.loss - slack;
        worst = std::max({worst, residual, -duals[k], std::abs(duals[k] * residual)});
        dual_sum += duals[k];
        for (std::size_t q = 0; q < s; ++q) nu[q] += duals[k] * cut.feature_gap[q];
    }
    for (std::size_t q = 0; q < s; ++q) {
        worst = std::max({worst, -weights[q], -nu[q], std::abs(nu[q] * weights[q])});
    }
    worst = std::max({worst, dual_sum - C, std::abs((C - dual_sum) * slack)});
    return worst;
}

MarginQpSolution solve_margin_qp(const std::vector<MarginConstraint>& constraints, double C,
                                 std::size_t dimension) {
    if (!(C > 0.0)) throw std::invalid_argument("margin QP needs C > 0");
    for (const auto& cut : constraints) {
        if (cut.feature_gap.size() != dimension) throw StructuralError("cut dimension mismatch");
    }
    const auto K = constraints.size();
    MarginQpSolution sol;
    sol.weights.assign(dimension, 0.0);
    sol.duals.assign(K, 0.0);
    if (K == 0) return sol;

    // Dual:  max  sum_k mu_k loss_k - 1/2 ||(-G^T mu)_+||^2  over
    // {mu >= 0, sum mu <= C}.  Index K is the slack coordinate of the
    // simplex (zero loss, zero gap).  Pairwise (SMO) ascent with the maximal
    // violating pair; w = (-G^T mu)_+ throughout.
    std::vector<double> mu(K + 1, 0.0);
    mu[K] = C;
    std::vector<double> minus_gt_mu(dimension, 0.0);
    std::vector<double>& w = sol.weights;
    std::vector<double> grad(K + 1, 0.0);
    std::vector<double> sq_norm(K);
    for (std::size_t k = 0; k < K; ++k) sq_norm[k] = dot(constraints[k].feature_gap, constraints[k].feature_gap);

    auto refresh = [&] {
        for (std::size_t q = 0; q < dimension; ++q) w[q] = std::max(minus_gt_mu[q], 0.0);
        for (std::size_t k = 0; k < K; ++k) grad[k] = constraints[k].loss + dot(constraints[k].feature_gap, w);
        grad[K] = 0.0;
    };
    refresh();

    constexpr std::size_t kMaxSweeps = 2'000'000;
    for (std::size_t it = 0; it < kMaxSweeps; ++it) {
        std::size_t up = 0;
        std::size_t down = K + 1;
        for (std::size_t k = 0; k <= K; ++k) {
            if (grad[k] > grad[up]) up = k;
            if (mu[k] > 0.0 && (down > K || grad[k] < grad[down])) down = k;
        }
        const double gain = grad[up] - grad[down];
        if (up == down || gain <= 1e-13 * std::max(1.0, std::abs(grad[up]))) break;

        // Curvature of the pair direction e_up - e_down.
        double curvature = 0.0;
        if (up < K && down < K) {
            for (std::size_t q = 0; q < dimension; ++q) {
                const double d = constraints[up].feature_gap[q] - constraints[down].feature_gap[q];
                curvature += d * d;
            }
        } else {
            curvature = sq_norm[up < K ? up : down];
        }
        double t = curvature > 0.0 ? gain / curvature : mu[down];
        t = std::min(t, mu[down]);
        if (t <= 0.0) break;
        mu[up] += t;
        mu[down] -= t;
        if (mu[down] < 1e-300) mu[down] = 0.0;
        for (std::size_t q = 0; q < dimension; ++q) {
            const double gu = up < K ? constraints[up].feature_gap[q] : 0.0;
            const double gd = down < K ? constraints[down].feature_gap[q] : 0.0;
            minus_gt_mu[q] -= t * (gu - gd);
        }
        refresh();
    }

    double slack = 0.0;
    for (std::size_t k = 0; k < K; ++k) slack = std::max(slack, grad[k]);
    sol.slack = slack;
    std::copy(mu.begin(), mu.begin() + static_cast<std::ptrdiff_t>(K), sol.duals.begin());
    sol.objective = 0.5 * dot(w, w) + C * slack;
    sol.kkt_residual = margin_qp_kkt_residual(constraints, C, w, slack, sol.duals);
    return sol;
}

LmeResult lme_train(const GroundModel& model, std::span<const double> truth, const LmeConfig& config,
                    const AdmmConfig& infer_config, std::optional<TemplateWeights> initial) {
    config.validate();
    const auto s = model.template_count();
    if (truth.size() != model.num_variables()) throw StructuralError("truth length does not match the model");
    if (!config.learnable.empty() && config.learnable.size() != s) {
        throw StructuralError("learnable mask length does not match the template count");
    }
    const auto start = initial.value_or(TemplateWeights(s, 1.0));
    if (start.size() != s) throw StructuralError("initial weight vector length mismatch");

    std::vector<std::size_t> free_dims;
    for (std::size_t q = 0; q < s; ++q) {
        if (config.learnable.empty() || config.learnable[q]) free_dims.push_back(q);
    }
    std::vector<double> w = start.values();
    for (auto q : free_dims) w[q] = 0.0;

    LmeResult out;
    std::optional<ConsensusState> warm;
    std::vector<MarginConstraint> reduced;
    double slack = 0.0;

    while (out.oracle_calls < config.max_oracle_calls) {
        const TemplateWeights current(w);
        const auto sep = separation_oracle(model, truth, current, slack, config, infer_config, &warm);
        ++out.oracle_calls;
        if (sep.violation <= config.violation_tolerance) {
            out.converged = true;
            break;
        }
        MarginConstraint cut;
        cut.feature_gap = template_features(model, truth);
        const auto candidate_features = template_features(model, sep.candidate);
        for (std::size_t q = 0; q < s; ++q) cut.feature_gap[q] -= candidate_features[q];
        cut.loss = sep.loss;

        MarginConstraint r;
        r.loss = cut.loss;
        std::vector<bool> is_free(s, false);
        for (auto q : free_dims) is_free[q] = true;
        for (std::size_t q = 0; q < s; ++q) {
            if (is_free[q]) r.feature_gap.push_back(cut.feature_gap[q]);
            else r.loss += w[q] * cut.feature_gap[q];
        }
        reduced.push_back(std::move(r));
        out.cuts.push_back(std::move(cut));
        out.cut_violations.push_back(sep.violation);

        const auto sol = solve_margin_qp(reduced, config.C, free_dims.size());
        for (std::size_t d = 0; d < free_dims.size(); ++d) w[free_dims[d]] = sol.weights[d];
        slack = sol.slack;
        out.objective_history.push_back(sol.objective);
        out.max_kkt_residual = std::max(out.max_kkt_residual, sol.kkt_residual);
    }
    out.weights = TemplateWeights(std::move(w));
    out.slack = slack;
    return out;
}

}  // namespace hlmrf
