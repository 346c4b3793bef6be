#include "hlmrf/learn_likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "hlmrf/errors.hpp"

namespace hlmrf {

void PerceptronConfig::validate() const {
    if (steps < 1) throw std::invalid_argument("perceptron needs at least one step");
    if (!(step_size > 0.0)) throw std::invalid_argument("perceptron step size must be positive");
}

void MpleConfig::validate() const {
    if (samples_per_variable < 2) throw std::invalid_argument("MPLE needs at least two samples per variable");
}

TemplateWeights voted_perceptron(const TemplateWeights& initial, const PerceptronConfig& config,
                                 const DescentGradient& gradient) {
    config.validate();
    const auto s = initial.size();
    if (!config.learnable.empty() && config.learnable.size() != s) {
        throw StructuralError("learnable mask length does not match the template count");
    }
    std::vector<double> w = initial.values();
    std::vector<double> sum(s, 0.0);
    for (std::size_t step = 0; step < config.steps; ++step) {
        const auto g = gradient(TemplateWeights(w));
        if (g.size() != s) throw StructuralError("gradient length does not match the template count");
        for (std::size_t q = 0; q < s; ++q) {
            if (!config.learnable.empty() && !config.learnable[q]) continue;
            w[q] = std::max(w[q] - config.step_size * g[q], 0.0);
        }
        for (std::size_t q = 0; q < s; ++q) sum[q] += w[q];
    }
    if (!config.average_iterates) return TemplateWeights(std::move(w));
    for (auto& v : sum) v /= static_cast<double>(config.steps);
    return TemplateWeights(std::move(sum));
}

namespace {

void scale_in_place(std::vector<double>& g, const GroundModel& model) {
    for (std::size_t q = 0; q < g.size(); ++q) {
        const auto count = model.grounding_count(q);
        if (count > 0) g[q] /= static_cast<double>(count);
    }
}

void check_truth(const GroundModel& model, std::span<const double> truth) {
    if (truth.size() != model.num_variables()) {
        throw StructuralError("truth has " + std::to_string(truth.size()) + " values for " +
                              std::to_string(model.num_variables()) + " variables");
    }
}

}  // namespace

MleGradient mle_gradient(const GroundModel& model, std::span<const double> truth, const TemplateWeights& weights,
                         const AdmmConfig& infer_config, bool scale_by_groundings,
                         std::optional<ConsensusState>* warm) {
    check_truth(model, truth);
    const ConsensusState* start = (warm && *warm && (*warm)->matches(model)) ? &**warm : nullptr;
    auto result = mpe_infer(model, weights, infer_config, start);

    auto gradient = template_features(model, result.assignment);
    const auto observed = template_features(model, truth);
    for (std::size_t q = 0; q < gradient.size(); ++q) gradient[q] -= observed[q];
    if (scale_by_groundings) scale_in_place(gradient, model);
    if (warm) *warm = std::move(result.state);
    return {std::move(gradient), result.diagnostics};
}

TrainingResult mle_train(const GroundModel& model, std::span<const double> truth, const PerceptronConfig& config,
                         const AdmmConfig& infer_config, std::optional<TemplateWeights> initial) {
    const auto start = initial.value_or(TemplateWeights(model.template_count(), 1.0));
    std::optional<ConsensusState> warm;
    TrainingResult out;
    out.weights = voted_perceptron(start, config, [&](const TemplateWeights& w) {
        auto g = mle_gradient(model, truth, w, infer_config, config.scale_by_groundings, &warm);
        ++out.steps;
        if (!g.diagnostics.converged) ++out.unconverged_inferences;
        // Ascend the log-likelihood.
        for (auto& v : g.gradient) v = -v;
        return g.gradient;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Pseudolikelihood

std::vector<SamplingUnit> sampling_units(const GroundModel& model, bool block_constraints) {
    const auto n = model.num_variables();
    std::vector<bool> blocked(n, false);
    std::vector<SamplingUnit> units;
    if (!model.constraints().empty() && !block_constraints) {
        throw ModelError("pseudolikelihood with constraints requires block sampling");
    }
    for (const auto& c : model.constraints()) {
        const bool functional =
            c.kind == ConstraintKind::Equality && !c.func.terms().empty() &&
            std::all_of(c.func.terms().begin(), c.func.terms().end(),
                        [](const LinearTerm& t) { return t.coefficient == 1.0; });
        if (!functional) {
            throw ModelError("pseudolikelihood supports only functional sum-to-constant constraints");
        }
        SamplingUnit unit{{}, -c.func.constant()};
        for (const auto& t : c.func.terms()) {
            if (blocked[t.variable]) throw ModelError("pseudolikelihood blocks must be disjoint");
            blocked[t.variable] = true;
            unit.variables.push_back(t.variable);
        }
        units.push_back(std::move(unit));
    }
    std::vector<SamplingUnit> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!blocked[i]) out.push_back({{i}, 1.0});
    }
    out.insert(out.end(), std::make_move_iterator(units.begin()), std::make_move_iterator(units.end()));
    return out;
}

namespace {

// A potential restricted to a sampling unit: ell(s) = base + sum_k coeff[k] s_k.
struct LocalPotential {
    double base = 0.0;
    std::vector<double> coeff;
    int exponent = 1;
    std::size_t template_index = 0;
    double weight = 0.0;
};

std::vector<LocalPotential> restrict_to_unit(const GroundModel& model, std::span<const double> truth,
                                             const TemplateWeights* weights, const SamplingUnit& unit,
                                             std::span<const std::size_t> touching) {
    std::vector<LocalPotential> local;
    local.reserve(touching.size());
    for (auto j : touching) {
        const auto& p = model.potentials()[j];
        LocalPotential lp;
        lp.base = p.ell.constant();
        lp.coeff.assign(unit.variables.size(), 0.0);
        lp.exponent = p.exponent;
        lp.template_index = p.template_index;
        lp.weight = weights ? (*weights)[p.template_index] : 0.0;
        for (const auto& t : p.ell.terms()) {
            auto it = std::find(unit.variables.begin(), unit.variables.end(), t.variable);
            if (it != unit.variables.end()) {
                lp.coeff[static_cast<std::size_t>(it - unit.variables.begin())] += t.coefficient;
            } else {
                lp.base += t.coefficient * truth[t.variable];
            }
        }
        local.push_back(std::move(lp));
    }
    return local;
}

std::vector<std::size_t> touching_potentials(const GroundModel& model, const SamplingUnit& unit) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < model.potentials().size(); ++j) {
        for (const auto& t : model.potentials()[j].ell.terms()) {
            if (std::find(unit.variables.begin(), unit.variables.end(), t.variable) != unit.variables.end()) {
                out.push_back(j);
                break;
            }
        }
    }
    return out;
}

ConditionalEstimate estimate(const std::vector<LocalPotential>& local, std::size_t template_count,
                             const SamplingUnit& unit, const MpleConfig& config, std::uint64_t stream) {
    ConditionalEstimate est;
    est.expected.assign(template_count, 0.0);
    est.standard_error.assign(template_count, 0.0);
    if (local.empty()) return est;

    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    const auto n = config.samples_per_variable;
    const auto k = unit.variables.size();
    std::vector<double> point(k);
    std::vector<double> features(template_count);

    // Running sums of w, w x, w^2, w^2 x, w^2 x^2 with weights relative to
    // exp(-shift), rescaled whenever a lower energy appears.
    double shift = 0.0;
    bool started = false;
    double sw = 0.0, sw2 = 0.0;
    std::vector<double> swx(template_count, 0.0), sw2x(template_count, 0.0), sw2x2(template_count, 0.0);

    for (std::size_t sample = 0; sample < n; ++sample) {
        if (k == 1) {
            // Stratified uniform draw on [0, 1].
            point[0] = (static_cast<double>(sample) + uniform(rng)) / static_cast<double>(n);
        } else {
            double total = 0.0;
            for (auto& v : point) {
                v = -std::log1p(-uniform(rng));
                total += v;
            }
            const double scale = unit.total > 0.0 ? unit.total / total : 0.0;
            for (auto& v : point) v *= scale;
        }

        std::fill(features.begin(), features.end(), 0.0);
        double energy = 0.0;
        for (const auto& lp : local) {
            double ell = lp.base;
            for (std::size_t d = 0; d < k; ++d) ell += lp.coeff[d] * point[d];
            const double hinge = std::max(ell, 0.0);
            const double phi = lp.exponent == 2 ? hinge * hinge : hinge;
            features[lp.template_index] += phi;
            energy += lp.weight * phi;
        }
        est.potential_evaluations += local.size();
        if (!std::isfinite(energy)) throw NumericalError("conditional energy is not finite");

        if (!started || energy < shift) {
            if (started) {
                const double r = std::exp(energy - shift);
                sw *= r;
                sw2 *= r * r;
                for (std::size_t q = 0; q < template_count; ++q) {
                    swx[q] *= r;
                    sw2x[q] *= r * r;
                    sw2x2[q] *= r * r;
                }
            }
            shift = energy;
            started = true;
        }
        const double w = std::exp(shift - energy);
        sw += w;
        sw2 += w * w;
        for (std::size_t q = 0; q < template_count; ++q) {
            swx[q] += w * features[q];
            sw2x[q] += w * w * features[q];
            sw2x2[q] += w * w * features[q] * features[q];
        }
    }
    if (!(sw > 0.0)) throw NumericalError("all conditional sample weights vanished");
    for (std::size_t q = 0; q < template_count; ++q) {
        const double mean = swx[q] / sw;
        est.expected[q] = mean;
        const double spread = sw2x2[q] - 2.0 * mean * sw2x[q] + mean * mean * sw2;
        est.standard_error[q] = std::sqrt(std::max(spread, 0.0)) / sw;
    }
    return est;
}

std::vector<double> local_sums(const std::vector<LocalPotential>& local, std::size_t template_count,
                               const SamplingUnit& unit, std::span<const double> point) {
    std::vector<double> out(template_count, 0.0);
    for (const auto& lp : local) {
        double ell = lp.base;
        for (std::size_t d = 0; d < unit.variables.size(); ++d) ell += lp.coeff[d] * point[unit.variables[d]];
        const double hinge = std::max(ell, 0.0);
        out[lp.template_index] += lp.exponent == 2 ? hinge * hinge : hinge;
    }
    return out;
}

void check_unit(const GroundModel& model, const SamplingUnit& unit) {
    if (unit.variables.empty()) throw StructuralError("sampling unit has no variables");
    for (auto v : unit.variables) {
        if (v >= model.num_variables()) throw StructuralError("sampling unit references a variable out of range");
    }
}

}  // namespace

ConditionalEstimate conditional_expectation(const GroundModel& model, std::span<const double> truth,
                                            const TemplateWeights& weights, const SamplingUnit& unit,
                                            const MpleConfig& config, std::uint64_t stream) {
    config.validate();
    check_truth(model, truth);
    check_unit(model, unit);
    if (weights.size() != model.template_count()) throw StructuralError("weight vector length mismatch");
    const auto touching = touching_potentials(model, unit);
    const auto local = restrict_to_unit(model, truth, &weights, unit, touching);
    return estimate(local, model.template_count(), unit, config, stream);
}

std::vector<double> local_features(const GroundModel& model, std::span<const double> point,
                                   const SamplingUnit& unit) {
    check_truth(model, point);
    check_unit(model, unit);
    const auto touching = touching_potentials(model, unit);
    const auto local = restrict_to_unit(model, point, nullptr, unit, touching);
    return local_sums(local, model.template_count(), unit, point);
}

MpleGradient mple_gradient(const GroundModel& model, std::span<const double> truth, const TemplateWeights& weights,
                           const MpleConfig& config) {
    config.validate();
    check_truth(model, truth);
    if (weights.size() != model.template_count()) throw StructuralError("weight vector length mismatch");
    const auto units = sampling_units(model, config.block_constraints);

    // Which unit each variable belongs to, then potential lists per unit.
    std::vector<std::size_t> unit_of(model.num_variables(), 0);
    for (std::size_t u = 0; u < units.size(); ++u) {
        for (auto v : units[u].variables) unit_of[v] = u;
    }
    std::vector<std::vector<std::size_t>> touching(units.size());
    for (std::size_t j = 0; j < model.potentials().size(); ++j) {
        for (const auto& t : model.potentials()[j].ell.terms()) {
            auto& list = touching[unit_of[t.variable]];
            if (list.empty() || list.back() != j) list.push_back(j);
        }
    }

    const auto s = model.template_count();
    std::vector<std::vector<double>> contributions(units.size());
    std::vector<std::size_t> evaluations(units.size(), 0);
    const auto count = static_cast<std::ptrdiff_t>(units.size());
    bool failed = false;
#pragma omp parallel for schedule(dynamic, 16) if (units.size() > 64)
    for (std::ptrdiff_t ui = 0; ui < count; ++ui) {
        const auto u = static_cast<std::size_t>(ui);
        try {
            const auto local = restrict_to_unit(model, truth, &weights, units[u], touching[u]);
            const auto est = estimate(local, s, units[u], config, u);
            const auto observed = local_sums(local, s, units[u], truth);
            auto& out = contributions[u];
            out.resize(s);
            for (std::size_t q = 0; q < s; ++q) out[q] = est.expected[q] - observed[q];
            evaluations[u] = est.potential_evaluations;
        } catch (...) {
#pragma omp critical
            failed = true;
        }
    }
    if (failed) throw NumericalError("pseudolikelihood conditional expectation failed");

    MpleGradient out;
    out.gradient.assign(s, 0.0);
    for (std::size_t u = 0; u < units.size(); ++u) {
        for (std::size_t q = 0; q < s; ++q) out.gradient[q] += contributions[u][q];
        out.potential_evaluations += evaluations[u];
    }
    return out;
}

TrainingResult mple_train(const GroundModel& model, std::span<const double> truth, const PerceptronConfig& config,
                          const MpleConfig& mple_config, std::optional<TemplateWeights> initial) {
    // Fail fast on unsupported constraint structure.
    sampling_units(model, mple_config.block_constraints);
    const auto start = initial.value_or(TemplateWeights(model.template_count(), 1.0));
    TrainingResult out;
    out.weights = voted_perceptron(start, config, [&](const TemplateWeights& w) {
        auto g = mple_gradient(model, truth, w, mple_config).gradient;
        ++out.steps;
        if (config.scale_by_groundings) scale_in_place(g, model);
        for (auto& v : g) v = -v;
        return g;
    });
    return out;
}

}  // namespace hlmrf
