#include "hlmrf/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hlmrf/errors.hpp"

namespace hlmrf {

LinearFunctional::LinearFunctional(std::vector<LinearTerm> terms, double constant) : constant_(constant) {
    std::stable_sort(terms.begin(), terms.end(),
                     [](const LinearTerm& a, const LinearTerm& b) { return a.variable < b.variable; });
    for (const auto& term : terms) {
        if (!terms_.empty() && terms_.back().variable == term.variable) {
            terms_.back().coefficient += term.coefficient;
        } else {
            terms_.push_back(term);
        }
    }
    std::erase_if(terms_, [](const LinearTerm& t) { return t.coefficient == 0.0; });
}

double LinearFunctional::evaluate(std::span<const double> values) const {
    double sum = constant_;
    for (const auto& term : terms_) {
        if (term.variable >= values.size()) {
            throw StructuralError("functional references variable " + std::to_string(term.variable) +
                                  " but assignment has length " + std::to_string(values.size()));
        }
        sum += term.coefficient * values[term.variable];
    }
    return sum;
}

double LinearFunctional::squared_coefficient_norm() const noexcept {
    double sum = 0.0;
    for (const auto& term : terms_) sum += term.coefficient * term.coefficient;
    return sum;
}

std::size_t LinearFunctional::required_length() const noexcept {
    return terms_.empty() ? 0 : terms_.back().variable + 1;
}

double LinearFunctional::max_over_box() const noexcept {
    double sum = constant_;
    for (const auto& term : terms_) sum += std::max(term.coefficient, 0.0);
    return sum;
}

TemplateWeights::TemplateWeights(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t q = 0; q < values_.size(); ++q) {
        if (!(values_[q] >= 0.0) || !std::isfinite(values_[q])) {
            throw StructuralError("template weight " + std::to_string(q) + " must be finite and nonnegative");
        }
    }
}

TemplateWeights::TemplateWeights(std::size_t count, double value)
    : TemplateWeights(std::vector<double>(count, value)) {}

GroundModel::GroundModel(std::size_t num_variables, std::vector<HingePotential> potentials,
                         std::vector<LinearConstraint> constraints, std::size_t template_count)
    : num_variables_(num_variables),
      potentials_(std::move(potentials)),
      constraints_(std::move(constraints)),
      template_count_(template_count),
      partition_(template_count) {
    for (std::size_t j = 0; j < potentials_.size(); ++j) {
        const auto& p = potentials_[j];
        if (p.exponent != 1 && p.exponent != 2) {
            throw StructuralError("potential " + std::to_string(j) + " has exponent " +
                                  std::to_string(p.exponent) + "; expected 1 or 2");
        }
        if (p.template_index >= template_count_) {
            throw StructuralError("potential " + std::to_string(j) + " references template " +
                                  std::to_string(p.template_index) + " of " + std::to_string(template_count_));
        }
        if (p.ell.required_length() > num_variables_) {
            throw StructuralError("potential " + std::to_string(j) + " references a variable out of range");
        }
        partition_[p.template_index].push_back(j);
    }
    for (std::size_t k = 0; k < constraints_.size(); ++k) {
        if (constraints_[k].func.required_length() > num_variables_) {
            throw StructuralError("constraint " + std::to_string(k) + " references a variable out of range");
        }
    }
}

double evaluate_potential(const HingePotential& potential, std::span<const double> assignment) {
    const double hinge = std::max(potential.ell.evaluate(assignment), 0.0);
    return potential.exponent == 2 ? hinge * hinge : hinge;
}

std::vector<double> template_features(const GroundModel& model, std::span<const double> assignment) {
    if (assignment.size() != model.num_variables()) {
        throw StructuralError("assignment length " + std::to_string(assignment.size()) + " does not match " +
                              std::to_string(model.num_variables()) + " model variables");
    }
    std::vector<double> features(model.template_count(), 0.0);
    for (std::size_t q = 0; q < model.template_count(); ++q) {
        for (std::size_t j : model.template_members(q)) {
            features[q] += evaluate_potential(model.potentials()[j], assignment);
        }
    }
    return features;
}

double evaluate_energy(const GroundModel& model, const TemplateWeights& weights,
                       std::span<const double> assignment) {
    if (weights.size() != model.template_count()) {
        throw StructuralError("weight vector has " + std::to_string(weights.size()) + " entries for " +
                              std::to_string(model.template_count()) + " templates");
    }
    const auto features = template_features(model, assignment);
    double energy = 0.0;
    for (std::size_t q = 0; q < features.size(); ++q) energy += weights[q] * features[q];
    return energy;
}

double max_constraint_violation(const GroundModel& model, std::span<const double> assignment) {
    double worst = 0.0;
    for (const auto& c : model.constraints()) {
        const double value = c.func.evaluate(assignment);
        const double violation = c.kind == ConstraintKind::Equality ? std::abs(value) : std::max(-value, 0.0);
        worst = std::max(worst, violation);
    }
    return worst;
}

FeasibilityReport check_feasible(const GroundModel& model, std::span<const double> assignment, double tol) {
    if (assignment.size() != model.num_variables()) {
        throw StructuralError("assignment length does not match model");
    }
    double worst = max_constraint_violation(model, assignment);
    for (double v : assignment) {
        worst = std::max({worst, -v, v - 1.0});
    }
    return {worst <= tol, worst};
}

}  // namespace hlmrf
