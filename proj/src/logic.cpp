#include "hlmrf/logic.hpp"

#include <algorithm>
#include <numeric>

#include "hlmrf/errors.hpp"

namespace hlmrf {

double luk_conjunction(std::span<const double> values) {
    if (values.empty()) return 1.0;
    const double sum = std::accumulate(values.begin(), values.end(), 0.0);
    return std::max(sum - static_cast<double>(values.size() - 1), 0.0);
}

double luk_disjunction(std::span<const double> values) {
    const double sum = std::accumulate(values.begin(), values.end(), 0.0);
    return std::min(sum, 1.0);
}

double GroundLiteral::value(std::span<const double> assignment) const {
    double v = 0.0;
    if (const auto* obs = std::get_if<Observed>(&atom)) {
        v = obs->value;
    } else {
        const auto index = std::get<Free>(atom).variable;
        if (index >= assignment.size()) {
            throw StructuralError("ground literal references unresolved variable " + std::to_string(index));
        }
        v = assignment[index];
    }
    return negated ? 1.0 - v : v;
}

namespace {

std::vector<double> literal_values(const std::vector<GroundLiteral>& literals, std::span<const double> assignment) {
    std::vector<double> values;
    values.reserve(literals.size());
    for (const auto& lit : literals) values.push_back(lit.value(assignment));
    return values;
}

// Adds sign * (literal value) to the affine accumulator.
void fold_literal(const GroundLiteral& lit, double sign, std::vector<LinearTerm>& terms, double& constant) {
    if (const auto* obs = std::get_if<GroundLiteral::Observed>(&lit.atom)) {
        constant += sign * (lit.negated ? 1.0 - obs->value : obs->value);
        return;
    }
    const auto index = std::get<GroundLiteral::Free>(lit.atom).variable;
    if (lit.negated) {
        constant += sign;
        terms.push_back({index, -sign});
    } else {
        terms.push_back({index, sign});
    }
}

}  // namespace

double rule_truth(const GroundRule& rule, std::span<const double> assignment) {
    const auto body = literal_values(rule.body, assignment);
    const auto head = literal_values(rule.head, assignment);
    return std::min(1.0, 1.0 - luk_conjunction(body) + luk_disjunction(head));
}

HingePotential rule_to_hinge(const GroundRule& rule, int exponent, std::size_t template_index) {
    std::vector<LinearTerm> terms;
    double constant = 0.0;
    for (const auto& lit : rule.body) fold_literal(lit, 1.0, terms, constant);
    if (!rule.body.empty()) constant -= static_cast<double>(rule.body.size() - 1);
    else constant += 1.0;
    for (const auto& lit : rule.head) fold_literal(lit, -1.0, terms, constant);
    return HingePotential{LinearFunctional(std::move(terms), constant), exponent, template_index};
}

std::vector<std::string> rule_variables(const RuleTemplate& rule) {
    std::vector<std::string> names;
    auto collect = [&](const std::vector<Literal>& literals) {
        for (const auto& lit : literals) {
            for (const auto& arg : lit.arguments) {
                if (const auto* var = std::get_if<LogicVariable>(&arg)) {
                    if (std::find(names.begin(), names.end(), var->name) == names.end()) names.push_back(var->name);
                }
            }
        }
    };
    collect(rule.body);
    collect(rule.head);
    return names;
}

void validate_rule(const RuleTemplate& rule) {
    if (rule.body.empty() && rule.head.empty()) throw ModelError("rule has neither body nor head");
    if (rule.exponent != 1 && rule.exponent != 2) throw ModelError("rule exponent must be 1 or 2");
    if (rule.weight && !(*rule.weight >= 0.0)) throw ModelError("rule weight must be nonnegative");

    std::vector<std::string> body_vars;
    for (const auto& lit : rule.body) {
        for (const auto& arg : lit.arguments) {
            if (const auto* var = std::get_if<LogicVariable>(&arg)) body_vars.push_back(var->name);
        }
    }
    auto in_body = [&](const std::string& name) {
        return std::find(body_vars.begin(), body_vars.end(), name) != body_vars.end();
    };
    if (!rule.body.empty()) {
        for (const auto& lit : rule.head) {
            for (const auto& arg : lit.arguments) {
                if (const auto* var = std::get_if<LogicVariable>(&arg); var && !in_body(var->name)) {
                    throw ModelError("head variable " + var->name + " is not bound by the rule body");
                }
            }
        }
    }
    const auto all_vars = rule_variables(rule);
    for (const auto& guard : rule.guards) {
        for (const auto* name : {&guard.left, &guard.right}) {
            if (std::find(all_vars.begin(), all_vars.end(), *name) == all_vars.end()) {
                throw ModelError("guard references unknown variable " + *name);
            }
        }
    }
}

}  // namespace hlmrf
