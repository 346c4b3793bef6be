#pragma once

// Lukasiewicz soft logic and the rule -> hinge conversion.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hlmrf/model.hpp"

namespace hlmrf {

/// max{sum - (n - 1), 0}; 1 for an empty list.
double luk_conjunction(std::span<const double> values);

/// min{sum, 1}; 0 for an empty list.
double luk_disjunction(std::span<const double> values);

// ---------------------------------------------------------------------------
// Ground rules

/// A ground atom occurrence inside a rule: either an observed constant or a
/// free variable, possibly negated.
struct GroundLiteral {
    struct Observed {
        double value = 0.0;
    };
    struct Free {
        std::size_t variable = 0;
    };

    std::variant<Observed, Free> atom;
    bool negated = false;

    static GroundLiteral observed(double value, bool negated = false) { return {Observed{value}, negated}; }
    static GroundLiteral free(std::size_t variable, bool negated = false) { return {Free{variable}, negated}; }

    /// Truth value of the literal (negation applied).
    double value(std::span<const double> assignment) const;
};

/// body_1 & ... & body_k -> head_1 | ... | head_l
struct GroundRule {
    std::vector<GroundLiteral> body;
    std::vector<GroundLiteral> head;
};

/// min{1, 1 - T(body) + T(head)} with Lukasiewicz T.
double rule_truth(const GroundRule& rule, std::span<const double> assignment);

/// Affine distance to satisfaction:
///     ell = sum(body) - (|body| - 1) - sum(head)
/// with each literal folded linearly (~x -> 1 - x) and observed atoms moved
/// into the constant.  Exact at Boolean corners, a lower bound elsewhere.
HingePotential rule_to_hinge(const GroundRule& rule, int exponent, std::size_t template_index = 0);

// ---------------------------------------------------------------------------
// First-order rule templates

struct LogicVariable {
    std::string name;
    friend bool operator==(const LogicVariable&, const LogicVariable&) = default;
};

struct LogicConstant {
    std::string value;
    friend bool operator==(const LogicConstant&, const LogicConstant&) = default;
};

using LogicTerm = std::variant<LogicVariable, LogicConstant>;

struct Literal {
    std::size_t predicate = 0;
    std::vector<LogicTerm> arguments;
    bool negated = false;

    friend bool operator==(const Literal&, const Literal&) = default;
};

/// `A != B` guard between two logic variables.
struct InequalityGuard {
    std::string left;
    std::string right;

    friend bool operator==(const InequalityGuard&, const InequalityGuard&) = default;
};

struct RuleTemplate {
    std::vector<Literal> body;
    std::vector<Literal> head;
    std::vector<InequalityGuard> guards;
    std::size_t template_index = 0;
    int exponent = 1;
    /// Fixed weight, or nullopt for a learnable template.
    std::optional<double> weight;

    friend bool operator==(const RuleTemplate&, const RuleTemplate&) = default;
};

/// Names of the logic variables in order of first appearance (body, then head).
std::vector<std::string> rule_variables(const RuleTemplate& rule);

/// Throws ModelError unless the rule is well formed: at least one literal,
/// exponent in {1, 2}, guards over variables of the rule, and every head
/// variable bound by the body.  Rules with an empty body (priors) are exempt
/// from the last condition.
void validate_rule(const RuleTemplate& rule);

}  // namespace hlmrf
