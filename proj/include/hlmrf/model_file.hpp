#pragma once

// Line-oriented model language.
//
//   # comment
//   predicate Trusts/2 target
//   predicate Knows/2 observed
//   1.5 squared: Knows(A,B) & Trusts(A,B) & A != B -> Trusts(B,A)
//   learn: Label(A,C) & Cites(A,B) -> Label(B,C) | Other(B)
//   learn squared: -> ~Trusts(A,B)
//   constraint functional: Label(Doc, +Cat)
//
// Identifiers starting with an uppercase letter or underscore are logic
// variables; lowercase identifiers, quoted strings ('x' or "x") and tokens
// starting with a digit are constants.  `~` negates a literal.  Bodies
// are conjunctions, heads are disjunctions.

#include <string>
#include <string_view>
#include <vector>

#include "hlmrf/grounding.hpp"
#include "hlmrf/logic.hpp"
#include "hlmrf/model.hpp"

namespace hlmrf {

struct ModelFile {
    std::vector<Predicate> predicates;
    std::vector<RuleTemplate> templates;
    std::vector<ConstraintSpec> constraints;

    /// learnable()[q] is true when template q has no fixed weight.
    std::vector<bool> learnable() const;

    /// Fixed weights where given, `learnable_default` elsewhere.
    TemplateWeights weights(double learnable_default = 1.0) const;

    friend bool operator==(const ModelFile&, const ModelFile&) = default;
};

/// Throws ParseError (with line and column) on syntax errors, undeclared
/// predicates, arity mismatches, negative fixed weights and unsafe rules.
ModelFile parse_model_file(std::string_view text);

/// Canonical text form; parse_model_file(format_model_file(m)) == m.
std::string format_model_file(const ModelFile& model);

}  // namespace hlmrf
