#pragma once

// Relational data and the instantiation of rule templates over it.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "hlmrf/logic.hpp"
#include "hlmrf/model.hpp"

namespace hlmrf {

enum class PredicateRole { Observed, Target };

struct Predicate {
    std::string name;
    std::size_t arity = 1;
    PredicateRole role = PredicateRole::Observed;

    friend bool operator==(const Predicate&, const Predicate&) = default;
};

using ConstantTuple = std::vector<std::string>;

struct GroundAtom {
    std::size_t predicate = 0;
    ConstantTuple arguments;

    friend auto operator<=>(const GroundAtom&, const GroundAtom&) = default;
};

struct ObservedAtom {
    GroundAtom atom;
    double value = 1.0;
};

/// Observed atoms under the closed-world assumption plus the target atoms
/// that become free variables.  Immutable once built.
class Database {
public:
    struct Lookup {
        bool is_target = false;
        double value = 0.0;          ///< observed value (0 for unlisted atoms)
        std::size_t variable = 0;    ///< free-variable index when is_target
    };

    Database() = default;

    /// Throws DataError on arity mismatches, values outside [0,1], duplicate
    /// atoms, overlap between observed and target atoms, and targets of
    /// observed-role predicates.  Target atoms are numbered in (predicate,
    /// arguments) order regardless of input order.
    Database(std::vector<Predicate> predicates, std::vector<ObservedAtom> observed, std::vector<GroundAtom> targets);

    const std::vector<Predicate>& predicates() const noexcept { return predicates_; }
    std::optional<std::size_t> find_predicate(const std::string& name) const;

    std::size_t num_targets() const noexcept { return targets_.size(); }
    const GroundAtom& target_atom(std::size_t variable) const { return targets_.at(variable); }
    const std::vector<GroundAtom>& target_atoms() const noexcept { return targets_; }

    Lookup lookup(std::size_t predicate, const ConstantTuple& arguments) const;

    struct ListedAtom {
        ConstantTuple arguments;
        Lookup state;
    };

    /// Listed atoms (observed or target) of one predicate, sorted by arguments.
    const std::vector<ListedAtom>& atoms(std::size_t predicate) const { return atoms_.at(predicate); }

    /// Constants seen at argument `position` of `predicate`, sorted.
    const std::set<std::string>& universe(std::size_t predicate, std::size_t position) const;

    /// Positions in atoms(predicate) of the atoms that can make a positive
    /// body literal nonzero (targets and observed atoms with value > 0).
    const std::vector<std::size_t>& joinable(std::size_t predicate) const { return joinable_all_.at(predicate); }

    /// As above, restricted to atoms whose argument `position` is `constant`.
    const std::vector<std::size_t>& joinable(std::size_t predicate, std::size_t position,
                                             const std::string& constant) const;

private:
    std::vector<Predicate> predicates_;
    std::vector<std::vector<ListedAtom>> atoms_;
    std::vector<GroundAtom> targets_;
    std::vector<std::vector<std::set<std::string>>> universes_;
    std::vector<std::vector<std::size_t>> joinable_all_;
    std::vector<std::vector<std::unordered_map<std::string, std::vector<std::size_t>>>> joinable_index_;
};

/// Functional constraint: for each assignment of the non-summed argument
/// positions, the target atoms (plus listed observed atoms) sum to one.
struct ConstraintSpec {
    std::size_t predicate = 0;
    std::vector<bool> summed;  ///< one flag per argument position

    friend bool operator==(const ConstraintSpec&, const ConstraintSpec&) = default;
};

/// Reads `<name>.tsv` for every predicate (missing file = no rows) and
/// `targets.tsv` from `directory`.
Database load_database(const std::vector<Predicate>& predicates, const std::filesystem::path& directory);

/// Values for every target atom read from predicate TSVs under `directory`;
/// target atoms not listed default to 0.  Rows for atoms that are not targets
/// are ignored.
Assignment load_truth(const Database& db, const std::filesystem::path& directory);

/// One potential per substitution whose ground rule is not identically
/// satisfied on the box.  Order: rule order, then substitutions sorted by
/// constant tuple.  Throws ModelError for rules failing validate_rule.
std::vector<HingePotential> ground_templates(const std::vector<RuleTemplate>& templates, const Database& db);

/// One equality constraint per block of target atoms.  Throws ModelError if
/// the predicate has no target atoms or the flags do not match its arity.
std::vector<LinearConstraint> ground_constraints(const std::vector<ConstraintSpec>& specs, const Database& db);

GroundModel ground_model(const std::vector<RuleTemplate>& templates, const std::vector<ConstraintSpec>& specs,
                         const Database& db, std::size_t template_count);

/// Free-variable blocks of the functional constraints, in constraint order.
std::vector<std::vector<std::size_t>> functional_blocks(const std::vector<ConstraintSpec>& specs, const Database& db);

}  // namespace hlmrf
