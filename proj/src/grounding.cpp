#include "hlmrf/grounding.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "hlmrf/errors.hpp"

namespace hlmrf {

namespace {

std::string describe(const Predicate& pred, const ConstantTuple& args) {
    std::string out = pred.name + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ",";
        out += args[i];
    }
    return out + ")";
}

const std::vector<std::size_t> kNoAtoms;

}  // namespace

Database::Database(std::vector<Predicate> predicates, std::vector<ObservedAtom> observed,
                   std::vector<GroundAtom> targets)
    : predicates_(std::move(predicates)), atoms_(predicates_.size()) {
    for (std::size_t p = 0; p < predicates_.size(); ++p) {
        if (predicates_[p].arity == 0) throw DataError("predicate " + predicates_[p].name + " has arity 0");
        for (std::size_t r = 0; r < p; ++r) {
            if (predicates_[r].name == predicates_[p].name) {
                throw DataError("predicate " + predicates_[p].name + " declared twice");
            }
        }
    }
    auto check_atom = [&](const GroundAtom& atom) {
        if (atom.predicate >= predicates_.size()) throw DataError("atom references unknown predicate");
        const auto& pred = predicates_[atom.predicate];
        if (atom.arguments.size() != pred.arity) {
            throw DataError("atom " + describe(pred, atom.arguments) + " has arity " +
                            std::to_string(atom.arguments.size()) + "; " + pred.name + " expects " +
                            std::to_string(pred.arity));
        }
    };

    for (auto& obs : observed) {
        check_atom(obs.atom);
        if (!(obs.value >= 0.0 && obs.value <= 1.0)) {
            throw DataError("value of " + describe(predicates_[obs.atom.predicate], obs.atom.arguments) +
                            " is outside [0, 1]");
        }
        atoms_[obs.atom.predicate].push_back({std::move(obs.atom.arguments), Lookup{false, obs.value, 0}});
    }
    for (const auto& target : targets) {
        check_atom(target);
        if (predicates_[target.predicate].role != PredicateRole::Target) {
            throw DataError("target declared for observed predicate " + predicates_[target.predicate].name);
        }
    }
    std::sort(targets.begin(), targets.end());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (i > 0 && targets[i] == targets[i - 1]) {
            throw DataError("duplicate target " + describe(predicates_[targets[i].predicate], targets[i].arguments));
        }
        atoms_[targets[i].predicate].push_back({targets[i].arguments, Lookup{true, 0.0, i}});
    }
    targets_ = std::move(targets);

    universes_.resize(predicates_.size());
    joinable_all_.resize(predicates_.size());
    joinable_index_.resize(predicates_.size());
    for (std::size_t p = 0; p < predicates_.size(); ++p) {
        auto& list = atoms_[p];
        std::stable_sort(list.begin(), list.end(),
                         [](const ListedAtom& a, const ListedAtom& b) { return a.arguments < b.arguments; });
        for (std::size_t i = 1; i < list.size(); ++i) {
            if (list[i].arguments == list[i - 1].arguments) {
                const bool overlap = list[i].state.is_target != list[i - 1].state.is_target;
                throw DataError(std::string(overlap ? "atom is both observed and a target: " : "duplicate atom ") +
                                describe(predicates_[p], list[i].arguments));
            }
        }
        const auto arity = predicates_[p].arity;
        universes_[p].resize(arity);
        joinable_index_[p].resize(arity);
        for (std::size_t i = 0; i < list.size(); ++i) {
            for (std::size_t pos = 0; pos < arity; ++pos) universes_[p][pos].insert(list[i].arguments[pos]);
            if (list[i].state.is_target || list[i].state.value > 0.0) {
                joinable_all_[p].push_back(i);
                for (std::size_t pos = 0; pos < arity; ++pos) {
                    joinable_index_[p][pos][list[i].arguments[pos]].push_back(i);
                }
            }
        }
    }
}

std::optional<std::size_t> Database::find_predicate(const std::string& name) const {
    for (std::size_t p = 0; p < predicates_.size(); ++p) {
        if (predicates_[p].name == name) return p;
    }
    return std::nullopt;
}

Database::Lookup Database::lookup(std::size_t predicate, const ConstantTuple& arguments) const {
    const auto& list = atoms_.at(predicate);
    auto it = std::lower_bound(list.begin(), list.end(), arguments,
                               [](const ListedAtom& a, const ConstantTuple& key) { return a.arguments < key; });
    if (it != list.end() && it->arguments == arguments) return it->state;
    return Lookup{};
}

const std::set<std::string>& Database::universe(std::size_t predicate, std::size_t position) const {
    return universes_.at(predicate).at(position);
}

const std::vector<std::size_t>& Database::joinable(std::size_t predicate, std::size_t position,
                                                   const std::string& constant) const {
    const auto& index = joinable_index_.at(predicate).at(position);
    auto it = index.find(constant);
    return it == index.end() ? kNoAtoms : it->second;
}

// ---------------------------------------------------------------------------
// File loading

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> fields;
    if (line.find('\t') != std::string::npos) {
        std::size_t start = 0;
        while (true) {
            const auto tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
    } else {
        std::istringstream in(line);
        for (std::string field; in >> field;) fields.push_back(field);
    }
    return fields;
}

std::string strip(const std::string& s) {
    const auto first = s.find_first_not_of(" \r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \r\n");
    return s.substr(first, last - first + 1);
}

double parse_value(const std::string& text, const std::filesystem::path& file, std::size_t line_no) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw DataError(file.string() + ":" + std::to_string(line_no) + ": cannot parse value '" + text + "'");
    }
    return value;
}

template <typename Fn>
void for_each_row(const std::filesystem::path& file, Fn&& fn) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open " + file.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip(line);
        if (line.empty() || line.front() == '#') continue;
        auto fields = split_row(line);
        for (auto& f : fields) f = strip(f);
        fn(fields, line_no);
    }
}

std::vector<ObservedAtom> read_predicate_file(const Predicate& pred, std::size_t index,
                                              const std::filesystem::path& file) {
    std::vector<ObservedAtom> rows;
    for_each_row(file, [&](const std::vector<std::string>& fields, std::size_t line_no) {
        if (fields.size() != pred.arity && fields.size() != pred.arity + 1) {
            throw DataError(file.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(pred.arity) + " arguments and an optional value, got " +
                            std::to_string(fields.size()) + " columns");
        }
        ObservedAtom obs;
        obs.atom.predicate = index;
        obs.atom.arguments.assign(fields.begin(), fields.begin() + static_cast<std::ptrdiff_t>(pred.arity));
        obs.value = fields.size() > pred.arity ? parse_value(fields.back(), file, line_no) : 1.0;
        if (!(obs.value >= 0.0 && obs.value <= 1.0)) {
            throw DataError(file.string() + ":" + std::to_string(line_no) + ": value " + fields.back() +
                            " is outside [0, 1]");
        }
        rows.push_back(std::move(obs));
    });
    return rows;
}

}  // namespace

Database load_database(const std::vector<Predicate>& predicates, const std::filesystem::path& directory) {
    std::vector<ObservedAtom> observed;
    for (std::size_t p = 0; p < predicates.size(); ++p) {
        const auto file = directory / (predicates[p].name + ".tsv");
        if (!std::filesystem::exists(file)) continue;
        auto rows = read_predicate_file(predicates[p], p, file);
        observed.insert(observed.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
    }

    std::vector<GroundAtom> targets;
    const auto target_file = directory / "targets.tsv";
    if (std::filesystem::exists(target_file)) {
        for_each_row(target_file, [&](const std::vector<std::string>& fields, std::size_t line_no) {
            std::optional<std::size_t> index;
            for (std::size_t p = 0; p < predicates.size(); ++p) {
                if (predicates[p].name == fields[0]) index = p;
            }
            if (!index) {
                throw DataError(target_file.string() + ":" + std::to_string(line_no) + ": unknown predicate " +
                                fields[0]);
            }
            if (fields.size() - 1 != predicates[*index].arity) {
                throw DataError(target_file.string() + ":" + std::to_string(line_no) + ": arity mismatch for " +
                                fields[0]);
            }
            targets.push_back(GroundAtom{*index, ConstantTuple(fields.begin() + 1, fields.end())});
        });
    }
    return Database(predicates, std::move(observed), std::move(targets));
}

Assignment load_truth(const Database& db, const std::filesystem::path& directory) {
    Assignment truth(db.num_targets(), 0.0);
    for (std::size_t p = 0; p < db.predicates().size(); ++p) {
        const auto& pred = db.predicates()[p];
        const auto file = directory / (pred.name + ".tsv");
        if (pred.role != PredicateRole::Target || !std::filesystem::exists(file)) continue;
        for (const auto& row : read_predicate_file(pred, p, file)) {
            const auto hit = db.lookup(p, row.atom.arguments);
            if (hit.is_target) truth[hit.variable] = row.value;
        }
    }
    return truth;
}

// ---------------------------------------------------------------------------
// Grounding

namespace {

struct ArgRef {
    bool is_variable = false;
    std::size_t variable = 0;
    std::string constant;
};

struct LiteralPlan {
    std::size_t predicate = 0;
    bool negated = false;
    std::vector<ArgRef> args;
};

class RuleGrounder {
public:
    RuleGrounder(const RuleTemplate& rule, const Database& db) : rule_(rule), db_(db) {
        names_ = rule_variables(rule);
        auto plan_literal = [&](const Literal& lit) {
            if (lit.predicate >= db.predicates().size()) throw ModelError("rule references unknown predicate");
            if (lit.arguments.size() != db.predicates()[lit.predicate].arity) {
                throw ModelError("literal of " + db.predicates()[lit.predicate].name + " has wrong arity");
            }
            LiteralPlan plan{lit.predicate, lit.negated, {}};
            for (const auto& arg : lit.arguments) {
                if (const auto* var = std::get_if<LogicVariable>(&arg)) {
                    plan.args.push_back({true, variable_index(var->name), {}});
                } else {
                    plan.args.push_back({false, 0, std::get<LogicConstant>(arg).value});
                }
            }
            return plan;
        };
        for (const auto& lit : rule.body) body_.push_back(plan_literal(lit));
        for (const auto& lit : rule.head) head_.push_back(plan_literal(lit));
        for (const auto& g : rule.guards) guards_.emplace_back(variable_index(g.left), variable_index(g.right));

        // Join order: positive body literals, greedily preferring the one
        // with the most variables already bound.
        std::vector<bool> bound(names_.size(), false);
        std::vector<std::size_t> pending;
        for (std::size_t i = 0; i < body_.size(); ++i) {
            if (!body_[i].negated) pending.push_back(i);
        }
        while (!pending.empty()) {
            std::size_t best = 0;
            long best_score = -1;
            for (std::size_t k = 0; k < pending.size(); ++k) {
                long score = 0;
                for (const auto& a : body_[pending[k]].args) score += (!a.is_variable || bound[a.variable]) ? 1 : 0;
                if (score > best_score) {
                    best_score = score;
                    best = k;
                }
            }
            join_order_.push_back(pending[best]);
            for (const auto& a : body_[pending[best]].args) {
                if (a.is_variable) bound[a.variable] = true;
            }
            pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best));
        }
        // Anything still unbound ranges over the constants seen at its first
        // argument position.
        auto visit_free = [&](const std::vector<LiteralPlan>& lits) {
            for (const auto& lit : lits) {
                for (std::size_t pos = 0; pos < lit.args.size(); ++pos) {
                    const auto& a = lit.args[pos];
                    if (a.is_variable && !bound[a.variable]) {
                        bound[a.variable] = true;
                        free_vars_.push_back({a.variable, &db.universe(lit.predicate, pos)});
                    }
                }
            }
        };
        visit_free(body_);
        visit_free(head_);
    }

    std::vector<std::vector<std::string>> substitutions() {
        binding_.assign(names_.size(), nullptr);
        results_.clear();
        join(0);
        std::sort(results_.begin(), results_.end());
        return std::move(results_);
    }

    GroundRule instantiate(const std::vector<std::string>& subst) const {
        GroundRule ground;
        auto build = [&](const std::vector<LiteralPlan>& lits, std::vector<GroundLiteral>& out) {
            for (const auto& lit : lits) {
                ConstantTuple args;
                args.reserve(lit.args.size());
                for (const auto& a : lit.args) args.push_back(a.is_variable ? subst[a.variable] : a.constant);
                const auto hit = db_.lookup(lit.predicate, args);
                out.push_back(hit.is_target ? GroundLiteral::free(hit.variable, lit.negated)
                                            : GroundLiteral::observed(hit.value, lit.negated));
            }
        };
        build(body_, ground.body);
        build(head_, ground.head);
        return ground;
    }

private:
    std::size_t variable_index(const std::string& name) const {
        return static_cast<std::size_t>(std::find(names_.begin(), names_.end(), name) - names_.begin());
    }

    const std::string* resolve(const ArgRef& a) const { return a.is_variable ? binding_[a.variable] : &a.constant; }

    void join(std::size_t depth) {
        if (depth == join_order_.size()) {
            enumerate_free(0);
            return;
        }
        const auto& lit = body_[join_order_[depth]];
        const std::vector<std::size_t>* candidates = &db_.joinable(lit.predicate);
        for (std::size_t pos = 0; pos < lit.args.size(); ++pos) {
            if (const auto* c = resolve(lit.args[pos])) {
                const auto& narrowed = db_.joinable(lit.predicate, pos, *c);
                if (narrowed.size() < candidates->size()) candidates = &narrowed;
            }
        }
        const auto& atoms = db_.atoms(lit.predicate);
        std::vector<std::size_t> newly_bound;
        for (std::size_t idx : *candidates) {
            const auto& args = atoms[idx].arguments;
            bool match = true;
            newly_bound.clear();
            for (std::size_t pos = 0; pos < args.size() && match; ++pos) {
                const auto& a = lit.args[pos];
                if (const auto* c = resolve(a)) {
                    match = *c == args[pos];
                } else {
                    binding_[a.variable] = &args[pos];
                    newly_bound.push_back(a.variable);
                }
            }
            if (match) join(depth + 1);
            for (auto v : newly_bound) binding_[v] = nullptr;
        }
    }

    void enumerate_free(std::size_t k) {
        if (k == free_vars_.size()) {
            for (const auto& [a, b] : guards_) {
                if (*binding_[a] == *binding_[b]) return;
            }
            std::vector<std::string> subst;
            subst.reserve(binding_.size());
            for (const auto* c : binding_) subst.push_back(*c);
            results_.push_back(std::move(subst));
            return;
        }
        const auto [var, universe] = free_vars_[k];
        for (const auto& c : *universe) {
            binding_[var] = &c;
            enumerate_free(k + 1);
        }
        binding_[var] = nullptr;
    }

    const RuleTemplate& rule_;
    const Database& db_;
    std::vector<std::string> names_;
    std::vector<LiteralPlan> body_;
    std::vector<LiteralPlan> head_;
    std::vector<std::pair<std::size_t, std::size_t>> guards_;
    std::vector<std::size_t> join_order_;
    std::vector<std::pair<std::size_t, const std::set<std::string>*>> free_vars_;
    std::vector<const std::string*> binding_;
    std::vector<std::vector<std::string>> results_;
};

}  // namespace

std::vector<HingePotential> ground_templates(const std::vector<RuleTemplate>& templates, const Database& db) {
    std::vector<HingePotential> potentials;
    for (const auto& rule : templates) {
        validate_rule(rule);
        RuleGrounder grounder(rule, db);
        for (const auto& subst : grounder.substitutions()) {
            auto potential = rule_to_hinge(grounder.instantiate(subst), rule.exponent, rule.template_index);
            // Identically zero on the box: nothing to ground.
            if (potential.ell.max_over_box() <= 0.0) continue;
            potentials.push_back(std::move(potential));
        }
    }
    return potentials;
}

namespace {

struct Block {
    std::vector<std::size_t> variables;
    double observed_sum = 0.0;
};

std::vector<Block> build_blocks(const ConstraintSpec& spec, const Database& db) {
    if (spec.predicate >= db.predicates().size()) throw ModelError("constraint references unknown predicate");
    const auto& pred = db.predicates()[spec.predicate];
    if (pred.role != PredicateRole::Target) {
        throw ModelError("functional constraint on observed predicate " + pred.name);
    }
    if (spec.summed.size() != pred.arity) throw ModelError("functional constraint arity mismatch for " + pred.name);
    if (std::none_of(spec.summed.begin(), spec.summed.end(), [](bool b) { return b; })) {
        throw ModelError("functional constraint on " + pred.name + " sums over no argument");
    }

    auto key_of = [&](const ConstantTuple& args) {
        ConstantTuple key;
        for (std::size_t pos = 0; pos < args.size(); ++pos) {
            if (!spec.summed[pos]) key.push_back(args[pos]);
        }
        return key;
    };
    std::vector<std::pair<ConstantTuple, Block>> blocks;
    auto find_block = [&](const ConstantTuple& key) -> Block* {
        auto it = std::lower_bound(blocks.begin(), blocks.end(), key,
                                   [](const auto& entry, const ConstantTuple& k) { return entry.first < k; });
        return (it != blocks.end() && it->first == key) ? &it->second : nullptr;
    };
    for (const auto& atom : db.atoms(spec.predicate)) {
        if (!atom.state.is_target) continue;
        auto key = key_of(atom.arguments);
        if (auto* block = find_block(key)) {
            block->variables.push_back(atom.state.variable);
        } else {
            auto it = std::lower_bound(blocks.begin(), blocks.end(), key,
                                       [](const auto& entry, const ConstantTuple& k) { return entry.first < k; });
            blocks.insert(it, {key, Block{{atom.state.variable}, 0.0}});
        }
    }
    if (blocks.empty()) throw ModelError("functional constraint on " + pred.name + " covers no target atoms");
    for (const auto& atom : db.atoms(spec.predicate)) {
        if (atom.state.is_target) continue;
        if (auto* block = find_block(key_of(atom.arguments))) block->observed_sum += atom.state.value;
    }
    std::vector<Block> out;
    out.reserve(blocks.size());
    for (auto& [key, block] : blocks) out.push_back(std::move(block));
    return out;
}

}  // namespace

std::vector<LinearConstraint> ground_constraints(const std::vector<ConstraintSpec>& specs, const Database& db) {
    std::vector<LinearConstraint> constraints;
    for (const auto& spec : specs) {
        for (const auto& block : build_blocks(spec, db)) {
            std::vector<LinearTerm> terms;
            for (auto v : block.variables) terms.push_back({v, 1.0});
            constraints.push_back({LinearFunctional(std::move(terms), block.observed_sum - 1.0),
                                   ConstraintKind::Equality});
        }
    }
    return constraints;
}

std::vector<std::vector<std::size_t>> functional_blocks(const std::vector<ConstraintSpec>& specs,
                                                        const Database& db) {
    std::vector<std::vector<std::size_t>> out;
    for (const auto& spec : specs) {
        for (auto& block : build_blocks(spec, db)) out.push_back(std::move(block.variables));
    }
    return out;
}

GroundModel ground_model(const std::vector<RuleTemplate>& templates, const std::vector<ConstraintSpec>& specs,
                         const Database& db, std::size_t template_count) {
    return GroundModel(db.num_targets(), ground_templates(templates, db), ground_constraints(specs, db),
                       template_count);
}

}  // namespace hlmrf
