#include "hlmrf/admm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hlmrf/errors.hpp"

namespace hlmrf {

void AdmmConfig::validate() const {
    if (!(rho > 0.0)) throw std::invalid_argument("ADMM rho must be positive");
    if (!(primal_tolerance > 0.0) || !(dual_tolerance > 0.0)) {
        throw std::invalid_argument("ADMM tolerances must be positive");
    }
}

namespace {

// Flattened view of all subproblems.  copy_variable[k] is the variable that
// copy k shadows; coefficient[k] its coefficient in the owning functional.
struct Layout {
    std::vector<std::size_t> offsets;
    std::vector<std::size_t> copy_variable;
    std::vector<double> coefficient;
    std::vector<double> constant;
    std::vector<double> squared_norm;
    std::vector<std::size_t> copies_per_variable;

    explicit Layout(const GroundModel& model) {
        const auto m = model.potentials().size();
        const auto r = model.constraints().size();
        offsets.reserve(m + r + 1);
        offsets.push_back(0);
        auto add = [&](const LinearFunctional& f) {
            for (const auto& t : f.terms()) {
                copy_variable.push_back(t.variable);
                coefficient.push_back(t.coefficient);
            }
            constant.push_back(f.constant());
            squared_norm.push_back(f.squared_coefficient_norm());
            offsets.push_back(copy_variable.size());
        };
        for (const auto& p : model.potentials()) add(p.ell);
        for (const auto& c : model.constraints()) add(c.func);
        copies_per_variable.assign(model.num_variables(), 0);
        for (auto v : copy_variable) ++copies_per_variable[v];
    }
};

// In-place prox on y[0..n): on entry y holds the prox center z.
void prox_in_place(double* y, const double* c, std::size_t n, double c0, double norm2, int exponent, double weight,
                   double rho) {
    if (weight <= 0.0 || norm2 == 0.0) return;
    double ell = c0;
    for (std::size_t t = 0; t < n; ++t) ell += c[t] * y[t];
    if (ell <= 0.0) return;
    if (exponent == 1) {
        const double step = weight / rho;
        if (ell - step * norm2 >= 0.0) {
            for (std::size_t t = 0; t < n; ++t) y[t] -= step * c[t];
        } else {
            // Minimizer lies on the kink ell = 0.
            const double scale = ell / norm2;
            for (std::size_t t = 0; t < n; ++t) y[t] -= scale * c[t];
        }
    } else {
        const double scale = 2.0 * weight * ell / (rho + 2.0 * weight * norm2);
        for (std::size_t t = 0; t < n; ++t) y[t] -= scale * c[t];
    }
}

// In-place projection for constraints with a nonzero coefficient vector.
void project_in_place(double* y, const double* c, std::size_t n, double c0, double norm2, ConstraintKind kind) {
    double value = c0;
    for (std::size_t t = 0; t < n; ++t) value += c[t] * y[t];
    if (kind == ConstraintKind::Inequality && value >= 0.0) return;
    const double scale = value / norm2;
    for (std::size_t t = 0; t < n; ++t) y[t] -= scale * c[t];
}

void check_constant_constraint(const LinearConstraint& constraint) {
    const double c0 = constraint.func.constant();
    const bool violated = constraint.kind == ConstraintKind::Equality ? c0 != 0.0 : c0 < 0.0;
    if (violated) throw InfeasibleError("constant constraint is violated (constant " + std::to_string(c0) + ")");
}

void consensus_update(const Layout& layout, ConsensusState& state, double rho, std::span<const double> bias) {
    auto& y = state.consensus;
    std::vector<double> sums(y.size(), 0.0);
    for (std::size_t k = 0; k < layout.copy_variable.size(); ++k) {
        sums[layout.copy_variable[k]] += state.copies[k] + state.multipliers[k] / rho;
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double b = bias.empty() ? 0.0 : bias[i];
        const auto count = layout.copies_per_variable[i];
        if (count == 0) {
            if (b > 0.0) y[i] = 0.0;
            else if (b < 0.0) y[i] = 1.0;
            continue;
        }
        y[i] = std::clamp((sums[i] - b / rho) / static_cast<double>(count), 0.0, 1.0);
    }
}

Residuals residuals(const Layout& layout, const ConsensusState& state, std::span<const double> previous,
                    double rho) {
    const auto n_copies = layout.copy_variable.size();
    if (n_copies == 0) return {};
    double primal = 0.0;
    double dual = 0.0;
    for (std::size_t k = 0; k < n_copies; ++k) {
        const auto v = layout.copy_variable[k];
        const double gap = state.copies[k] - state.consensus[v];
        const double move = state.consensus[v] - previous[v];
        primal += gap * gap;
        dual += move * move;
    }
    const double norm = std::sqrt(static_cast<double>(n_copies));
    return {std::sqrt(primal) / norm, rho * std::sqrt(dual) / norm};
}

}  // namespace

ConsensusState ConsensusState::initial(const GroundModel& model) {
    const Layout layout(model);
    ConsensusState state;
    state.consensus.assign(model.num_variables(), 0.5);
    state.copies.assign(layout.copy_variable.size(), 0.5);
    state.multipliers.assign(layout.copy_variable.size(), 0.0);
    state.offsets = layout.offsets;
    return state;
}

bool ConsensusState::matches(const GroundModel& model) const {
    if (consensus.size() != model.num_variables()) return false;
    const Layout layout(model);
    return offsets == layout.offsets && copies.size() == layout.copy_variable.size() &&
           multipliers.size() == copies.size();
}

std::vector<double> prox_potential(const HingePotential& potential, double weight, std::span<const double> z,
                                   double rho) {
    const auto& terms = potential.ell.terms();
    if (z.size() != terms.size()) throw StructuralError("prox center length does not match the potential");
    if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
    std::vector<double> y(z.begin(), z.end());
    std::vector<double> c;
    c.reserve(terms.size());
    for (const auto& t : terms) c.push_back(t.coefficient);
    prox_in_place(y.data(), c.data(), y.size(), potential.ell.constant(), potential.ell.squared_coefficient_norm(),
                  potential.exponent, weight, rho);
    return y;
}

std::vector<double> project_constraint(const LinearConstraint& constraint, std::span<const double> z) {
    const auto& terms = constraint.func.terms();
    if (z.size() != terms.size()) throw StructuralError("projection input length does not match the constraint");
    std::vector<double> y(z.begin(), z.end());
    const double norm2 = constraint.func.squared_coefficient_norm();
    if (norm2 == 0.0) {
        check_constant_constraint(constraint);
        return y;
    }
    std::vector<double> c;
    c.reserve(terms.size());
    for (const auto& t : terms) c.push_back(t.coefficient);
    project_in_place(y.data(), c.data(), y.size(), constraint.func.constant(), norm2, constraint.kind);
    return y;
}

void consensus_step(const GroundModel& model, ConsensusState& state, double rho, std::span<const double> linear_bias) {
    if (!state.matches(model)) throw StructuralError("consensus state does not match the model");
    consensus_update(Layout(model), state, rho, linear_bias);
}

Residuals compute_residuals(const GroundModel& model, const ConsensusState& state,
                            std::span<const double> previous_consensus, double rho) {
    if (!state.matches(model) || previous_consensus.size() != model.num_variables()) {
        throw StructuralError("consensus state does not match the model");
    }
    return residuals(Layout(model), state, previous_consensus, rho);
}

InferenceResult mpe_infer(const GroundModel& model, const TemplateWeights& weights, const AdmmConfig& config,
                          const ConsensusState* warm_start, std::span<const double> linear_bias) {
    config.validate();
    if (weights.size() != model.template_count()) {
        throw StructuralError("weight vector has " + std::to_string(weights.size()) + " entries for " +
                              std::to_string(model.template_count()) + " templates");
    }
    if (!linear_bias.empty() && linear_bias.size() != model.num_variables()) {
        throw StructuralError("linear bias length does not match the model");
    }
    for (const auto& c : model.constraints()) {
        if (c.func.squared_coefficient_norm() == 0.0) check_constant_constraint(c);
    }

    const Layout layout(model);
    ConsensusState state;
    if (warm_start) {
        if (!warm_start->matches(model)) throw StructuralError("warm-start state does not match the model");
        state = *warm_start;
        for (auto& v : state.consensus) v = std::clamp(v, 0.0, 1.0);
    } else {
        state = ConsensusState::initial(model);
    }

    const auto m = model.potentials().size();
    const auto r = model.constraints().size();
    const double rho = config.rho;
    std::vector<double> potential_weight(m);
    std::vector<int> exponent(m);
    for (std::size_t j = 0; j < m; ++j) {
        potential_weight[j] = weights[model.potentials()[j].template_index];
        exponent[j] = model.potentials()[j].exponent;
    }
    std::vector<ConstraintKind> kind(r);
    for (std::size_t k = 0; k < r; ++k) kind[k] = model.constraints()[k].kind;

    double* copies = state.copies.data();
    double* alpha = state.multipliers.data();
    const double* consensus = state.consensus.data();

    // alpha += rho (y - Y);  y = Y - alpha / rho
    auto refresh = [&](std::size_t i) {
        for (std::size_t k = layout.offsets[i]; k < layout.offsets[i + 1]; ++k) {
            const double target = consensus[layout.copy_variable[k]];
            alpha[k] += rho * (copies[k] - target);
            copies[k] = target - alpha[k] / rho;
        }
    };
    auto solve_potential = [&](std::size_t j) {
        refresh(j);
        const auto begin = layout.offsets[j];
        prox_in_place(copies + begin, layout.coefficient.data() + begin, layout.offsets[j + 1] - begin,
                      layout.constant[j], layout.squared_norm[j], exponent[j], potential_weight[j], rho);
    };
    auto solve_constraint = [&](std::size_t k) {
        const auto i = m + k;
        refresh(i);
        if (layout.squared_norm[i] == 0.0) return;
        const auto begin = layout.offsets[i];
        project_in_place(copies + begin, layout.coefficient.data() + begin, layout.offsets[i + 1] - begin,
                         layout.constant[i], layout.squared_norm[i], kind[k]);
    };

    const bool parallel = !config.deterministic && (m + r) >= 2048;
    InferenceDiagnostics diag;
    std::vector<double> previous(model.num_variables());
    for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
        std::copy(state.consensus.begin(), state.consensus.end(), previous.begin());
        const auto mi = static_cast<std::ptrdiff_t>(m);
        const auto ri = static_cast<std::ptrdiff_t>(r);
#pragma omp parallel for schedule(static) if (parallel)
        for (std::ptrdiff_t j = 0; j < mi; ++j) solve_potential(static_cast<std::size_t>(j));
#pragma omp parallel for schedule(static) if (parallel)
        for (std::ptrdiff_t k = 0; k < ri; ++k) solve_constraint(static_cast<std::size_t>(k));
        consensus_update(layout, state, rho, linear_bias);

        const auto res = residuals(layout, state, previous, rho);
        diag.iterations = iter + 1;
        diag.primal_residual = res.primal;
        diag.dual_residual = res.dual;
        if (res.primal <= config.primal_tolerance && res.dual <= config.dual_tolerance &&
            max_constraint_violation(model, state.consensus) <= config.primal_tolerance) {
            diag.converged = true;
            break;
        }
    }
    diag.energy = evaluate_energy(model, weights, state.consensus);
    Assignment assignment = state.consensus;
    return {std::move(assignment), std::move(state), diag};
}

}  // namespace hlmrf
