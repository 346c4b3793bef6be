#pragma once

// Constrained hinge-loss energies over [0,1]^n.
//
// A GroundModel is a list of hinge potentials
//     phi_j(y) = max{ell_j(y), 0}^p_j,   p_j in {1, 2}
// and linear constraints C_k(y) = 0 / C_k(y) >= 0 over n free variables.
// Observed values have already been folded into the constant of every
// functional, so nothing here ever sees them.  Each potential belongs to a
// template; all potentials of a template share the template's weight.

#include <cstddef>
#include <span>
#include <vector>

namespace hlmrf {

using Assignment = std::vector<double>;

struct LinearTerm {
    std::size_t variable = 0;
    double coefficient = 0.0;

    friend bool operator==(const LinearTerm&, const LinearTerm&) = default;
};

/// Sparse affine function  sum_i c_i * y_{v_i} + constant.
class LinearFunctional {
public:
    LinearFunctional() = default;

    /// Repeated variables are merged by summing their coefficients; terms whose
    /// merged coefficient is exactly zero are dropped.  Terms end up sorted by
    /// variable index.
    LinearFunctional(std::vector<LinearTerm> terms, double constant);

    const std::vector<LinearTerm>& terms() const noexcept { return terms_; }
    double constant() const noexcept { return constant_; }
    std::size_t size() const noexcept { return terms_.size(); }

    /// Throws StructuralError if a term indexes past the end of `values`.
    double evaluate(std::span<const double> values) const;

    double squared_coefficient_norm() const noexcept;

    /// Largest index referenced plus one (0 for a constant functional).
    std::size_t required_length() const noexcept;

    /// Supremum of the functional over the unit box.
    double max_over_box() const noexcept;

    friend bool operator==(const LinearFunctional&, const LinearFunctional&) = default;

private:
    std::vector<LinearTerm> terms_;
    double constant_ = 0.0;
};

struct HingePotential {
    LinearFunctional ell;
    int exponent = 1;
    std::size_t template_index = 0;
};

enum class ConstraintKind { Equality, Inequality };

/// Equality: func(y) = 0.  Inequality: func(y) >= 0.
struct LinearConstraint {
    LinearFunctional func;
    ConstraintKind kind = ConstraintKind::Equality;
};

/// One nonnegative weight per template.
class TemplateWeights {
public:
    TemplateWeights() = default;
    explicit TemplateWeights(std::vector<double> values);
    TemplateWeights(std::size_t count, double value);

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t q) const { return values_[q]; }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    std::vector<double> values_;
};

class GroundModel {
public:
    GroundModel() = default;

    /// Validates every variable reference, every exponent and template index,
    /// and builds the template partition.  Throws StructuralError.
    GroundModel(std::size_t num_variables, std::vector<HingePotential> potentials,
                std::vector<LinearConstraint> constraints, std::size_t template_count);

    std::size_t num_variables() const noexcept { return num_variables_; }
    std::size_t template_count() const noexcept { return template_count_; }
    const std::vector<HingePotential>& potentials() const noexcept { return potentials_; }
    const std::vector<LinearConstraint>& constraints() const noexcept { return constraints_; }

    /// Potential indices of template q, in ascending order.
    const std::vector<std::size_t>& template_members(std::size_t q) const { return partition_.at(q); }
    std::size_t grounding_count(std::size_t q) const { return partition_.at(q).size(); }

private:
    std::size_t num_variables_ = 0;
    std::vector<HingePotential> potentials_;
    std::vector<LinearConstraint> constraints_;
    std::size_t template_count_ = 0;
    std::vector<std::vector<std::size_t>> partition_;
};

double evaluate_potential(const HingePotential& potential, std::span<const double> assignment);

/// Per-template sums of potential values, Phi_q(y).
std::vector<double> template_features(const GroundModel& model, std::span<const double> assignment);

/// f(y) = sum_q w_q Phi_q(y).  Computed through template_features so that the
/// two always agree bit for bit.
double evaluate_energy(const GroundModel& model, const TemplateWeights& weights,
                       std::span<const double> assignment);

struct FeasibilityReport {
    bool feasible = true;
    double max_violation = 0.0;
};

/// Largest violation among equality residuals |C_k|, inequality shortfalls
/// max{-C_k, 0} and box excursions.
FeasibilityReport check_feasible(const GroundModel& model, std::span<const double> assignment, double tol);

/// Largest constraint violation only (box ignored).
double max_constraint_violation(const GroundModel& model, std::span<const double> assignment);

}  // namespace hlmrf
