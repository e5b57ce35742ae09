#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fatpipe {

enum class VarKind { binary, integer, continuous };
enum class Sense { less_equal, equal };

struct Variable {
    std::string name;
    VarKind kind = VarKind::binary;
    double lower = 0.0;
    double upper = 1.0;
};

struct Term {
    std::size_t var = 0;
    double coef = 0.0;
};

struct LinearConstraint {
    std::string name;
    std::vector<Term> terms;
    Sense sense = Sense::less_equal;
    double rhs = 0.0;
};

struct ConstraintViolation {
    std::size_t constraint = 0;
    double activity = 0.0;
    double rhs = 0.0;
    /// activity - rhs for <=, |activity - rhs| for =; positive means violated.
    double amount = 0.0;
};

/// Bounded integer linear program, always a minimization.
///
/// Coefficients are interpreted on a fixed-point grid of 1 / coefficient_scale
/// (default 1e-3); the exact solver rounds them to that grid and works in scaled
/// integers.
class IlpProblem {
public:
    std::size_t add_binary(std::string name);
    std::size_t add_integer(std::string name, long lower, long upper);
    std::size_t add_continuous(std::string name, double lower, double upper);

    void add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs);
    void set_objective(std::vector<Term> terms);

    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<LinearConstraint>& constraints() const { return constraints_; }
    const std::vector<Term>& objective() const { return objective_; }
    std::size_t variable_count() const { return variables_.size(); }

    double coefficient_scale() const { return scale_; }
    void set_coefficient_scale(double scale) { scale_ = scale; }

    /// Throws ConfigurationError on dangling variable references, empty or
    /// inverted bounds, non-integral integer bounds, non-finite data.
    void validate() const;

    double evaluate_objective(std::span<const double> values) const;
    double activity(const LinearConstraint& c, std::span<const double> values) const;
    /// Constraints violated by more than tol (absolute), plus bound violations
    /// reported with constraint index == constraint_count() + variable index.
    std::vector<ConstraintViolation> violations(std::span<const double> values,
                                                double tol = 1e-9) const;

    /// Human-readable LP-style dump (objective, constraints, bounds, variable kinds).
    std::string to_lp_text() const;

private:
    std::vector<Variable> variables_;
    std::vector<LinearConstraint> constraints_;
    std::vector<Term> objective_;
    double scale_ = 1000.0;
};

struct Assignment {
    std::vector<double> values;
    double objective = 0.0;
};

}  // namespace fatpipe
