#include "fatpipe/ilp.hpp"

#include <cmath>
#include <sstream>

#include "fatpipe/errors.hpp"

namespace fatpipe {

std::size_t IlpProblem::add_binary(std::string name)
{
    variables_.push_back({std::move(name), VarKind::binary, 0.0, 1.0});
    return variables_.size() - 1;
}

std::size_t IlpProblem::add_integer(std::string name, long lower, long upper)
{
    variables_.push_back(
        {std::move(name), VarKind::integer, static_cast<double>(lower), static_cast<double>(upper)});
    return variables_.size() - 1;
}

std::size_t IlpProblem::add_continuous(std::string name, double lower, double upper)
{
    variables_.push_back({std::move(name), VarKind::continuous, lower, upper});
    return variables_.size() - 1;
}

void IlpProblem::add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs)
{
    constraints_.push_back({std::move(name), std::move(terms), sense, rhs});
}

void IlpProblem::set_objective(std::vector<Term> terms)
{
    objective_ = std::move(terms);
}

void IlpProblem::validate() const
{
    auto fail = [](const std::string& msg) { throw ConfigurationError("ilp: " + msg); };
    if (!(scale_ >= 1.0) || !std::isfinite(scale_)) fail("coefficient scale must be >= 1");
    for (const auto& v : variables_) {
        if (!std::isfinite(v.lower) || !std::isfinite(v.upper)) fail("variable " + v.name + " is unbounded");
        if (v.lower > v.upper) fail("variable " + v.name + " has empty bounds");
        if (v.kind != VarKind::continuous &&
            (v.lower != std::floor(v.lower) || v.upper != std::floor(v.upper)))
            fail("integer variable " + v.name + " has fractional bounds");
        if (v.kind == VarKind::binary && (v.lower < 0.0 || v.upper > 1.0))
            fail("binary variable " + v.name + " has bounds outside [0, 1]");
    }
    auto check_terms = [&](const std::vector<Term>& terms, const std::string& where) {
        for (const auto& t : terms) {
            if (t.var >= variables_.size()) fail(where + " references undeclared variable");
            if (!std::isfinite(t.coef)) fail(where + " has a non-finite coefficient");
        }
    };
    for (const auto& c : constraints_) {
        check_terms(c.terms, "constraint " + c.name);
        if (!std::isfinite(c.rhs)) fail("constraint " + c.name + " has a non-finite rhs");
    }
    check_terms(objective_, "objective");
}

double IlpProblem::evaluate_objective(std::span<const double> values) const
{
    double z = 0.0;
    for (const auto& t : objective_) z += t.coef * values[t.var];
    return z;
}

double IlpProblem::activity(const LinearConstraint& c, std::span<const double> values) const
{
    double a = 0.0;
    for (const auto& t : c.terms) a += t.coef * values[t.var];
    return a;
}

std::vector<ConstraintViolation> IlpProblem::violations(std::span<const double> values, double tol) const
{
    std::vector<ConstraintViolation> out;
    for (std::size_t i = 0; i < constraints_.size(); ++i) {
        const auto& c = constraints_[i];
        const double act = activity(c, values);
        const double amount = c.sense == Sense::equal ? std::abs(act - c.rhs) : act - c.rhs;
        if (amount > tol * (1.0 + std::abs(c.rhs))) out.push_back({i, act, c.rhs, amount});
    }
    for (std::size_t j = 0; j < variables_.size(); ++j) {
        const auto& v = variables_[j];
        const double x = values[j];
        const double below = v.lower - x;
        const double above = x - v.upper;
        if (below > tol) out.push_back({constraints_.size() + j, x, v.lower, below});
        if (above > tol) out.push_back({constraints_.size() + j, x, v.upper, above});
        if (v.kind != VarKind::continuous && std::abs(x - std::round(x)) > tol)
            out.push_back({constraints_.size() + j, x, std::round(x), std::abs(x - std::round(x))});
    }
    return out;
}

namespace {

void write_terms(std::ostringstream& os, const IlpProblem& p, const std::vector<Term>& terms)
{
    if (terms.empty()) {
        os << " 0";
        return;
    }
    for (const auto& t : terms) {
        os << (t.coef < 0 ? " - " : " + ") << std::abs(t.coef) << " " << p.variables()[t.var].name;
    }
}

}  // namespace

std::string IlpProblem::to_lp_text() const
{
    std::ostringstream os;
    os.precision(12);
    os << "\\ coefficient resolution " << 1.0 / scale_ << "\n";
    os << "Minimize\n obj:";
    write_terms(os, *this, objective_);
    os << "\nSubject To\n";
    for (const auto& c : constraints_) {
        os << " " << c.name << ":";
        write_terms(os, *this, c.terms);
        os << (c.sense == Sense::equal ? " = " : " <= ") << c.rhs << "\n";
    }
    os << "Bounds\n";
    for (const auto& v : variables_) os << " " << v.lower << " <= " << v.name << " <= " << v.upper << "\n";
    os << "General\n";
    for (const auto& v : variables_)
        if (v.kind == VarKind::integer) os << " " << v.name << "\n";
    os << "Binary\n";
    for (const auto& v : variables_)
        if (v.kind == VarKind::binary) os << " " << v.name << "\n";
    os << "End\n";
    return os.str();
}

}  // namespace fatpipe
