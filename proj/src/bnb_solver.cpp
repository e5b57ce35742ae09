#include "fatpipe/bnb_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include "fatpipe/errors.hpp"

namespace fatpipe {

namespace {

using Int = std::int64_t;
using Real = long double;

constexpr std::size_t kNone = static_cast<std::size_t>(-1);
constexpr Real kEps = 1e-9L;

struct Entry {
    std::size_t var;
    Int coef;
};

struct GroupPart {
    std::size_t group;
    std::vector<Int> coef;  // aligned with the group's member list, 0 if absent
};

struct Row {
    std::vector<Entry> plain;  // integer variables outside one-hot groups
    std::vector<GroupPart> groups;
    std::vector<Entry> cont;
    bool equality = false;
    Real rhs = 0;
};

struct Link {
    std::size_t w = kNone;
    Real o = 0;       // magnitude of w's coefficient
    Real cost = 0;    // objective coefficient of w
    std::size_t primary = kNone;
};

struct Domain {
    std::vector<Int> lo, hi;
    std::vector<Real> clo, chi;
};

struct Interval {
    Real min = 0;
    Real max = 0;
};

class Solver {
public:
    Solver(const IlpProblem& problem, const SolverOptions& options);
    SolveResult run();

private:
    void build();
    bool is_int(std::size_t v) const { return kinds_[v] != VarKind::continuous; }
    Real tol_for(Real rhs) const { return kEps * (1 + std::fabs(rhs)); }

    // Returns false if the group has no admissible member.
    bool part_range(const GroupPart& part, const Domain& d, Real& mn, Real& mx) const;
    bool row_range(const Row& row, const Domain& d, Interval& out) const;
    bool tighten_row(const Row& row, Domain& d, bool& changed) const;
    bool propagate(Domain& d) const;
    Real lower_bound(const Domain& d) const;
    void search(Domain d);
    void finish_leaf(const Domain& d);

    const IlpProblem& problem_;
    SolverOptions options_;
    Real scale_ = 1000;

    std::vector<VarKind> kinds_;
    std::vector<std::vector<std::size_t>> groups_;
    std::vector<std::size_t> var_group_;
    std::vector<Row> rows_;
    std::vector<Link> links_;            // parallel to rows_
    std::vector<std::size_t> link_rows_; // rows that are linking
    std::vector<std::vector<std::pair<std::size_t, Int>>> member_links_;  // var -> (row, coef)
    Row objective_;
    std::vector<Int> obj_coef_;          // per variable
    std::vector<std::vector<std::pair<std::size_t, Int>>> var_rows_;  // plain occurrences
    bool integral_objective_ = true;
    Real step_ = 1;
    Domain root_;

    bool have_incumbent_ = false;
    Real incumbent_obj_ = 0;
    Domain incumbent_;
    std::vector<Real> incumbent_cont_;
    std::size_t nodes_ = 0;
};

Solver::Solver(const IlpProblem& problem, const SolverOptions& options)
    : problem_(problem), options_(options), scale_(problem.coefficient_scale())
{
    problem_.validate();
    build();
}

Int scaled(double v, Real scale)
{
    return static_cast<Int>(std::llround(static_cast<Real>(v) * scale));
}

void Solver::build()
{
    const auto& vars = problem_.variables();
    const std::size_t n = vars.size();
    kinds_.resize(n);
    root_.lo.assign(n, 0);
    root_.hi.assign(n, 0);
    root_.clo.assign(n, 0);
    root_.chi.assign(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
        kinds_[j] = vars[j].kind;
        if (is_int(j)) {
            root_.lo[j] = static_cast<Int>(std::llround(vars[j].lower));
            root_.hi[j] = static_cast<Int>(std::llround(vars[j].upper));
        } else {
            root_.clo[j] = vars[j].lower;
            root_.chi[j] = vars[j].upper;
        }
    }

    // One-hot groups: sum of distinct binaries with coefficient 1 equal to 1.
    const Int unit = scaled(1.0, scale_);
    var_group_.assign(n, kNone);
    std::vector<bool> defines_group(problem_.constraints().size(), false);
    for (std::size_t i = 0; i < problem_.constraints().size(); ++i) {
        const auto& c = problem_.constraints()[i];
        if (c.sense != Sense::equal || scaled(c.rhs, scale_) != unit || c.terms.empty()) continue;
        bool ok = true;
        std::vector<std::size_t> members;
        for (const auto& t : c.terms) {
            if (kinds_[t.var] != VarKind::binary || scaled(t.coef, scale_) != unit ||
                var_group_[t.var] != kNone ||
                std::find(members.begin(), members.end(), t.var) != members.end()) {
                ok = false;
                break;
            }
            members.push_back(t.var);
        }
        if (!ok) continue;
        for (std::size_t m = 0; m < members.size(); ++m) var_group_[members[m]] = groups_.size();
        groups_.push_back(std::move(members));
        defines_group[i] = true;
    }

    auto member_pos = [&](std::size_t var) {
        const auto& mem = groups_[var_group_[var]];
        return static_cast<std::size_t>(std::find(mem.begin(), mem.end(), var) - mem.begin());
    };

    auto make_row = [&](const std::vector<Term>& terms, Row& row) {
        std::vector<Int> merged(n, 0);
        std::vector<bool> present(n, false);
        for (const auto& t : terms) {
            merged[t.var] += scaled(t.coef, scale_);
            present[t.var] = true;
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (!present[j] || merged[j] == 0) continue;
            if (!is_int(j)) {
                row.cont.push_back({j, merged[j]});
            } else if (var_group_[j] != kNone) {
                const std::size_t g = var_group_[j];
                auto it = std::find_if(row.groups.begin(), row.groups.end(),
                                       [&](const GroupPart& p) { return p.group == g; });
                if (it == row.groups.end()) {
                    row.groups.push_back({g, std::vector<Int>(groups_[g].size(), 0)});
                    it = row.groups.end() - 1;
                }
                it->coef[member_pos(j)] = merged[j];
            } else {
                row.plain.push_back({j, merged[j]});
            }
        }
    };

    var_rows_.assign(n, {});
    for (std::size_t i = 0; i < problem_.constraints().size(); ++i) {
        if (defines_group[i]) continue;
        const auto& c = problem_.constraints()[i];
        Row row;
        make_row(c.terms, row);
        row.equality = c.sense == Sense::equal;
        row.rhs = static_cast<Real>(scaled(c.rhs, scale_));
        if (row.cont.size() > 1)
            throw ConfigurationError("ilp: constraint " + c.name +
                                     " holds more than one continuous variable");
        for (const auto& e : row.plain) var_rows_[e.var].push_back({rows_.size(), e.coef});
        rows_.push_back(std::move(row));
    }

    make_row(problem_.objective(), objective_);
    obj_coef_.assign(n, 0);
    for (const auto& e : objective_.plain) obj_coef_[e.var] = e.coef;
    for (const auto& e : objective_.cont) obj_coef_[e.var] = e.coef;
    for (const auto& part : objective_.groups)
        for (std::size_t m = 0; m < part.coef.size(); ++m) obj_coef_[groups_[part.group][m]] = part.coef[m];

    // Objective granularity, used for the strict-improvement cutoff.
    Int g = 0;
    for (std::size_t j = 0; j < n; ++j)
        if (is_int(j) && obj_coef_[j] != 0) g = std::gcd(g, obj_coef_[j] < 0 ? -obj_coef_[j] : obj_coef_[j]);
    integral_objective_ = objective_.cont.empty();
    bool exact_cont = true;
    for (const auto& e : objective_.cont) {
        const Int c = e.coef < 0 ? -e.coef : e.coef;
        for (const auto& row : rows_) {
            for (const auto& ce : row.cont) {
                if (ce.var != e.var) continue;
                const Int a = ce.coef < 0 ? -ce.coef : ce.coef;
                if (c % a != 0) exact_cont = false;
                else g = std::gcd(g, c / a);
            }
        }
    }
    step_ = g > 0 && exact_cont ? static_cast<Real>(g) : 1e-6L;

    // Linking rows: sum(a * g) - o * w <= rhs, w integer with positive cost, one row per w.
    links_.assign(rows_.size(), Link{});
    std::vector<std::size_t> w_rows(n, 0);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        const Row& row = rows_[r];
        if (row.equality || row.plain.size() != 1 || !row.cont.empty() || row.groups.empty()) continue;
        const Entry& e = row.plain[0];
        if (e.coef >= 0 || obj_coef_[e.var] <= 0) continue;
        bool nonneg = true;
        for (const auto& part : row.groups)
            for (Int a : part.coef) nonneg = nonneg && a >= 0;
        if (!nonneg) continue;
        ++w_rows[e.var];
    }
    member_links_.assign(n, {});
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        const Row& row = rows_[r];
        if (row.equality || row.plain.size() != 1 || !row.cont.empty() || row.groups.empty()) continue;
        const Entry& e = row.plain[0];
        if (e.coef >= 0 || obj_coef_[e.var] <= 0 || w_rows[e.var] != 1) continue;
        bool nonneg = true;
        for (const auto& part : row.groups)
            for (Int a : part.coef) nonneg = nonneg && a >= 0;
        if (!nonneg) continue;
        links_[r] = {e.var, static_cast<Real>(-e.coef), static_cast<Real>(obj_coef_[e.var]), kNone};
        link_rows_.push_back(r);
        for (const auto& part : row.groups)
            for (std::size_t m = 0; m < part.coef.size(); ++m)
                if (part.coef[m] > 0) member_links_[groups_[part.group][m]].push_back({r, part.coef[m]});
    }
    // Primary group of a linking row: owns a member linked through this row only.
    for (std::size_t r : link_rows_) {
        Int best = 0;
        for (const auto& part : rows_[r].groups) {
            for (std::size_t m = 0; m < part.coef.size(); ++m) {
                const std::size_t var = groups_[part.group][m];
                if (part.coef[m] > best && member_links_[var].size() == 1) {
                    best = part.coef[m];
                    links_[r].primary = part.group;
                }
            }
        }
    }
}

bool Solver::part_range(const GroupPart& part, const Domain& d, Real& mn, Real& mx) const
{
    const auto& members = groups_[part.group];
    bool any = false;
    for (std::size_t m = 0; m < members.size(); ++m) {
        const std::size_t v = members[m];
        if (d.lo[v] == 1) {
            mn = mx = static_cast<Real>(part.coef[m]);
            return true;
        }
        if (d.hi[v] == 0) continue;
        const Real a = static_cast<Real>(part.coef[m]);
        if (!any) {
            mn = mx = a;
            any = true;
        } else {
            mn = std::min(mn, a);
            mx = std::max(mx, a);
        }
    }
    return any;
}

bool Solver::row_range(const Row& row, const Domain& d, Interval& out) const
{
    Real mn = 0, mx = 0;
    for (const auto& e : row.plain) {
        const Real a = static_cast<Real>(e.coef);
        if (e.coef > 0) {
            mn += a * static_cast<Real>(d.lo[e.var]);
            mx += a * static_cast<Real>(d.hi[e.var]);
        } else {
            mn += a * static_cast<Real>(d.hi[e.var]);
            mx += a * static_cast<Real>(d.lo[e.var]);
        }
    }
    for (const auto& part : row.groups) {
        Real pmin = 0, pmax = 0;
        if (!part_range(part, d, pmin, pmax)) return false;
        mn += pmin;
        mx += pmax;
    }
    for (const auto& e : row.cont) {
        const Real a = static_cast<Real>(e.coef);
        if (e.coef > 0) {
            mn += a * d.clo[e.var];
            mx += a * d.chi[e.var];
        } else {
            mn += a * d.chi[e.var];
            mx += a * d.clo[e.var];
        }
    }
    out = {mn, mx};
    return true;
}

bool Solver::tighten_row(const Row& row, Domain& d, bool& changed) const
{
    Interval act;
    if (!row_range(row, d, act)) return false;
    const Real tol = tol_for(row.rhs);
    if (act.min > row.rhs + tol) return false;
    if (row.equality && act.max < row.rhs - tol) return false;

    // Upper side: activity <= rhs.
    for (const auto& e : row.plain) {
        const Real a = static_cast<Real>(e.coef);
        const Real own = e.coef > 0 ? a * static_cast<Real>(d.lo[e.var]) : a * static_cast<Real>(d.hi[e.var]);
        const Real room = row.rhs - (act.min - own);
        if (e.coef > 0) {
            const Int bound = static_cast<Int>(std::floor(room / a + kEps));
            if (bound < d.hi[e.var]) {
                d.hi[e.var] = bound;
                changed = true;
            }
        } else {
            const Int bound = static_cast<Int>(std::ceil(room / a - kEps));
            if (bound > d.lo[e.var]) {
                d.lo[e.var] = bound;
                changed = true;
            }
        }
        if (d.lo[e.var] > d.hi[e.var]) return false;
    }
    for (const auto& part : row.groups) {
        Real pmin = 0, pmax = 0;
        part_range(part, d, pmin, pmax);
        const auto& members = groups_[part.group];
        for (std::size_t m = 0; m < members.size(); ++m) {
            const std::size_t v = members[m];
            if (d.hi[v] == 0 || d.lo[v] == 1) continue;
            if (act.min - pmin + static_cast<Real>(part.coef[m]) > row.rhs + tol) {
                d.hi[v] = 0;
                changed = true;
            }
        }
    }
    for (const auto& e : row.cont) {
        const Real a = static_cast<Real>(e.coef);
        const Real own = e.coef > 0 ? a * d.clo[e.var] : a * d.chi[e.var];
        const Real limit = (row.rhs - (act.min - own)) / a;
        if (e.coef > 0 && limit < d.chi[e.var]) {
            d.chi[e.var] = limit;
            changed = true;
        } else if (e.coef < 0 && limit > d.clo[e.var]) {
            d.clo[e.var] = limit;
            changed = true;
        }
        if (d.clo[e.var] > d.chi[e.var] + kEps * (1 + std::fabs(d.chi[e.var]))) return false;
    }

    if (!row.equality) return true;

    // Lower side: activity >= rhs.
    if (!row_range(row, d, act)) return false;
    for (const auto& e : row.plain) {
        const Real a = static_cast<Real>(e.coef);
        const Real own = e.coef > 0 ? a * static_cast<Real>(d.hi[e.var]) : a * static_cast<Real>(d.lo[e.var]);
        const Real need = row.rhs - (act.max - own);
        if (e.coef > 0) {
            const Int bound = static_cast<Int>(std::ceil(need / a - kEps));
            if (bound > d.lo[e.var]) {
                d.lo[e.var] = bound;
                changed = true;
            }
        } else {
            const Int bound = static_cast<Int>(std::floor(need / a + kEps));
            if (bound < d.hi[e.var]) {
                d.hi[e.var] = bound;
                changed = true;
            }
        }
        if (d.lo[e.var] > d.hi[e.var]) return false;
    }
    for (const auto& part : row.groups) {
        Real pmin = 0, pmax = 0;
        part_range(part, d, pmin, pmax);
        const auto& members = groups_[part.group];
        for (std::size_t m = 0; m < members.size(); ++m) {
            const std::size_t v = members[m];
            if (d.hi[v] == 0 || d.lo[v] == 1) continue;
            if (act.max - pmax + static_cast<Real>(part.coef[m]) < row.rhs - tol) {
                d.hi[v] = 0;
                changed = true;
            }
        }
    }
    for (const auto& e : row.cont) {
        const Real a = static_cast<Real>(e.coef);
        const Real own = e.coef > 0 ? a * d.chi[e.var] : a * d.clo[e.var];
        const Real limit = (row.rhs - (act.max - own)) / a;
        if (e.coef > 0 && limit > d.clo[e.var]) {
            d.clo[e.var] = limit;
            changed = true;
        } else if (e.coef < 0 && limit < d.chi[e.var]) {
            d.chi[e.var] = limit;
            changed = true;
        }
        if (d.clo[e.var] > d.chi[e.var] + kEps * (1 + std::fabs(d.chi[e.var]))) return false;
    }
    return true;
}

bool Solver::propagate(Domain& d) const
{
    Row cutoff;
    if (have_incumbent_) {
        cutoff = objective_;
        cutoff.rhs = incumbent_obj_ - step_;
    }
    for (int pass = 0; pass < 1000; ++pass) {
        bool changed = false;

        for (const auto& members : groups_) {
            std::size_t fixed = kNone, allowed = 0, last = kNone;
            for (std::size_t v : members) {
                if (d.lo[v] == 1) {
                    if (fixed != kNone) return false;
                    fixed = v;
                }
                if (d.hi[v] == 1) {
                    ++allowed;
                    last = v;
                }
            }
            if (allowed == 0) return false;
            if (fixed != kNone) {
                for (std::size_t v : members) {
                    if (v != fixed && d.hi[v] != 0) {
                        d.hi[v] = 0;
                        changed = true;
                    }
                }
            } else if (allowed == 1) {
                d.lo[last] = 1;
                changed = true;
            }
        }

        for (const auto& row : rows_)
            if (!tighten_row(row, d, changed)) return false;
        if (have_incumbent_ && !tighten_row(cutoff, d, changed)) return false;

        // Dual fixing: a variable whose favourable direction cannot be needed.
        for (std::size_t j = 0; j < kinds_.size(); ++j) {
            if (!is_int(j) || var_group_[j] != kNone || d.lo[j] == d.hi[j]) continue;
            const Int c = obj_coef_[j];
            const bool toward_lo = c > 0 || (c == 0 && kinds_[j] != VarKind::binary);
            const bool toward_hi = c < 0;
            if (!toward_lo && !toward_hi) continue;
            bool ok = true;
            for (const auto& [r, a] : var_rows_[j]) {
                const Row& row = rows_[r];
                if (row.equality) {
                    ok = false;
                    break;
                }
                const bool hurts = toward_lo ? a < 0 : a > 0;
                if (!hurts) continue;
                Interval act;
                if (!row_range(row, d, act)) return false;
                if (act.max > row.rhs + tol_for(row.rhs)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            if (toward_lo) d.hi[j] = d.lo[j];
            else d.lo[j] = d.hi[j];
            changed = true;
        }

        if (!changed) return true;
    }
    return true;
}

Real Solver::lower_bound(const Domain& d) const
{
    Real bound = 0;
    for (const auto& e : objective_.plain) {
        const Real c = static_cast<Real>(e.coef);
        bound += e.coef > 0 ? c * static_cast<Real>(d.lo[e.var]) : c * static_cast<Real>(d.hi[e.var]);
    }
    for (const auto& e : objective_.cont) {
        const Real c = static_cast<Real>(e.coef);
        bound += e.coef > 0 ? c * d.clo[e.var] : c * d.chi[e.var];
    }

    // Per linking row: fixed load F and current w lower bound, in units of w.
    std::vector<Real> fixed_load(rows_.size(), 0);
    for (std::size_t r : link_rows_) {
        Real load = -rows_[r].rhs;
        for (const auto& part : rows_[r].groups) {
            const auto& members = groups_[part.group];
            for (std::size_t m = 0; m < members.size(); ++m)
                if (d.lo[members[m]] == 1) load += static_cast<Real>(part.coef[m]);
        }
        fixed_load[r] = load / links_[r].o;
    }

    for (std::size_t g = 0; g < groups_.size(); ++g) {
        const auto& members = groups_[g];
        std::size_t fixed = kNone;
        for (std::size_t v : members)
            if (d.lo[v] == 1) fixed = v;
        if (fixed != kNone) {
            bound += static_cast<Real>(obj_coef_[fixed]);
            continue;
        }
        Real best = std::numeric_limits<Real>::infinity();
        for (std::size_t v : members) {
            if (d.hi[v] == 0) continue;
            Real cost = static_cast<Real>(obj_coef_[v]);
            for (const auto& [r, a] : member_links_[v]) {
                const Link& link = links_[r];
                const Real f = fixed_load[r];
                const Real lbw = static_cast<Real>(d.lo[link.w]);
                const Real y = static_cast<Real>(a) / link.o;
                Real share;
                if (link.primary == g) share = std::max<Real>(0, std::ceil(f + y - kEps) - lbw);
                else share = std::max<Real>(0, y - std::max<Real>(1, lbw - f));
                cost += link.cost * share;
            }
            best = std::min(best, cost);
        }
        bound += best;
    }
    return bound;
}

void Solver::finish_leaf(const Domain& d)
{
    std::vector<Real> cont(kinds_.size(), 0);
    for (std::size_t j = 0; j < kinds_.size(); ++j)
        if (!is_int(j)) cont[j] = obj_coef_[j] >= 0 ? d.clo[j] : d.chi[j];

    Real obj = 0;
    for (std::size_t j = 0; j < kinds_.size(); ++j) {
        const Real x = is_int(j) ? static_cast<Real>(d.lo[j]) : cont[j];
        obj += static_cast<Real>(obj_coef_[j]) * x;
    }
    for (const auto& row : rows_) {
        Real act = 0;
        for (const auto& e : row.plain) act += static_cast<Real>(e.coef) * static_cast<Real>(d.lo[e.var]);
        for (const auto& part : row.groups)
            for (std::size_t m = 0; m < part.coef.size(); ++m)
                act += static_cast<Real>(part.coef[m]) * static_cast<Real>(d.lo[groups_[part.group][m]]);
        for (const auto& e : row.cont) act += static_cast<Real>(e.coef) * cont[e.var];
        const Real tol = tol_for(row.rhs) * 10;
        if (act > row.rhs + tol) return;
        if (row.equality && act < row.rhs - tol) return;
    }
    if (have_incumbent_ && obj > incumbent_obj_ - step_ + tol_for(incumbent_obj_)) return;
    have_incumbent_ = true;
    incumbent_obj_ = obj;
    incumbent_ = d;
    incumbent_cont_ = std::move(cont);
}

void Solver::search(Domain d)
{
    if (++nodes_ > options_.node_budget)
        throw SolverLimitError("branch-and-bound node budget of " + std::to_string(options_.node_budget) +
                               " exhausted");
    if (!propagate(d)) return;

    Real bound = lower_bound(d);
    if (integral_objective_) bound = std::ceil(bound / step_ - kEps) * step_;
    if (have_incumbent_ && bound > incumbent_obj_ - step_ + tol_for(incumbent_obj_)) return;

    std::size_t branch = kNone;
    for (std::size_t j = 0; j < kinds_.size(); ++j) {
        if (is_int(j) && d.lo[j] < d.hi[j]) {
            branch = j;
            break;
        }
    }
    if (branch == kNone) {
        finish_leaf(d);
        return;
    }

    if (kinds_[branch] == VarKind::binary) {
        for (Int v : {Int{1}, Int{0}}) {
            Domain child = d;
            child.lo[branch] = child.hi[branch] = v;
            search(std::move(child));
        }
        return;
    }
    const Int lo = d.lo[branch];
    const Int hi = d.hi[branch];
    const Real c = static_cast<Real>(obj_coef_[branch]);
    for (Int v = lo; v <= hi; ++v) {
        if (have_incumbent_ && c > 0 &&
            bound + c * static_cast<Real>(v - lo) > incumbent_obj_ - step_ + tol_for(incumbent_obj_))
            break;
        Domain child = d;
        child.lo[branch] = child.hi[branch] = v;
        search(std::move(child));
    }
}

SolveResult Solver::run()
{
    search(root_);
    SolveResult result;
    result.nodes = nodes_;
    if (!have_incumbent_) {
        result.status = SolveStatus::infeasible;
        return result;
    }
    result.status = SolveStatus::optimal;
    result.assignment.values.resize(kinds_.size());
    for (std::size_t j = 0; j < kinds_.size(); ++j) {
        result.assignment.values[j] = is_int(j) ? static_cast<double>(incumbent_.lo[j])
                                                : static_cast<double>(incumbent_cont_[j]);
    }
    result.assignment.objective = problem_.evaluate_objective(result.assignment.values);
    return result;
}

}  // namespace

SolveResult solve(const IlpProblem& problem, const SolverOptions& options)
{
    Solver solver(problem, options);
    return solver.run();
}

}  // namespace fatpipe
