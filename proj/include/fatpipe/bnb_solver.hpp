#pragma once

#include <cstddef>

#include "fatpipe/ilp.hpp"

namespace fatpipe {

struct SolverOptions {
    std::size_t node_budget = 10'000'000;
};

enum class SolveStatus { optimal, infeasible };

struct SolveResult {
    SolveStatus status = SolveStatus::infeasible;
    Assignment assignment;
    std::size_t nodes = 0;

    bool feasible() const { return status == SolveStatus::optimal; }
};

/// Exact depth-first branch-and-bound without LP relaxation.
///
/// Works on the problem's fixed-point grid in scaled integers. Each node runs
/// bound propagation to a fixpoint (one-hot groups, i.e. equality rows
/// sum(x) = 1 over binaries, are propagated and bounded as units), dual fixing
/// and an objective cutoff. The lower bound adds, for every open one-hot group,
/// the cheapest integral cost it can impose through "linking" rows of the form
/// sum(a * g) - o * w <= rhs with w an objective-penalised integer.
///
/// Branching follows declaration order: binaries try 1 then 0, integers ascend.
/// Only strict improvements replace the incumbent, so among equal optima the
/// result is the first in that order. Continuous variables are not branched on;
/// each constraint may hold at most one of them and they take their best value
/// once all integers are fixed.
///
/// Throws SolverLimitError when the node budget is exhausted and
/// ConfigurationError for unsupported structure.
SolveResult solve(const IlpProblem& problem, const SolverOptions& options = {});

}  // namespace fatpipe
