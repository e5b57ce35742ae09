#include <gtest/gtest.h>

#include <cmath>

#include "fatpipe/bnb_solver.hpp"
#include "fatpipe/errors.hpp"
#include "ilp_oracle.hpp"

using namespace fatpipe;

TEST(Solver, MatchesExhaustiveEnumeration)
{
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
        const oracle::SmallIlp s = oracle::random_ilp(seed);
        const auto expected = oracle::brute_force(s);
        const SolveResult r = solve(s.problem);
        ASSERT_EQ(r.feasible(), expected.has_value()) << "seed " << seed;
        if (!expected) continue;
        EXPECT_NEAR(r.assignment.objective, static_cast<double>(*expected), 1e-9) << "seed " << seed;
        EXPECT_TRUE(s.problem.violations(r.assignment.values).empty()) << "seed " << seed;
    }
}

TEST(Solver, AllocationToyIsFour)
{
    // w >= 3.19 with w integer in 0..31, minimize w.
    IlpProblem p;
    const auto g = p.add_binary("g");
    const auto w = p.add_integer("w", 0, 31);
    p.add_constraint("one", {{g, 1.0}}, Sense::equal, 1.0);
    p.add_constraint("cap", {{w, -100.0}, {g, 319.0}}, Sense::less_equal, 0.0);
    p.set_objective({{w, 1.0}});
    const SolveResult r = solve(p);
    ASSERT_TRUE(r.feasible());
    EXPECT_EQ(r.assignment.values[w], 4.0);
    EXPECT_EQ(r.assignment.objective, 4.0);
}

TEST(Solver, ContinuousVariableTakesBestValue)
{
    // minimize z s.t. z >= 2.5 - x, z >= x - 0.5, x binary.
    IlpProblem p;
    const auto x = p.add_binary("x");
    const auto z = p.add_continuous("z", 0.0, 10.0);
    p.add_constraint("a", {{x, -1.0}, {z, -1.0}}, Sense::less_equal, -2.5);
    p.add_constraint("b", {{x, 1.0}, {z, -1.0}}, Sense::less_equal, 0.5);
    p.set_objective({{z, 1.0}});
    const SolveResult r = solve(p);
    ASSERT_TRUE(r.feasible());
    EXPECT_EQ(r.assignment.values[x], 1.0);
    EXPECT_NEAR(r.assignment.values[z], 1.5, 1e-9);
}

TEST(Solver, InfeasibleReported)
{
    IlpProblem p;
    const auto a = p.add_binary("a");
    const auto b = p.add_binary("b");
    p.add_constraint("one", {{a, 1.0}, {b, 1.0}}, Sense::equal, 1.0);
    p.add_constraint("none", {{a, 1.0}, {b, 1.0}}, Sense::less_equal, 0.0);
    EXPECT_FALSE(solve(p).feasible());
}

TEST(Solver, TiesKeepFirstInDeclarationOrder)
{
    IlpProblem p;
    const auto a = p.add_binary("a");
    const auto b = p.add_binary("b");
    const auto c = p.add_binary("c");
    p.add_constraint("one", {{a, 1.0}, {b, 1.0}, {c, 1.0}}, Sense::equal, 1.0);
    p.set_objective({});
    const SolveResult r = solve(p);
    ASSERT_TRUE(r.feasible());
    EXPECT_EQ(r.assignment.values, (std::vector<double>{1.0, 0.0, 0.0}));
}

TEST(Solver, RepeatedSolvesAreIdentical)
{
    const oracle::SmallIlp s = oracle::random_ilp(12345);
    const SolveResult a = solve(s.problem);
    const SolveResult b = solve(s.problem);
    EXPECT_EQ(a.assignment.values, b.assignment.values);
    EXPECT_EQ(a.nodes, b.nodes);
}

TEST(Solver, NodeBudgetIsAnError)
{
    IlpProblem p;
    std::vector<Term> sum;
    for (int i = 0; i < 30; ++i) sum.push_back({p.add_binary("x" + std::to_string(i)), 2.0});
    // Parity makes every leaf infeasible; propagation cannot see it early.
    p.add_constraint("odd_lo", sum, Sense::less_equal, 31.0);
    std::vector<Term> neg = sum;
    for (auto& t : neg) t.coef = -t.coef;
    p.add_constraint("odd_hi", neg, Sense::less_equal, -31.0);
    SolverOptions o;
    o.node_budget = 1000;
    EXPECT_THROW(solve(p, o), SolverLimitError);
}

TEST(Solver, TwoContinuousInOneRowRejected)
{
    IlpProblem p;
    const auto a = p.add_continuous("a", 0, 1);
    const auto b = p.add_continuous("b", 0, 1);
    p.add_constraint("r", {{a, 1.0}, {b, 1.0}}, Sense::less_equal, 1.0);
    EXPECT_THROW(solve(p), ConfigurationError);
}

TEST(Ilp, ValidateCatchesBadBounds)
{
    IlpProblem p;
    p.add_integer("w", 3, 1);
    EXPECT_THROW(p.validate(), ConfigurationError);
}
