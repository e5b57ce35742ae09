#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fatpipe/anneal.hpp"
#include "fatpipe/bnb_solver.hpp"
#include "fatpipe/errors.hpp"
#include "fatpipe/optimizer.hpp"
#include "fatpipe/qubo.hpp"
#include "fixtures.hpp"
#include "ilp_oracle.hpp"

using namespace fatpipe;

namespace {

std::vector<std::uint8_t> bits_of(std::uint64_t m, std::size_t n)
{
    std::vector<std::uint8_t> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = (m >> i) & 1u;
    return b;
}

// Minimum energy and every state attaining it.
std::pair<double, std::vector<std::uint64_t>> exhaustive(const QuboProblem& q)
{
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::uint64_t> arg;
    const std::uint64_t states = std::uint64_t{1} << q.size();
    for (std::uint64_t m = 0; m < states; ++m) {
        const double e = q.energy(bits_of(m, q.size()));
        if (e < best - 1e-9) {
            best = e;
            arg = {m};
        } else if (std::abs(e - best) <= 1e-9) {
            arg.push_back(m);
        }
    }
    return {best, arg};
}

IlpProblem allocation_toy(int eta)
{
    IlpProblem p;
    const auto g = p.add_binary("g");
    const auto w = p.add_integer("w", 0, eta);
    p.add_constraint("one", {{g, 1.0}}, Sense::equal, 1.0);
    p.add_constraint("cap", {{w, -100.0}, {g, 319.0}}, Sense::less_equal, 0.0);
    p.add_constraint("eta", {{w, 1.0}}, Sense::less_equal, static_cast<double>(eta));
    p.set_objective({{w, 1.0}});
    return p;
}

}  // namespace

TEST(Qubo, OneHotPairHasGapP)
{
    IlpProblem p;
    const auto a = p.add_binary("a");
    const auto b = p.add_binary("b");
    p.add_constraint("one", {{a, 1.0}, {b, 1.0}}, Sense::equal, 1.0);
    p.set_objective({});
    QuboOptions o;
    o.penalty = 7.0;
    const QuboModel m = ilp_to_qubo(p, o);
    ASSERT_EQ(m.qubo.size(), 2u);
    const double e00 = m.qubo.energy(bits_of(0, 2)), e10 = m.qubo.energy(bits_of(1, 2));
    const double e01 = m.qubo.energy(bits_of(2, 2)), e11 = m.qubo.energy(bits_of(3, 2));
    EXPECT_NEAR(e10, e01, 1e-12);
    EXPECT_NEAR(e00 - e10, 7.0, 1e-12);
    EXPECT_NEAR(e11 - e10, 7.0, 1e-12);
}

TEST(Qubo, CappedBinaryWeights)
{
    EXPECT_EQ(capped_binary_weights(31), (std::vector<double>{1, 2, 4, 8, 16}));
    EXPECT_EQ(capped_binary_weights(10), (std::vector<double>{1, 2, 4, 3}));
    EXPECT_EQ(capped_binary_weights(1), (std::vector<double>{1}));
    EXPECT_TRUE(capped_binary_weights(0).empty());
}

TEST(Qubo, DecodeBinaryExpansion)
{
    IlpProblem p;
    p.add_integer("w", 0, 31);
    p.set_objective({{0, 1.0}});
    const QuboModel m = ilp_to_qubo(p);
    ASSERT_EQ(m.encoding.vars[0].size(), 5u);
    const std::vector<std::uint8_t> bits = {1, 0, 1, 0, 0};
    const DecodeResult d = decode(p, m.encoding, bits);
    EXPECT_EQ(d.assignment.values[0], 5.0);
    EXPECT_TRUE(d.feasible());
    EXPECT_EQ(d.assignment.objective, 5.0);
}

TEST(Qubo, AllocationToyArgminIsFour)
{
    const IlpProblem p = allocation_toy(31);
    const QuboModel m = ilp_to_qubo(p);
    ASSERT_LE(m.qubo.size(), 20u);
    const auto [best, arg] = exhaustive(m.qubo);
    for (std::uint64_t s : arg) {
        const DecodeResult d = decode(p, m.encoding, bits_of(s, m.qubo.size()));
        EXPECT_TRUE(d.feasible());
        EXPECT_EQ(d.assignment.values[1], 4.0);
    }
}

TEST(Qubo, InfeasibleToyDecodesInfeasible)
{
    const IlpProblem p = allocation_toy(0);
    const QuboModel m = ilp_to_qubo(p);
    const auto [best, arg] = exhaustive(m.qubo);
    for (std::uint64_t s : arg) EXPECT_FALSE(decode(p, m.encoding, bits_of(s, m.qubo.size())).feasible());
    // Relaxed floor is 0 (objective of w = 0); every state pays at least P.
    EXPECT_GE(best, m.encoding.penalty - 1e-9);
}

TEST(Qubo, RandomBitstringViolationsMatchDirectCheck)
{
    const IlpProblem p = allocation_toy(31);
    const QuboModel m = ilp_to_qubo(p);
    std::mt19937_64 g(3);
    for (int i = 0; i < 200; ++i) {
        const auto bits = bits_of(g(), m.qubo.size());
        const DecodeResult d = decode(p, m.encoding, bits);
        EXPECT_EQ(d.violations.size(), p.violations(d.assignment.values).size());
    }
}

TEST(Qubo, EncodeDecodeRoundTrip)
{
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const oracle::SmallIlp s = oracle::random_ilp(seed, 6, 2);
        const SolveResult r = solve(s.problem);
        if (!r.feasible()) continue;
        const QuboModel m = ilp_to_qubo(s.problem);
        const auto bits = encode(s.problem, m.encoding, r.assignment.values);
        const DecodeResult d = decode(s.problem, m.encoding, bits);
        EXPECT_EQ(d.assignment.values, r.assignment.values) << "seed " << seed;
        EXPECT_TRUE(d.feasible());
        // A feasible state with its slack set pays no penalty.
        EXPECT_NEAR(m.qubo.energy(bits), r.assignment.objective, 1e-6) << "seed " << seed;
    }
}

TEST(Qubo, EnergyBasics)
{
    QuboProblem q(3);
    q.add_offset(2.5);
    q.add(0, 0, -1.0);
    q.add(2, 1, 4.0);
    EXPECT_EQ(q.energy(std::vector<std::uint8_t>{0, 0, 0}), 2.5);
    EXPECT_EQ(q.energy(std::vector<std::uint8_t>{1, 0, 0}), 1.5);
    EXPECT_EQ(q.energy(std::vector<std::uint8_t>{0, 1, 1}), 6.5);
    EXPECT_EQ(q.coef(1, 2), 4.0);
}

TEST(Qubo, EnergyIsQuadratic)
{
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const std::size_t n = 12;
    QuboProblem q(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) q.add(i, j, u(g));
    // For disjoint x, y: E(x+y) - E(x) - E(y) + E(0) = sum over cross pairs.
    for (int t = 0; t < 100; ++t) {
        std::vector<std::uint8_t> x(n, 0), y(n, 0), xy(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = g() % 3;
            x[i] = r == 1;
            y[i] = r == 2;
            xy[i] = r != 0;
        }
        double cross = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (x[i] && y[j]) cross += q.coef(std::min(i, j), std::max(i, j));
        const double lhs = q.energy(xy) - q.energy(x) - q.energy(y) + q.energy(std::vector<std::uint8_t>(n, 0));
        EXPECT_NEAR(lhs, cross, 1e-9);
    }
}

TEST(Qubo, WriteReadRoundTrip)
{
    const QuboModel m = ilp_to_qubo(allocation_toy(31));
    std::stringstream ss;
    m.qubo.write(ss);
    EXPECT_EQ(ss.str().rfind("# fatpipe-qubo 1", 0), 0u);
    const QuboProblem back = QuboProblem::read(ss);
    ASSERT_EQ(back.size(), m.qubo.size());
    EXPECT_EQ(back.offset(), m.qubo.offset());
    for (std::size_t i = 0; i < back.size(); ++i)
        for (std::size_t j = i; j < back.size(); ++j) EXPECT_EQ(back.coef(i, j), m.qubo.coef(i, j));
}

TEST(Qubo, UnboundedVariableRejected)
{
    IlpProblem p;
    p.add_continuous("z", 0.0, std::numeric_limits<double>::infinity());
    EXPECT_THROW(ilp_to_qubo(p), std::exception);
}

TEST(Qubo, RandomIlpArgminMatchesExactOptimum)
{
    int checked = 0;
    for (std::uint64_t seed = 1; checked < 50 && seed < 5000; ++seed) {
        const oracle::SmallIlp s = oracle::random_ilp(seed, 6, 1);
        const QuboModel m = ilp_to_qubo(s.problem);
        if (m.qubo.size() > 20) continue;
        ++checked;
        const auto expected = oracle::brute_force(s);
        const auto [best, arg] = exhaustive(m.qubo);
        for (std::uint64_t st : arg) {
            const DecodeResult d = decode(s.problem, m.encoding, bits_of(st, m.qubo.size()));
            EXPECT_EQ(d.feasible(), expected.has_value()) << "seed " << seed;
            if (expected && d.feasible()) EXPECT_NEAR(d.assignment.objective, *expected, 1e-9) << "seed " << seed;
        }
    }
    EXPECT_EQ(checked, 50);
}

TEST(Anneal, SingleVariable)
{
    QuboProblem q(1);
    q.add(0, 0, -1.0);
    AnnealConfig c;
    c.sweeps = 1;
    c.restarts = 1;
    const AnnealResult r = anneal_serial(q, c);
    EXPECT_EQ(r.bits, (std::vector<std::uint8_t>{1}));
    EXPECT_EQ(r.energy, -1.0);
}

TEST(Anneal, ZeroMatrixIsDeterministic)
{
    QuboProblem q(6);
    AnnealConfig c;
    c.sweeps = 10;
    c.restarts = 3;
    const AnnealResult a = anneal_serial(q, c);
    const AnnealResult b = anneal_serial(q, c);
    EXPECT_EQ(a.bits, b.bits);
    EXPECT_EQ(a.restart, 0u);
    EXPECT_EQ(a.energy, 0.0);
}

TEST(Anneal, SerialAndParallelAgree)
{
    const QuboModel m = ilp_to_qubo(allocation_toy(31));
    AnnealConfig c;
    c.sweeps = 300;
    c.restarts = 8;
    c.seed = 99;
    const AnnealResult a = anneal_serial(m.qubo, c);
    const AnnealResult b = anneal_parallel(m.qubo, c);
    EXPECT_EQ(a.bits, b.bits);
    EXPECT_EQ(a.energy, b.energy);
    EXPECT_EQ(a.restart, b.restart);
}

TEST(Anneal, InvalidConfigRejected)
{
    QuboProblem q(2);
    AnnealConfig c;
    c.restarts = 0;
    EXPECT_THROW(anneal_serial(q, c), ConfigurationError);
    c.restarts = 1;
    c.t_final = 0.0;
    EXPECT_THROW(anneal_serial(q, c), ConfigurationError);
}

// Four demands with two configurations each on a triangle (8 choice bits):
// the annealer should reach the exact optimum almost always.
TEST(Anneal, ReoccupationToyMatchesExact)
{
    const NetworkTopology topo = build_network(fixtures::triangle());
    const auto circuits = enumerate_circuit_paths(topo, kUnlimitedReach, 0);
    const ConfigurationCatalog cat =
        generate_configurations(topo, circuits, {{0, 0, 1, 0}, {1, 1, 2, 0}, {2, 2, 0, 0}, {3, 0, 2, 0}}, 2);
    for (DemandId d = 0; d < 4; ++d) ASSERT_EQ(cat.configs_of(d).size(), 2u);
    const std::vector<int> w(circuits.size(), 3);
    std::vector<double> q(circuits.size(), 0.0);
    q[0] = 4.0;
    q[3] = 1.5;
    const std::vector<double> h = {320.0, 150.0, 280.0, 200.0};
    ReoccupationInput in{h, w, q};
    const ReoccupationModel model = build_reoccupation_ilp(cat, in);
    const SolveResult exact = solve(model.problem);
    ASSERT_TRUE(exact.feasible());
    const double optimum = exact.assignment.values[model.q_max_var];

    auto true_qmax = [&](const std::vector<ConfigId>& chosen) {
        const auto load = circuit_loads(cat, chosen, h);
        double m = 0.0;
        for (std::size_t c = 0; c < load.size(); ++c)
            m = std::max(m, q[c] / w[c] + predicted_queue_delta(w[c], in.xi, in.delta_t, load[c]));
        return m;
    };

    QuboOptions qo;
    qo.resolution = in.xi * in.delta_t / 256.0;
    const QuboModel qm = ilp_to_qubo(model.problem, qo);
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        AnnealConfig c;
        c.sweeps = 1000;
        c.restarts = 10;
        c.t_initial = 1000.0;
        c.seed = seed;
        const AnnealResult r = anneal_serial(qm.qubo, c);
        const DecodeResult d = settle_continuous(model.problem, decode(model.problem, qm.encoding, r.bits));
        if (!d.feasible()) continue;
        const ReoccupationResult rr = decode_reoccupation(cat, model, d.assignment);
        if (std::abs(true_qmax(rr.chosen) - optimum) <= qo.resolution + 1e-9) ++hits;
    }
    EXPECT_GE(hits, 95);
}
