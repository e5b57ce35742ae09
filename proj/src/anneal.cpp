#include "fatpipe/anneal.hpp"

#include <cmath>

#include "fatpipe/errors.hpp"
#include "fatpipe/rng.hpp"

namespace fatpipe {

namespace {

void check(const AnnealConfig& config)
{
    if (config.restarts < 1) throw ConfigurationError("anneal: restarts must be at least 1");
    if (!(config.t_initial > 0.0) || !(config.t_final > 0.0))
        throw ConfigurationError("anneal: temperatures must be positive");
}

// Dense symmetric pair matrix and diagonal, for O(n) field updates.
struct Couplings {
    std::size_t n = 0;
    std::vector<double> diag;
    std::vector<double> pair;  // n * n, zero diagonal

    explicit Couplings(const QuboProblem& q) : n(q.size()), diag(n), pair(n * n, 0.0)
    {
        for (std::size_t i = 0; i < n; ++i) {
            diag[i] = q.coef(i, i);
            for (std::size_t j = i + 1; j < n; ++j) {
                const double v = q.coef(i, j);
                pair[i * n + j] = v;
                pair[j * n + i] = v;
            }
        }
    }
};

AnnealResult run_restart(const QuboProblem& qubo, const Couplings& cp, const AnnealConfig& config,
                         std::size_t restart)
{
    const std::size_t n = cp.n;
    Rng rng(derive_seed(config.seed, restart));
    std::vector<std::uint8_t> x(n);
    for (auto& b : x) b = rng.uniform_half_open() < 0.5 ? 0 : 1;

    // field[i] = diag[i] + sum_j pair[i][j] x[j]; flipping i changes energy by
    // (1 - 2 x[i]) * field[i].
    std::vector<double> field(cp.diag);
    for (std::size_t j = 0; j < n; ++j)
        if (x[j])
            for (std::size_t i = 0; i < n; ++i) field[i] += cp.pair[i * n + j];

    double energy = qubo.energy(x);
    AnnealResult best{x, energy, restart};

    const double ratio =
        config.sweeps > 1 ? std::pow(config.t_final / config.t_initial, 1.0 / static_cast<double>(config.sweeps - 1)) : 1.0;
    double temp = config.t_initial;
    for (std::size_t s = 0; s < config.sweeps; ++s, temp *= ratio) {
        for (std::size_t i = 0; i < n; ++i) {
            const double delta = (x[i] ? -1.0 : 1.0) * field[i];
            if (delta > 0.0 && rng.uniform01() >= std::exp(-delta / temp)) continue;
            const double sign = x[i] ? -1.0 : 1.0;
            x[i] ^= 1;
            energy += delta;
            const double* col = &cp.pair[i * n];
            for (std::size_t j = 0; j < n; ++j) field[j] += sign * col[j];
            if (energy < best.energy - 1e-12 * (1.0 + std::fabs(best.energy))) {
                best.bits = x;
                best.energy = energy;
            }
        }
    }
    best.energy = qubo.energy(best.bits);
    return best;
}

bool better(const AnnealResult& a, const AnnealResult& b)
{
    return a.energy < b.energy || (a.energy == b.energy && a.restart < b.restart);
}

}  // namespace

AnnealResult anneal_serial(const QuboProblem& qubo, const AnnealConfig& config)
{
    check(config);
    const Couplings cp(qubo);
    AnnealResult best = run_restart(qubo, cp, config, 0);
    for (std::size_t r = 1; r < config.restarts; ++r) {
        AnnealResult cur = run_restart(qubo, cp, config, r);
        if (better(cur, best)) best = std::move(cur);
    }
    return best;
}

AnnealResult anneal_parallel(const QuboProblem& qubo, const AnnealConfig& config)
{
    check(config);
    const Couplings cp(qubo);
    std::vector<AnnealResult> results(config.restarts);
    const auto count = static_cast<long>(config.restarts);
#pragma omp parallel for schedule(dynamic, 1)
    for (long r = 0; r < count; ++r)
        results[static_cast<std::size_t>(r)] = run_restart(qubo, cp, config, static_cast<std::size_t>(r));
    std::size_t best = 0;
    for (std::size_t r = 1; r < results.size(); ++r)
        if (better(results[r], results[best])) best = r;
    return std::move(results[best]);
}

}  // namespace fatpipe
