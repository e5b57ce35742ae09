#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fatpipe/qubo.hpp"

namespace fatpipe {

struct AnnealConfig {
    std::size_t sweeps = 1000;
    std::size_t restarts = 10;
    /// Geometric schedule from t_initial to t_final over the sweeps.
    double t_initial = 10.0;
    double t_final = 0.01;
    std::uint64_t seed = 1;
};

struct AnnealResult {
    std::vector<std::uint8_t> bits;
    double energy = 0.0;
    std::size_t restart = 0;  // restart that found the state
};

/// Single-flip Metropolis annealing. Restart r starts from a uniformly random
/// state drawn from stream r of the seed. The best state seen is replaced only
/// on strict improvement; restarts are merged by lowest energy, then lowest
/// restart index. Throws ConfigurationError on an invalid config.
AnnealResult anneal_serial(const QuboProblem& qubo, const AnnealConfig& config);

/// Same result as anneal_serial, restarts distributed over OpenMP threads.
AnnealResult anneal_parallel(const QuboProblem& qubo, const AnnealConfig& config);

inline AnnealResult anneal(const QuboProblem& qubo, const AnnealConfig& config)
{
    return anneal_parallel(qubo, config);
}

}  // namespace fatpipe
