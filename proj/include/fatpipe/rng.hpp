#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace fatpipe {

/// splitmix64 finalizer applied to (master, stream). Used to derive independent
/// per-stream seeds from one run seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Seedable generator with a fully specified output sequence.
///
/// The engine is mt19937_64, whose sequence is fixed by the C++ standard. The
/// distributions are implemented here (not via <random> distributions, which are
/// implementation-defined) so a given seed yields the same numbers everywhere:
///   uniform01: (x >> 11) * 2^-53, mapped to (0, 1]
///   normal:    Box-Muller, one engine draw pair per sample, cosine branch
///   exponential: inverse CDF, -ln(u) / rate
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on (0, 1].
    double uniform01();
    /// Uniform on [0, 1).
    double uniform_half_open();
    double normal(double mean, double stddev);
    double exponential(double rate);
    /// Uniform index in [0, n).
    std::size_t uniform_index(std::size_t n);

private:
    std::mt19937_64 engine_;
};

/// Inverse-CDF exponential sample for a given uniform draw u in (0, 1].
double exponential_from_uniform(double u, double rate);

}  // namespace fatpipe
