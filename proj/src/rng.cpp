#include "fatpipe/rng.hpp"

#include <cmath>
#include <numbers>

namespace fatpipe {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream)
{
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::uniform_half_open()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform01()
{
    return 1.0 - uniform_half_open();
}

double Rng::normal(double mean, double stddev)
{
    const double u1 = uniform01();
    const double u2 = uniform_half_open();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mean + stddev * z;
}

double Rng::exponential(double rate)
{
    return exponential_from_uniform(uniform01(), rate);
}

std::size_t Rng::uniform_index(std::size_t n)
{
    const auto idx = static_cast<std::size_t>(uniform_half_open() * static_cast<double>(n));
    return idx < n ? idx : n - 1;
}

double exponential_from_uniform(double u, double rate)
{
    return -std::log(u) / rate;
}

}  // namespace fatpipe
