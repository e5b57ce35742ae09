#include "fatpipe/traffic.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

namespace fatpipe {

TrafficGenerator::TrafficGenerator(const TrafficParams& params, std::size_t demand_count,
                                   std::uint64_t seed)
    : params_(params),
      burst_rng_(derive_seed(seed, 0)),
      short_term_mean_(demand_count, 0.0),
      rates_(demand_count, 0.0)
{
    assert(demand_count >= 1);
    demand_rngs_.reserve(demand_count);
    for (std::size_t d = 0; d < demand_count; ++d) demand_rngs_.emplace_back(derive_seed(seed, 1 + d));
    for (auto& mean : short_term_mean_) mean = std::max(0.0, burst_rng_.normal(params_.mu_b, params_.sigma_b));
    next_burst_ = sample_burst_interval();
}

double TrafficGenerator::sample_burst_interval()
{
    if (params_.lambda_bursts_per_s <= 0.0) return std::numeric_limits<double>::infinity();
    const double rate = params_.lambda_bursts_per_s * static_cast<double>(short_term_mean_.size());
    return burst_rng_.exponential(rate);
}

std::size_t TrafficGenerator::apply_burst()
{
    const std::size_t d = burst_rng_.uniform_index(short_term_mean_.size());
    short_term_mean_[d] = std::max(0.0, burst_rng_.normal(params_.mu_b, params_.sigma_b));
    next_burst_ += sample_burst_interval();
    return d;
}

std::size_t TrafficGenerator::advance_to(double t)
{
    std::size_t fired = 0;
    while (next_burst_ <= t) {
        apply_burst();
        ++fired;
    }
    return fired;
}

std::span<const double> TrafficGenerator::sample_instant_rates()
{
    for (std::size_t d = 0; d < rates_.size(); ++d)
        rates_[d] = std::max(0.0, demand_rngs_[d].normal(short_term_mean_[d], params_.sigma_st));
    return rates_;
}

}  // namespace fatpipe
