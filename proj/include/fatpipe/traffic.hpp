#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fatpipe/rng.hpp"

namespace fatpipe {

struct TrafficParams {
    double lambda_bursts_per_s = 1.0;  // 0 disables bursts
    double mu_b = 290.0;               // Gbit/s
    double sigma_b = 30.0;             // Gbit/s
    double sigma_st = 10.0;            // Gbit/s
};

/// Bursty offered-rate generator.
///
/// Streams: stream 0 of the run seed drives burst timing, demand selection and
/// short-term mean draws (including the initial draw for every demand at t = 0);
/// stream 1 + d drives the per-step fluctuation of demand d. Offered traffic is
/// therefore a pure function of (seed, params, demand count), independent of how
/// the network is controlled.
class TrafficGenerator {
public:
    TrafficGenerator(const TrafficParams& params, std::size_t demand_count, std::uint64_t seed);

    /// Draws the next network-wide burst inter-arrival time, mean 1 / (lambda * |D|).
    double sample_burst_interval();

    /// Redraws the short-term mean of one uniformly selected demand as
    /// max(0, N(mu_B, sigma_B)) and schedules the next burst. Returns the demand.
    std::size_t apply_burst();

    /// Applies every burst scheduled at or before t (seconds). Returns how many fired.
    std::size_t advance_to(double t);

    /// h_d = max(0, N(mu_ST_d, sigma_ST)) for every demand.
    std::span<const double> sample_instant_rates();

    std::span<const double> short_term_means() const { return short_term_mean_; }
    std::span<const double> current_rates() const { return rates_; }
    double next_burst_time() const { return next_burst_; }
    std::size_t demand_count() const { return short_term_mean_.size(); }
    const TrafficParams& params() const { return params_; }

private:
    TrafficParams params_;
    Rng burst_rng_;
    std::vector<Rng> demand_rngs_;
    std::vector<double> short_term_mean_;
    std::vector<double> rates_;
    double next_burst_ = 0.0;
};

}  // namespace fatpipe
