#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "omlab/harness/config.hpp"
#include "omlab/harness/run.hpp"

namespace omlab::harness {

// Mean return and normal-approximation 95% interval across seeds at one
// evaluation point of one pool.
struct SummaryRow {
    std::string method;
    std::string pool;  // train | test
    long long episode = 0;
    int n_seeds = 0;
    double mean = 0.0;
    double ci_half = 0.0;  // 1.96 * s / sqrt(n), sample std; 0 when n < 2
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    bool insufficient_seeds = false;  // single seed: no spread estimate exists
};

// One seed's metrics series, tagged with the method that produced it.
struct SeriesInput {
    std::string method;
    std::uint64_t seed = 0;
    std::vector<MetricsRow> rows;
};

// Groups rows by (method, pool, episode) and summarizes mean_return across
// seeds. Throws UsageError when there is nothing to aggregate.
std::vector<SummaryRow> aggregate(const std::vector<SeriesInput>& series);

// Tidy table for external plotting: step,method,pool,mean,ci_lo,ci_hi.
void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);
// The same table with the bookkeeping fields (n_seeds, insufficient_seeds).
void write_summary_json(const std::string& path, const std::vector<SummaryRow>& rows);

// Expands a base config along one ablation axis:
//   encoder_inputs -> the three sma2c input masks (full / obs+action / obs),
//   discrimination -> omddpg with lambda_disc > 0 vs = 0,
// identical in every other respect. Unknown axes throw UsageError; every
// produced config validates.
std::vector<ExperimentConfig> ablation_matrix(const ExperimentConfig& base,
                                              const std::string& axis);

}  // namespace omlab::harness
