#include "omlab/harness/aggregate.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <tuple>

#include "json.hpp"
#include "omlab/core/error.hpp"

namespace omlab::harness {

std::vector<SummaryRow> aggregate(const std::vector<SeriesInput>& series) {
    if (series.empty()) throw UsageError("aggregate: no series given");

    std::map<std::tuple<std::string, std::string, long long>, std::vector<double>> groups;
    for (const SeriesInput& s : series)
        for (const MetricsRow& row : s.rows)
            groups[{s.method, row.pool, row.episode}].push_back(row.mean_return);
    if (groups.empty()) throw UsageError("aggregate: the series carry no metrics rows");

    std::vector<SummaryRow> out;
    out.reserve(groups.size());
    for (const auto& [key, vals] : groups) {
        SummaryRow row;
        std::tie(row.method, row.pool, row.episode) = key;
        const int n = static_cast<int>(vals.size());
        row.n_seeds = n;
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= n;
        row.mean = mean;
        if (n >= 2) {
            double ss = 0.0;
            for (double v : vals) ss += (v - mean) * (v - mean);
            row.ci_half = 1.96 * std::sqrt(ss / (n - 1)) / std::sqrt(double(n));
        } else {
            row.ci_half = 0.0;  // a single seed has no spread estimate
            row.insufficient_seeds = true;
        }
        row.ci_lo = row.mean - row.ci_half;
        row.ci_hi = row.mean + row.ci_half;
        out.push_back(std::move(row));
    }
    return out;  // map order: by method, then pool, then episode
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
    std::ofstream out(path);
    if (!out) throw DataError("summary: cannot open '" + path + "' for writing");
    out << "step,method,pool,mean,ci_lo,ci_hi\n" << std::setprecision(17);
    for (const SummaryRow& r : rows)
        out << r.episode << ',' << r.method << ',' << r.pool << ',' << r.mean << ',' << r.ci_lo
            << ',' << r.ci_hi << '\n';
    if (!out) throw DataError("summary: write to '" + path + "' failed");
}

void write_summary_json(const std::string& path, const std::vector<SummaryRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const SummaryRow& r : rows)
        arr.push_back({{"step", r.episode},
                       {"method", r.method},
                       {"pool", r.pool},
                       {"n_seeds", r.n_seeds},
                       {"mean", r.mean},
                       {"ci_half", r.ci_half},
                       {"ci_lo", r.ci_lo},
                       {"ci_hi", r.ci_hi},
                       {"insufficient_seeds", r.insufficient_seeds}});
    std::ofstream out(path);
    if (!out) throw DataError("summary: cannot open '" + path + "' for writing");
    out << arr.dump(2) << '\n';
    if (!out) throw DataError("summary: write to '" + path + "' failed");
}

std::vector<ExperimentConfig> ablation_matrix(const ExperimentConfig& base,
                                              const std::string& axis) {
    if (axis == "encoder_inputs") {
        if (!method_is_sma2c(base.method))
            throw UsageError("ablate: encoder_inputs expects an sma2c-family base config");
        std::vector<ExperimentConfig> out(3, base);
        out[0].method = Method::kSma2c;
        out[1].method = Method::kSma2cObsAction;
        out[2].method = Method::kSma2cObsOnly;
        for (const ExperimentConfig& c : out) validate(c);
        return out;
    }
    if (axis == "discrimination") {
        if (method_is_sma2c(base.method))
            throw UsageError("ablate: discrimination expects an omddpg-family base config");
        std::vector<ExperimentConfig> out(2, base);
        out[0].method = Method::kOmddpg;
        out[0].vae.lambda_disc = base.vae.lambda_disc > 0.0 ? base.vae.lambda_disc : 1.0;
        out[1].method = Method::kOmddpgNoDisc;
        out[1].vae.lambda_disc = 0.0;
        for (const ExperimentConfig& c : out) validate(c);
        return out;
    }
    throw UsageError("ablate: unknown axis '" + axis + "' (encoder_inputs | discrimination)");
}

}  // namespace omlab::harness
