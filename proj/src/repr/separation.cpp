#include "omlab/repr/separation.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "omlab/core/error.hpp"

namespace omlab::repr {

namespace {

double dist(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        acc += d * d;
    }
    return std::sqrt(acc);
}

}  // namespace

SeparationMetrics separation_metrics(const std::vector<EmbeddingSample>& samples) {
    require(!samples.empty(), "separation: empty sample set");
    const std::size_t width = samples[0].z.size();
    require(width > 0, "separation: zero-width embeddings");

    std::map<int, std::vector<const std::vector<double>*>> groups;
    for (const auto& s : samples) {
        require(s.z.size() == width, "separation: ragged latent widths");
        groups[s.opponent_id].push_back(&s.z);
    }
    if (groups.size() < 2)
        throw MetricError("separation: need at least two identities");
    for (const auto& [id, g] : groups)
        if (g.size() < 2)
            throw MetricError("separation: leave-one-out is undefined for singleton id " +
                              std::to_string(id));

    std::map<int, std::vector<double>> centroid;
    for (const auto& [id, g] : groups) {
        std::vector<double> c(width, 0.0);
        for (const auto* z : g)
            for (std::size_t k = 0; k < width; ++k) c[k] += (*z)[k];
        for (auto& v : c) v /= static_cast<double>(g.size());
        centroid[id] = std::move(c);
    }

    double inter = 0.0;
    int pairs = 0;
    for (auto i = centroid.begin(); i != centroid.end(); ++i)
        for (auto j = std::next(i); j != centroid.end(); ++j) {
            inter += dist(i->second, j->second);
            ++pairs;
        }
    inter /= pairs;

    double within = 0.0;
    for (const auto& [id, g] : groups)
        for (const auto* z : g) within += dist(*z, centroid[id]);
    within /= static_cast<double>(samples.size());

    SeparationMetrics out;
    if (within > 0.0)
        out.ratio = inter / within;
    else
        out.ratio = (inter > 0.0) ? std::numeric_limits<double>::infinity() : 0.0;

    // Leave-one-out: a sample's own class centroid is recomputed without it.
    long correct = 0;
    for (const auto& [id, g] : groups) {
        const double m = static_cast<double>(g.size());
        for (const auto* z : g) {
            std::vector<double> loo(width);
            for (std::size_t k = 0; k < width; ++k)
                loo[k] = (centroid[id][k] * m - (*z)[k]) / (m - 1.0);
            int best_id = -1;
            double best_d = std::numeric_limits<double>::infinity();
            for (const auto& [cid, c] : centroid) {
                const double d = (cid == id) ? dist(*z, loo) : dist(*z, c);
                if (d < best_d) {  // ties keep the smaller id (map order)
                    best_d = d;
                    best_id = cid;
                }
            }
            if (best_id == id) ++correct;
        }
    }
    out.accuracy = static_cast<double>(correct) / static_cast<double>(samples.size());
    return out;
}

}  // namespace omlab::repr
