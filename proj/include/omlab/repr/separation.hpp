#pragma once

#include <vector>

#include "omlab/repr/embeddings.hpp"

namespace omlab::repr {

struct SeparationMetrics {
    // Mean distance between class centroids over the mean within-class
    // distance to the own centroid. A fully degenerate cloud (all embeddings
    // identical) reports 0; perfectly collapsed but distinct classes report
    // +infinity.
    double ratio = 0.0;
    // Leave-one-out nearest-centroid classification accuracy; ties go to the
    // smallest opponent id.
    double accuracy = 0.0;
};

// Requires at least two ids and at least two samples per id (the leave-one-out
// centroid of a singleton class is undefined); throws MetricError otherwise.
SeparationMetrics separation_metrics(const std::vector<EmbeddingSample>& samples);

}  // namespace omlab::repr
