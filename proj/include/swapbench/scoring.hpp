#pragma once

#include <map>
#include <string>
#include <vector>

#include "swapbench/io.hpp"

namespace swapbench {

// Changed-line count between two texts under a line-based LCS diff: deleted
// lines plus inserted lines, a replaced line counting as one of each.
// Trailing-newline differences are ignored.
size_t compute_delta(const std::string& original, const std::string& modified);

struct DeltaReport {
    std::string model_id;
    std::map<std::string, size_t> per_function_changed_lines;
    double d_raw = 0.0;  // mean changed lines per evaluated function
    bool below_threshold = false;
};

struct DeltaPair {
    std::string function_id;
    std::string original;
    std::string modified;
};

DeltaReport aggregate_delta(const std::string& model_id, const std::vector<DeltaPair>& pairs,
                            double min_threshold = 1.0);

struct ScoreWeights {
    double w1 = 1.0 / 3.0;
    double w2 = 1.0 / 3.0;
    double w3 = 1.0 / 3.0;
    double wd = 0.1;
};

struct ScoreCard {
    std::string model_id;
    double s1 = 0, s2 = 0, s3 = 0;
    double c1 = 0, c2 = 0, c3 = 0;
    double d_raw = 0;
    ScoreWeights weights;
    double delta_bonus = 0;  // wd * d_raw
    double final_score = 0;
};

// Chained scoring: c1 = s1, c2 = s2*c1/100, c3 = s3*c2/100,
// final = w1*c1 + w2*c2 + w3*c3 + wd*d_raw.
ScoreCard score(const std::string& model_id, double s1, double s2, double s3, double d_raw,
                const ScoreWeights& weights = {});

json scorecard_to_json(const ScoreCard& c);

}  // namespace swapbench
