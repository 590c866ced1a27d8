#include "swapbench/scoring.hpp"

#include <algorithm>
#include <stdexcept>

namespace swapbench {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    // Trailing newline insensitivity: "a\nb\n" and "a\nb" are the same lines.
    std::vector<std::string_view> lines;
    size_t start = 0;
    while (start <= text.size()) {
        size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < text.size())
                lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

}  // namespace

size_t compute_delta(const std::string& original, const std::string& modified) {
    std::vector<std::string_view> a = split_lines(original);
    std::vector<std::string_view> b = split_lines(modified);

    // Trim the common prefix and suffix before the quadratic LCS table.
    size_t lo = 0;
    while (lo < a.size() && lo < b.size() && a[lo] == b[lo])
        ++lo;
    size_t ta = a.size(), tb = b.size();
    while (ta > lo && tb > lo && a[ta - 1] == b[tb - 1]) {
        --ta;
        --tb;
    }
    size_t n = ta - lo, m = tb - lo;
    if (n == 0 || m == 0)
        return n + m;

    std::vector<size_t> prev(m + 1, 0), cur(m + 1, 0);
    for (size_t i = 1; i <= n; ++i) {
        for (size_t j = 1; j <= m; ++j) {
            if (a[lo + i - 1] == b[lo + j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    size_t lcs = prev[m];
    return (n - lcs) + (m - lcs);
}

DeltaReport aggregate_delta(const std::string& model_id, const std::vector<DeltaPair>& pairs,
                            double min_threshold) {
    if (pairs.empty())
        throw std::runtime_error("aggregate_delta: no generations to evaluate");
    DeltaReport report;
    report.model_id = model_id;
    size_t total = 0;
    for (const auto& p : pairs) {
        size_t d = compute_delta(p.original, p.modified);
        report.per_function_changed_lines[p.function_id] = d;
        total += d;
    }
    report.d_raw = static_cast<double>(total) / static_cast<double>(pairs.size());
    report.below_threshold = report.d_raw < min_threshold;
    return report;
}

ScoreCard score(const std::string& model_id, double s1, double s2, double s3, double d_raw,
                const ScoreWeights& weights) {
    auto in_range = [](double v) { return v >= 0.0 && v <= 100.0; };
    if (!in_range(s1) || !in_range(s2) || !in_range(s3))
        throw std::runtime_error("raw scores must lie in [0, 100]");
    if (weights.w1 < 0 || weights.w2 < 0 || weights.w3 < 0 || weights.wd < 0)
        throw std::runtime_error("weights must be nonnegative");

    ScoreCard card;
    card.model_id = model_id;
    card.s1 = s1;
    card.s2 = s2;
    card.s3 = s3;
    card.d_raw = d_raw;
    card.weights = weights;
    card.c1 = s1;
    card.c2 = s2 * card.c1 / 100.0;
    card.c3 = s3 * card.c2 / 100.0;
    card.delta_bonus = weights.wd * d_raw;
    card.final_score =
        weights.w1 * card.c1 + weights.w2 * card.c2 + weights.w3 * card.c3 + card.delta_bonus;
    return card;
}

json scorecard_to_json(const ScoreCard& c) {
    return json{
        {"model_id", c.model_id},
        {"s1", c.s1},
        {"s2", c.s2},
        {"s3", c.s3},
        {"c1", c.c1},
        {"c2", c.c2},
        {"c3", c.c3},
        {"d_raw", c.d_raw},
        {"delta_bonus", c.delta_bonus},
        {"weights", {{"w1", c.weights.w1}, {"w2", c.weights.w2}, {"w3", c.weights.w3},
                     {"wd", c.weights.wd}}},
        {"final", c.final_score},
    };
}

}  // namespace swapbench
