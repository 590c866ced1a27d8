#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "swapbench/scoring.hpp"
#include "swapbench/test_harness.hpp"
#include "swapbench/triage.hpp"

namespace swapbench {

struct ReportInputs {
    std::vector<ScoreCard> scorecards;
    // per-model iteration history for the heatmaps
    std::map<std::string, std::vector<TestIteration>> iterations;
    // per-model unique alerts, for the per-category tallies
    std::map<std::string, std::vector<SanitizerAlert>> alerts;
    // inputs' digests, seeds and config echoed into run-manifest.json
    json manifest_extra = json::object();
};

// Writes report/leaderboard.md, report/leaderboard.json, one
// heatmap.<model>.svg per model with iteration data, and
// report/run-manifest.json. Models are ranked by final score.
void emit_report(const ReportInputs& inputs, const std::filesystem::path& out_dir);

// Exposed for tests: the SVG cell fill for a pass rate, and the distinct
// N/A fill.
std::string heatmap_color(double pass_rate);
extern const char* kHeatmapNaColor;

std::string render_heatmap_svg(const std::string& model_id,
                               const std::vector<TestIteration>& iterations);

}  // namespace swapbench
