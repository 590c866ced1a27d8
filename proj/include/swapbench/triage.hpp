#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swapbench/adapter.hpp"
#include "swapbench/io.hpp"

namespace swapbench {

enum class AlertCategory { SEGV, Spatial, Temporal, Undefined, Leak };

std::string to_string(AlertCategory c);
AlertCategory alert_category_from_string(const std::string& s);

struct SanitizerAlert {
    std::string tool;      // asan | ubsan | lsan | other
    std::string kind;      // normalized report headline, e.g. heap-buffer-overflow
    AlertCategory category = AlertCategory::Undefined;
    std::vector<std::string> top_frames;  // first F symbolized frames, as logged
    std::string dedup_key;                // hash(category, kind, top_frames)
    std::string source;                   // compile | test | fuzz
    std::string first_seen;               // run reference
    bool truncated = false;
    bool category_warning = false;  // kind was unknown, defaulted to Undefined

    bool operator==(const SanitizerAlert&) const = default;
};

constexpr int kDefaultDedupFrames = 3;

std::string make_dedup_key(AlertCategory category, const std::string& kind,
                           const std::vector<std::string>& frames,
                           int frame_depth = kDefaultDedupFrames);

// Fixed taxonomy mapping. Unknown kinds fall through to Undefined and set
// the warning flag on the alert.
AlertCategory categorize_alert(const std::string& kind, const std::string& tool,
                               bool* warned = nullptr);

// Scans a captured log for sanitizer report blocks: ASan-style ==pid==ERROR
// blocks with stack frames, LeakSanitizer leak paragraphs, and single-line
// UBSan runtime errors. Frames are taken as printed; a block cut off by EOF
// yields an alert flagged truncated.
std::vector<SanitizerAlert> parse_sanitizer_logs(const std::string& log,
                                                 const std::string& source,
                                                 const std::string& run_ref,
                                                 int frame_depth = kDefaultDedupFrames);

// One representative per dedup_key (smallest first_seen, ties broken on the
// full serialized alert), output sorted by dedup_key. Idempotent and
// invariant under input shuffles.
std::vector<SanitizerAlert> dedupe_alerts(const std::vector<SanitizerAlert>& alerts);

// s3 = max(0, 100 - sum of penalties); Leak alerts cost penalty * leak_factor.
double compute_s3(const std::vector<SanitizerAlert>& unique_alerts, double penalty_per_alert,
                  double leak_factor = 0.5);

json alert_to_json(const SanitizerAlert& a);
SanitizerAlert alert_from_json(const json& j);

struct FuzzCampaign {
    std::string model_id;
    size_t iterations_used = 0;
    size_t inputs_per_iteration = 0;
    std::map<std::string, size_t> category_counts;
    size_t total = 0;
    std::vector<SanitizerAlert> unique_alerts;
};

// Drives the external fuzzer over the first `max_iterations` valid test
// iterations. For each one: optional patch+build hook, then the fuzzer's
// run command with SWAPBENCH_* env, then log collection and parsing.
// A failing iteration is skipped and reported via `warnings`.
struct FuzzIterationRef {
    size_t index = 0;
    std::vector<std::string> sampled_ids;
};

FuzzCampaign run_fuzz_campaign(
    const FuzzerAdapter& fuzzer, const std::vector<FuzzIterationRef>& valid_iterations,
    size_t max_iterations, size_t budget, const std::filesystem::path& work_dir,
    const std::string& model_id,
    const std::function<bool(const FuzzIterationRef&, std::string& error)>& stage_iteration,
    std::vector<std::string>* warnings = nullptr);

json campaign_to_json(const FuzzCampaign& c);

}  // namespace swapbench
