#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "swapbench/adapter.hpp"
#include "swapbench/build_harness.hpp"
#include "swapbench/corpus.hpp"
#include "swapbench/patcher.hpp"
#include "swapbench/triage.hpp"

namespace swapbench {

struct TestBaseline {
    long total_tests = 0;
    long passed = 0;
    double pass_rate = 0.0;
    std::string log;
};

// Runs the official suite on the pristine workspace and reads the summary
// through the adapter's parser. An unparseable summary is a hard error.
TestBaseline run_baseline_tests(const ProjectAdapter& adapter,
                                const std::filesystem::path& workspace);

// Uniform sample of k ids without replacement, fully determined by seed.
// Ids are sorted internally first so the draw is stable across machines and
// input orderings.
std::vector<std::string> sample_batch(const std::vector<std::string>& success_ids, size_t k,
                                      std::uint64_t seed);

// Default batch size: ~1% of the corpus, at least 1.
size_t default_batch_size(size_t corpus_total);

struct TestIteration {
    size_t iteration_index = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> sampled_ids;
    std::optional<double> pass_rate;  // empty when status == "na"
    std::string status = "ok";        // ok | na
    std::string na_marker;            // why the iteration produced no result
    std::vector<SanitizerAlert> alerts;
    long duration_ms = 0;
};

json iteration_to_json(const TestIteration& it);
TestIteration iteration_from_json(const json& j);

// Patch the sampled batch, rebuild, run the suite, harvest alerts, revert.
// The workspace's sources come back byte-identical. status == "na" when the
// batch fails to build or the suite produces nothing parseable.
TestIteration run_test_iteration(const ProjectAdapter& adapter,
                                 const std::filesystem::path& workspace,
                                 const std::vector<PatchEntry>& entries, size_t iteration_index,
                                 std::uint64_t seed, const std::vector<std::string>& sampled_ids);

enum class NaPolicy { Zero, Exclude };

// s2 = 100 * mean pass rate. Under NaPolicy::Zero an na iteration counts as
// a 0.0 pass rate; under Exclude it is dropped from the mean.
double compute_s2(const std::vector<TestIteration>& iterations,
                  NaPolicy na_policy = NaPolicy::Zero);

struct TestCampaignOptions {
    size_t iterations = 1000;
    size_t batch_size = 0;  // 0 = default_batch_size(corpus_total)
    std::uint64_t master_seed = 0;
    int jobs = 1;
    std::function<void(const TestIteration&)> on_iteration;  // serialized
};

// Runs the full iteration schedule. Sampling is driven only by
// (master_seed, iteration index, success id set), so schedules are
// reproducible and iterations can execute in any order.
std::vector<TestIteration> run_test_campaign(
    const ProjectAdapter& adapter, const std::filesystem::path& project_root,
    const std::vector<FunctionRecord>& corpus_records,
    const std::vector<std::pair<std::string, std::string>>& success_candidates,  // id -> code
    size_t corpus_total, const std::filesystem::path& scratch_dir,
    const TestCampaignOptions& options);

}  // namespace swapbench
