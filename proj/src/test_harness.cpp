#include "swapbench/test_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "swapbench/hash.hpp"
#include "swapbench/subprocess.hpp"

namespace swapbench {

namespace {

RunResult run_step(const ProjectAdapter& adapter, const std::filesystem::path& workspace,
                   const std::string& command, long timeout_sec) {
    RunSpec spec;
    spec.command = command;
    spec.cwd = workspace;
    spec.env = adapter.sanitizer_env;
    spec.timeout = std::chrono::seconds(timeout_sec);
    spec.capture_limit = adapter.log_capture_bytes;
    return run_command(spec);
}

}  // namespace

TestBaseline run_baseline_tests(const ProjectAdapter& adapter,
                                const std::filesystem::path& workspace) {
    if (adapter.test_cmd.empty())
        throw std::runtime_error("adapter " + adapter.name + " has no test_cmd");
    RunResult r = run_step(adapter, workspace, adapter.test_cmd, adapter.test_timeout_sec);
    auto parsed = adapter.test_parser.parse(r.log);
    if (!parsed)
        throw std::runtime_error("baseline test summary unparseable with parser mode '" +
                                 adapter.test_parser.mode + "' (pattern '" +
                                 adapter.test_parser.pattern + "'); log tail:\n" +
                                 r.log.substr(r.log.size() > 2000 ? r.log.size() - 2000 : 0));
    TestBaseline baseline;
    baseline.passed = parsed->first;
    baseline.total_tests = parsed->second;
    baseline.pass_rate = baseline.total_tests > 0 ? static_cast<double>(baseline.passed) /
                                                        static_cast<double>(baseline.total_tests)
                                                  : 0.0;
    baseline.log = r.log;
    return baseline;
}

std::vector<std::string> sample_batch(const std::vector<std::string>& success_ids, size_t k,
                                      std::uint64_t seed) {
    if (k > success_ids.size())
        throw std::runtime_error("batch size " + std::to_string(k) + " exceeds the " +
                                 std::to_string(success_ids.size()) +
                                 " compilable functions; pick a smaller batch");
    std::vector<std::string> pool = success_ids;
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    if (k > pool.size())
        throw std::runtime_error("batch size exceeds distinct compilable functions");

    // Partial Fisher-Yates: positions [0, k) receive the sample.
    SplitMix64 rng(seed);
    for (size_t i = 0; i < k; ++i) {
        size_t j = i + static_cast<size_t>(rng.next_below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

size_t default_batch_size(size_t corpus_total) {
    double k = std::round(0.01 * static_cast<double>(corpus_total));
    return std::max<size_t>(1, static_cast<size_t>(k));
}

json iteration_to_json(const TestIteration& it) {
    json alerts = json::array();
    for (const auto& a : it.alerts)
        alerts.push_back(alert_to_json(a));
    json j{
        {"iteration_index", it.iteration_index},
        {"seed", it.seed},
        {"sampled_ids", it.sampled_ids},
        {"status", it.status},
        {"duration_ms", it.duration_ms},
        {"alerts", alerts},
    };
    if (it.pass_rate)
        j["pass_rate"] = *it.pass_rate;
    else
        j["pass_rate"] = nullptr;
    if (!it.na_marker.empty())
        j["na_marker"] = it.na_marker;
    return j;
}

TestIteration iteration_from_json(const json& j) {
    TestIteration it;
    it.iteration_index = j.at("iteration_index").get<size_t>();
    it.seed = j.at("seed").get<std::uint64_t>();
    it.sampled_ids = j.at("sampled_ids").get<std::vector<std::string>>();
    if (j.contains("pass_rate") && !j["pass_rate"].is_null())
        it.pass_rate = j["pass_rate"].get<double>();
    it.status = j.value("status", "ok");
    it.na_marker = j.value("na_marker", "");
    it.duration_ms = j.value("duration_ms", 0L);
    if (j.contains("alerts"))
        for (const auto& a : j["alerts"])
            it.alerts.push_back(alert_from_json(a));
    return it;
}

TestIteration run_test_iteration(const ProjectAdapter& adapter,
                                 const std::filesystem::path& workspace,
                                 const std::vector<PatchEntry>& entries, size_t iteration_index,
                                 std::uint64_t seed,
                                 const std::vector<std::string>& sampled_ids) {
    TestIteration it;
    it.iteration_index = iteration_index;
    it.seed = seed;
    it.sampled_ids = sampled_ids;
    std::string run_ref = "test-iter" + std::to_string(iteration_index);

    auto started = std::chrono::steady_clock::now();
    PatchSet ps = apply_patch(workspace, entries);

    RunResult build = run_step(adapter, workspace, adapter.build_cmd, adapter.build_timeout_sec);
    auto build_alerts = parse_sanitizer_logs(build.log, "test", run_ref);
    it.alerts.insert(it.alerts.end(), build_alerts.begin(), build_alerts.end());

    if (!build.ok()) {
        it.status = "na";
        it.na_marker = build.timed_out ? "batch build timeout" : "batch build failure";
        revert_patch(ps);
        it.duration_ms = static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                               std::chrono::steady_clock::now() - started)
                                               .count());
        return it;
    }

    RunResult tests = run_step(adapter, workspace, adapter.test_cmd, adapter.test_timeout_sec);
    auto test_alerts = parse_sanitizer_logs(tests.log, "test", run_ref);
    it.alerts.insert(it.alerts.end(), test_alerts.begin(), test_alerts.end());

    if (tests.timed_out) {
        it.status = "na";
        it.na_marker = "suite timeout";
    } else {
        auto parsed = adapter.test_parser.parse(tests.log);
        if (!parsed) {
            it.status = "na";
            it.na_marker = "suite produced no parseable result";
        } else {
            it.status = "ok";
            it.pass_rate = parsed->second > 0 ? static_cast<double>(parsed->first) /
                                                    static_cast<double>(parsed->second)
                                              : 0.0;
        }
    }

    revert_patch(ps);
    it.duration_ms = static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                           std::chrono::steady_clock::now() - started)
                                           .count());
    return it;
}

double compute_s2(const std::vector<TestIteration>& iterations, NaPolicy na_policy) {
    if (iterations.empty())
        throw std::runtime_error("s2 undefined: no test iterations");
    double sum = 0.0;
    size_t counted = 0;
    for (const auto& it : iterations) {
        if (it.status == "na") {
            if (na_policy == NaPolicy::Zero)
                ++counted;  // contributes 0
            continue;
        }
        sum += it.pass_rate.value_or(0.0);
        ++counted;
    }
    if (counted == 0)
        throw std::runtime_error("s2 undefined: every iteration was na under the exclude policy");
    return 100.0 * sum / static_cast<double>(counted);
}

std::vector<TestIteration> run_test_campaign(
    const ProjectAdapter& adapter, const std::filesystem::path& project_root,
    const std::vector<FunctionRecord>& corpus_records,
    const std::vector<std::pair<std::string, std::string>>& success_candidates,
    size_t corpus_total, const std::filesystem::path& scratch_dir,
    const TestCampaignOptions& options) {
    std::map<std::string, const FunctionRecord*> by_id;
    for (const auto& rec : corpus_records)
        by_id[rec.id] = &rec;

    std::map<std::string, std::string> replacement_by_id;
    std::vector<std::string> success_ids;
    for (const auto& [id, code] : success_candidates) {
        if (by_id.count(id) == 0)
            throw std::runtime_error("candidate id not in corpus: " + id);
        replacement_by_id[id] = code;
        success_ids.push_back(id);
    }
    if (success_ids.empty())
        throw std::runtime_error("no compilable candidates to sample from");

    size_t k = options.batch_size > 0 ? options.batch_size : default_batch_size(corpus_total);

    int jobs = std::max(1, options.jobs);
    std::vector<std::filesystem::path> workspaces;
    for (int w = 0; w < jobs; ++w) {
        std::filesystem::path ws = prepare_workspace(project_root, scratch_dir);
        verify_baseline(adapter, ws);
        workspaces.push_back(ws);
    }

    std::vector<TestIteration> iterations(options.iterations);
    std::atomic<size_t> next{0};
    std::mutex sink_mu;

    auto worker = [&](int worker_idx) {
        const std::filesystem::path& ws = workspaces[static_cast<size_t>(worker_idx)];
        while (true) {
            size_t idx = next.fetch_add(1);
            if (idx >= options.iterations)
                return;
            std::uint64_t seed = derive_seed(options.master_seed, idx);
            std::vector<std::string> sampled = sample_batch(success_ids, k, seed);
            std::vector<PatchEntry> entries;
            entries.reserve(sampled.size());
            for (const auto& id : sampled)
                entries.push_back(make_patch_entry(*by_id.at(id), replacement_by_id.at(id)));
            iterations[idx] = run_test_iteration(adapter, ws, entries, idx, seed, sampled);
            if (options.on_iteration) {
                std::lock_guard<std::mutex> lock(sink_mu);
                options.on_iteration(iterations[idx]);
            }
        }
    };

    if (jobs == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w)
            pool.emplace_back(worker, w);
        for (auto& t : pool)
            t.join();
    }
    return iterations;
}

}  // namespace swapbench
