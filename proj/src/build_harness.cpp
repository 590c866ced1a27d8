#include "swapbench/build_harness.hpp"

#include <atomic>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "swapbench/subprocess.hpp"

namespace swapbench {

namespace {

constexpr const char* kProbeText = ")))) swapbench unrelated-probe syntax error ((((\n";

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

std::string first_diagnostic(const std::string& log) {
    std::istringstream in(log);
    std::string line;
    std::string first_nonempty;
    while (std::getline(in, line)) {
        if (first_nonempty.empty() && line.find_first_not_of(" \t\r") != std::string::npos)
            first_nonempty = line;
        std::string low = line;
        for (char& c : low)
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (low.find("error") != std::string::npos)
            return line.substr(0, 400);
    }
    return first_nonempty.substr(0, 400);
}

}  // namespace

std::string to_string(CompileVerdict v) {
    switch (v) {
    case CompileVerdict::Success: return "success";
    case CompileVerdict::Failure: return "failure";
    case CompileVerdict::Unrelated: return "unrelated";
    }
    return "failure";
}

CompileVerdict compile_verdict_from_string(const std::string& s) {
    if (s == "success") return CompileVerdict::Success;
    if (s == "unrelated") return CompileVerdict::Unrelated;
    return CompileVerdict::Failure;
}

json outcome_to_json(const CompileOutcome& o) {
    json alerts = json::array();
    for (const auto& a : o.alerts)
        alerts.push_back(alert_to_json(a));
    return json{
        {"function_id", o.function_id}, {"verdict", to_string(o.verdict)},
        {"log_excerpt", o.log_excerpt}, {"duration_ms", o.duration_ms},
        {"timed_out", o.timed_out},     {"alerts", alerts},
    };
}

CompileOutcome outcome_from_json(const json& j) {
    CompileOutcome o;
    o.function_id = j.at("function_id").get<std::string>();
    o.verdict = compile_verdict_from_string(j.at("verdict").get<std::string>());
    o.log_excerpt = j.value("log_excerpt", "");
    o.duration_ms = j.value("duration_ms", 0L);
    o.timed_out = j.value("timed_out", false);
    if (j.contains("alerts"))
        for (const auto& a : j["alerts"])
            o.alerts.push_back(alert_from_json(a));
    return o;
}

BaselineBuildReport verify_baseline(const ProjectAdapter& adapter,
                                    const std::filesystem::path& workspace) {
    BaselineBuildReport report;

    if (!adapter.toolchain_cmd.empty()) {
        RunResult tc = run_step(adapter, workspace, adapter.toolchain_cmd, 60);
        if (tc.ok()) {
            std::istringstream in(tc.log);
            std::getline(in, report.toolchain);
        }
    }

    if (!adapter.configure_cmd.empty()) {
        RunResult conf =
            run_step(adapter, workspace, adapter.configure_cmd, adapter.build_timeout_sec);
        report.configure_ms = static_cast<long>(conf.duration.count());
        if (!conf.ok())
            throw std::runtime_error("baseline configure failed for " + adapter.name + ":\n" +
                                     conf.log);
    }

    RunResult build = run_step(adapter, workspace, adapter.build_cmd, adapter.build_timeout_sec);
    report.build_ms = static_cast<long>(build.duration.count());
    if (!build.ok())
        throw std::runtime_error("baseline build failed for " + adapter.name + ":\n" + build.log);
    return report;
}

std::optional<bool> ProbeCache::lookup(const std::string& function_id) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = results_.find(function_id);
    if (it == results_.end())
        return std::nullopt;
    return it->second;
}

void ProbeCache::store(const std::string& function_id, bool unrelated) {
    std::lock_guard<std::mutex> lock(mu_);
    results_[function_id] = unrelated;
}

PatchEntry make_patch_entry(const FunctionRecord& record, std::string replacement_text) {
    PatchEntry e;
    e.function_id = record.id;
    e.file_path = record.file_path;
    e.byte_begin = record.byte_begin;
    e.byte_end = record.byte_end;
    e.original_text = record.source_text;
    e.replacement_text = std::move(replacement_text);
    return e;
}

CompileOutcome classify_compile(const ProjectAdapter& adapter,
                                const std::filesystem::path& workspace, const PatchEntry& entry,
                                ProbeCache& probe_cache) {
    CompileOutcome outcome;
    outcome.function_id = entry.function_id;

    auto probe_unrelated = [&]() -> bool {
        if (auto cached = probe_cache.lookup(entry.function_id))
            return *cached;
        PatchEntry probe = entry;
        probe.replacement_text = kProbeText;
        PatchSet ps = apply_patch(workspace, {probe});
        RunResult r = run_step(adapter, workspace, adapter.build_cmd, adapter.build_timeout_sec);
        revert_patch(ps);
        bool unrelated = r.ok();
        probe_cache.store(entry.function_id, unrelated);
        return unrelated;
    };

    PatchSet ps = apply_patch(workspace, {entry});
    RunResult build = run_step(adapter, workspace, adapter.build_cmd, adapter.build_timeout_sec);
    revert_patch(ps);

    outcome.duration_ms = static_cast<long>(build.duration.count());
    outcome.timed_out = build.timed_out;
    outcome.alerts = parse_sanitizer_logs(build.log, "compile", "compile:" + entry.function_id);

    if (!build.ok()) {
        // A failing build proves the function participates in compilation, so
        // the probe is unnecessary (and would fail too).
        outcome.verdict = CompileVerdict::Failure;
        outcome.log_excerpt = build.timed_out ? "build timeout" : first_diagnostic(build.log);
        probe_cache.store(entry.function_id, false);
        return outcome;
    }

    outcome.verdict = probe_unrelated() ? CompileVerdict::Unrelated : CompileVerdict::Success;
    return outcome;
}

double compute_s1(const std::vector<CompileOutcome>& outcomes) {
    size_t success = 0, failure = 0;
    for (const auto& o : outcomes) {
        if (o.verdict == CompileVerdict::Success)
            ++success;
        else if (o.verdict == CompileVerdict::Failure)
            ++failure;
    }
    if (success + failure == 0)
        throw std::runtime_error(
            "s1 undefined: every outcome is unrelated, no function affects the build");
    return 100.0 * static_cast<double>(success) / static_cast<double>(success + failure);
}

std::vector<CompileOutcome> run_compile_campaign(
    const ProjectAdapter& adapter, const std::filesystem::path& project_root,
    const std::vector<std::pair<FunctionRecord, std::string>>& candidates,
    const std::filesystem::path& scratch_dir, const CompileCampaignOptions& options) {
    int jobs = std::max(1, options.jobs);
    std::vector<std::filesystem::path> workspaces;
    for (int w = 0; w < jobs; ++w) {
        std::filesystem::path ws = prepare_workspace(project_root, scratch_dir);
        verify_baseline(adapter, ws);
        workspaces.push_back(ws);
    }

    std::vector<CompileOutcome> outcomes(candidates.size());
    ProbeCache probe_cache;
    std::atomic<size_t> next{0};
    std::atomic<size_t> done{0};
    std::mutex sink_mu;

    auto integrity_check = [&](const std::filesystem::path& ws) {
        if (!adapter.clean_cmd.empty()) {
            RunResult clean = run_step(adapter, ws, adapter.clean_cmd, adapter.build_timeout_sec);
            if (!clean.ok())
                throw std::runtime_error("integrity clean failed:\n" + clean.log);
        }
        RunResult build = run_step(adapter, ws, adapter.build_cmd, adapter.build_timeout_sec);
        if (!build.ok())
            throw std::runtime_error(
                "full-rebuild integrity check failed — workspace drifted:\n" + build.log);
    };

    auto worker = [&](int worker_idx) {
        const std::filesystem::path& ws = workspaces[static_cast<size_t>(worker_idx)];
        while (true) {
            size_t idx = next.fetch_add(1);
            if (idx >= candidates.size())
                return;
            const auto& [record, replacement] = candidates[idx];
            PatchEntry entry = make_patch_entry(record, replacement);
            outcomes[idx] = classify_compile(adapter, ws, entry, probe_cache);
            if (options.on_outcome) {
                std::lock_guard<std::mutex> lock(sink_mu);
                options.on_outcome(outcomes[idx]);
            }
            size_t completed = done.fetch_add(1) + 1;
            if (options.full_rebuild_every > 0 && completed % options.full_rebuild_every == 0)
                integrity_check(ws);
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
    return outcomes;
}

}  // namespace swapbench
