#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "swapbench/adapter.hpp"
#include "swapbench/corpus.hpp"
#include "swapbench/gateway.hpp"
#include "swapbench/patcher.hpp"
#include "swapbench/triage.hpp"

namespace swapbench {

enum class CompileVerdict { Success, Failure, Unrelated };

std::string to_string(CompileVerdict v);
CompileVerdict compile_verdict_from_string(const std::string& s);

struct CompileOutcome {
    std::string function_id;
    CompileVerdict verdict = CompileVerdict::Failure;
    std::string log_excerpt;  // first diagnostic line, empty on success
    long duration_ms = 0;
    bool timed_out = false;
    std::vector<SanitizerAlert> alerts;  // harvested from the build log
};

json outcome_to_json(const CompileOutcome& o);
CompileOutcome outcome_from_json(const json& j);

struct BaselineBuildReport {
    std::string toolchain;
    long configure_ms = 0;
    long build_ms = 0;
};

// Configure + build the pristine tree with the sanitizer environment.
// Failure aborts the campaign; nothing downstream makes sense without it.
BaselineBuildReport verify_baseline(const ProjectAdapter& adapter,
                                    const std::filesystem::path& workspace);

// Remembers which functions the syntax-error probe proved unable to affect
// the build. Shared across workers; probing is idempotent so races are
// harmless beyond duplicate work.
class ProbeCache {
public:
    std::optional<bool> lookup(const std::string& function_id);
    void store(const std::string& function_id, bool unrelated);

private:
    std::mutex mu_;
    std::map<std::string, bool> results_;
};

PatchEntry make_patch_entry(const FunctionRecord& record, std::string replacement_text);

// One verdict for one candidate. Applies the entry, rebuilds, reverts; a
// successful build additionally runs the unrelated probe (cached): if a
// guaranteed syntax error in place of the function still builds, the verdict
// is Unrelated no matter the candidate.
CompileOutcome classify_compile(const ProjectAdapter& adapter,
                                const std::filesystem::path& workspace,
                                const PatchEntry& entry, ProbeCache& probe_cache);

// s1 = 100 * |Success| / (|Success| + |Failure|); Unrelated excluded.
// Throws when every outcome is Unrelated.
double compute_s1(const std::vector<CompileOutcome>& outcomes);

struct CompileCampaignOptions {
    int jobs = 1;
    size_t full_rebuild_every = 500;  // periodic clean-build integrity check
    std::function<void(const CompileOutcome&)> on_outcome;  // serialized
};

// Evaluates each (record, candidate) pair in its own workspace slot. Outcomes
// come back in input order.
std::vector<CompileOutcome> run_compile_campaign(
    const ProjectAdapter& adapter, const std::filesystem::path& project_root,
    const std::vector<std::pair<FunctionRecord, std::string>>& candidates,
    const std::filesystem::path& scratch_dir, const CompileCampaignOptions& options = {});

}  // namespace swapbench
