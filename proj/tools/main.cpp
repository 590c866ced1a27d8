// swapbench — turns a C/C++ project into a live LLM coding benchmark.
//
// Pipeline: extract -> generate -> compile -> test -> triage -> score.
// Each stage reads and writes plain JSONL artifacts so runs can be resumed,
// inspected and re-scored without re-running earlier stages.

#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "swapbench/build_harness.hpp"
#include "swapbench/corpus.hpp"
#include "swapbench/gateway.hpp"
#include "swapbench/hash.hpp"
#include "swapbench/io.hpp"
#include "swapbench/patcher.hpp"
#include "swapbench/report.hpp"
#include "swapbench/scoring.hpp"
#include "swapbench/subprocess.hpp"
#include "swapbench/test_harness.hpp"
#include "swapbench/triage.hpp"

using namespace swapbench;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string detect_commit(const std::filesystem::path& project_root) {
    RunSpec spec;
    spec.command = "git rev-parse HEAD 2>/dev/null";
    spec.cwd = project_root;
    spec.timeout = std::chrono::seconds(10);
    RunResult r = run_command(spec);
    if (!r.ok())
        return "";
    std::string line = r.log;
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r'))
        line.pop_back();
    return line;
}

std::vector<GenerationResult> load_generations(const std::filesystem::path& path) {
    std::vector<GenerationResult> out;
    for (const auto& row : read_jsonl(path))
        out.push_back(generation_from_json(row));
    return out;
}

std::vector<CompileOutcome> load_outcomes(const std::filesystem::path& path) {
    std::vector<CompileOutcome> out;
    for (const auto& row : read_jsonl(path))
        out.push_back(outcome_from_json(row));
    return out;
}

std::vector<TestIteration> load_iterations(const std::filesystem::path& path) {
    std::vector<TestIteration> out;
    for (const auto& row : read_jsonl(path))
        out.push_back(iteration_from_json(row));
    return out;
}

PromptTemplate resolve_template(const std::string& system_file, const std::string& user_file,
                                bool contamination) {
    if (!system_file.empty() && !user_file.empty())
        return load_template(system_file, user_file);
    if (!system_file.empty() || !user_file.empty())
        throw std::runtime_error("--system-template and --user-template go together");
    return contamination ? default_contamination_template() : default_improve_template();
}

std::unique_ptr<ModelBackend> make_backend(const std::string& backend,
                                           const std::string& recordings,
                                           const std::string& backend_config) {
    if (backend == "replay") {
        if (recordings.empty())
            throw std::runtime_error("replay backend needs --recordings <dir>");
        return std::make_unique<ReplayBackend>(recordings);
    }
    if (backend == "live") {
        if (backend_config.empty())
            throw std::runtime_error("live backend needs --backend-config <file>");
        return std::make_unique<LiveBackend>(load_live_backend_config(backend_config));
    }
    throw std::runtime_error("unknown backend '" + backend + "' (use live or replay)");
}

int run(int argc, char** argv) {
    CLI::App app{"swapbench — function-swap benchmark harness for LLM code"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // ---- extract ----
    auto* extract = app.add_subcommand("extract", "Extract the function corpus from a project");
    std::string ex_project, ex_out, ex_name, ex_commit;
    ExtractionConfig ex_config;
    extract->add_option("--project", ex_project, "Project root directory")->required();
    extract->add_option("--out", ex_out, "Corpus store directory")->required();
    extract->add_option("--min-tokens", ex_config.min_tokens, "Minimum token count")
        ->default_val(10);
    extract->add_option("--max-tokens", ex_config.max_tokens, "Maximum token count")
        ->default_val(256);
    extract->add_option("--exclude", ex_config.exclude_globs,
                        "Glob of relative paths to skip (repeatable)");
    extract->add_option("--extensions", ex_config.extensions, "File extensions to scan");
    extract->add_option("--jobs", ex_config.jobs, "Parallel extraction workers")->default_val(1);
    extract->add_option("--project-name", ex_name, "Label stored in the manifest");
    extract->add_option("--commit", ex_commit, "VCS revision (default: git rev-parse HEAD)");

    // ---- generate ----
    auto* generate_cmd = app.add_subcommand("generate", "Query a model for candidate rewrites");
    std::string g_corpus, g_model, g_backend = "replay", g_out, g_recordings, g_backend_config;
    std::string g_system_tmpl, g_user_tmpl;
    std::uint64_t g_seed = 0;
    int g_in_flight = 1, g_retries = 3;
    generate_cmd->add_option("--corpus", g_corpus, "Corpus store directory")->required();
    generate_cmd->add_option("--model", g_model, "Model label")->required();
    generate_cmd->add_option("--backend", g_backend, "live | replay")->default_val("replay");
    generate_cmd->add_option("--recordings", g_recordings, "Replay recordings directory");
    generate_cmd->add_option("--backend-config", g_backend_config, "Live backend JSON config");
    generate_cmd->add_option("--seed", g_seed, "Generation seed")->default_val(0);
    generate_cmd->add_option("--out", g_out, "generations.jsonl path")->required();
    generate_cmd->add_option("--system-template", g_system_tmpl, "System prompt file");
    generate_cmd->add_option("--user-template", g_user_tmpl, "User prompt template file");
    generate_cmd->add_option("--in-flight", g_in_flight, "Concurrent requests")->default_val(1);
    generate_cmd->add_option("--retries", g_retries, "Transport retry limit")->default_val(3);

    // ---- probe ----
    auto* probe = app.add_subcommand("probe", "Contamination probe for one function");
    std::string p_corpus, p_function, p_keyword = "php", p_backend = "replay";
    std::string p_recordings, p_backend_config, p_model = "probe";
    probe->add_option("--corpus", p_corpus, "Corpus store directory")->required();
    probe->add_option("--function", p_function, "Function id or name")->required();
    probe->add_option("--keyword", p_keyword, "Recognition keyword")->capture_default_str();
    probe->add_option("--backend", p_backend, "live | replay")->default_val("replay");
    probe->add_option("--recordings", p_recordings, "Replay recordings directory");
    probe->add_option("--backend-config", p_backend_config, "Live backend JSON config");
    probe->add_option("--model", p_model, "Model label for the lookup");

    // ---- patch ----
    auto* patch = app.add_subcommand("patch", "Apply or revert a patch plan in a workspace");
    std::string pa_workspace, pa_plan, pa_journal;
    bool pa_revert = false;
    patch->add_option("--workspace", pa_workspace, "Workspace directory")->required();
    patch->add_option("--plan", pa_plan, "plan.jsonl of patch entries");
    patch->add_option("--journal", pa_journal, "Journal path (default <workspace>/.swapbench-journal.jsonl)");
    patch->add_flag("--revert", pa_revert, "Revert using the journal");

    // ---- compile ----
    auto* compile = app.add_subcommand("compile", "Metric I: per-function compilability");
    std::string c_adapter, c_project, c_corpus, c_generations, c_out, c_scratch;
    int c_jobs = 1;
    size_t c_full_every = 500;
    compile->add_option("--adapter", c_adapter, "Project adapter JSON")->required();
    compile->add_option("--project", c_project, "Pristine project checkout")->required();
    compile->add_option("--corpus", c_corpus, "Corpus store directory")->required();
    compile->add_option("--generations", c_generations, "generations.jsonl")->required();
    compile->add_option("--out", c_out, "outcomes.jsonl path")->required();
    compile->add_option("--jobs", c_jobs, "Parallel build workspaces")->default_val(1);
    compile->add_option("--scratch", c_scratch, "Scratch directory for workspaces");
    compile->add_option("--full-rebuild-every", c_full_every,
                        "Clean-build integrity check cadence")->default_val(500);


    // ---- test ----
    auto* test = app.add_subcommand("test", "Metric II: sampled functional test iterations");
    std::string t_adapter, t_project, t_corpus, t_generations, t_outcomes, t_out, t_scratch;
    std::string t_batch = "auto", t_na_policy = "zero", t_baseline_out;
    size_t t_iterations = 1000;
    std::uint64_t t_master_seed = 0;
    int t_jobs = 1;
    test->add_option("--adapter", t_adapter, "Project adapter JSON")->required();
    test->add_option("--project", t_project, "Pristine project checkout")->required();
    test->add_option("--corpus", t_corpus, "Corpus store directory")->required();
    test->add_option("--generations", t_generations, "generations.jsonl")->required();
    test->add_option("--outcomes", t_outcomes, "outcomes.jsonl from compile")->required();
    test->add_option("--iterations", t_iterations, "Iteration count")->default_val(1000);
    test->add_option("--batch-size", t_batch, "Batch size or 'auto' (~1% of corpus)");
    test->add_option("--master-seed", t_master_seed, "Master seed")->default_val(0);
    test->add_option("--out", t_out, "iterations.jsonl path")->required();
    test->add_option("--baseline-out", t_baseline_out, "Baseline report JSON path");
    test->add_option("--jobs", t_jobs, "Parallel workspaces")->default_val(1);
    test->add_option("--scratch", t_scratch, "Scratch directory for workspaces");
    test->add_option("--na-policy", t_na_policy, "zero | exclude")->default_val("zero");

    // ---- triage ----
    auto* triage = app.add_subcommand("triage", "Metric III: pool, dedupe and score alerts");
    std::string tr_logs, tr_outcomes, tr_iterations, tr_out;
    double tr_penalty = 0.69, tr_leak = 0.5;
    std::string tr_source = "test";
    triage->add_option("--logs", tr_logs, "Directory of raw logs to scan");
    triage->add_option("--source", tr_source, "Source tag for --logs alerts")
        ->default_val("test");
    triage->add_option("--outcomes", tr_outcomes, "outcomes.jsonl with embedded alerts");
    triage->add_option("--iterations", tr_iterations, "iterations.jsonl with embedded alerts");
    triage->add_option("--penalty", tr_penalty, "Deduction per unique alert")->default_val(0.69);
    triage->add_option("--leak-factor", tr_leak, "Leak deduction factor")->default_val(0.5);
    triage->add_option("--out", tr_out, "alerts.jsonl (unique set)")->required();

    // ---- fuzz ----
    auto* fuzz = app.add_subcommand("fuzz", "Extended fuzzing campaign bookkeeping");
    std::string f_fuzzer, f_adapter, f_project, f_corpus, f_generations, f_iter_file, f_out;
    std::string f_work, f_model = "unknown";
    size_t f_max_iters = 500, f_budget = 50000;
    fuzz->add_option("--fuzzer", f_fuzzer, "Fuzzer adapter JSON")->required();
    fuzz->add_option("--adapter", f_adapter, "Project adapter JSON (full mode)");
    fuzz->add_option("--project", f_project, "Pristine checkout (full mode)");
    fuzz->add_option("--corpus", f_corpus, "Corpus store (full mode)");
    fuzz->add_option("--generations", f_generations, "generations.jsonl (full mode)");
    fuzz->add_option("--iterations-file", f_iter_file, "iterations.jsonl from test")->required();
    fuzz->add_option("--iterations", f_max_iters, "Valid iterations to fuzz")->default_val(500);
    fuzz->add_option("--budget", f_budget, "Mutated inputs per iteration")->default_val(50000);
    fuzz->add_option("--work-dir", f_work, "Campaign working directory");
    fuzz->add_option("--model", f_model, "Model label for the campaign");
    fuzz->add_option("--out", f_out, "campaign.json path")->required();

    // ---- score ----
    auto* score_cmd = app.add_subcommand("score", "Chained scores, leaderboard and heatmap");
    std::string s_outcomes, s_iterations, s_alerts, s_generations, s_corpus, s_out;
    std::string s_weights = "1/3,1/3,1/3", s_na_policy = "zero";
    double s_wd = 0.1, s_penalty = 0.69, s_leak = 0.5, s_min_delta = 1.0;
    score_cmd->add_option("--outcomes", s_outcomes, "outcomes.jsonl")->required();
    score_cmd->add_option("--iterations", s_iterations, "iterations.jsonl")->required();
    score_cmd->add_option("--alerts", s_alerts, "alerts.jsonl (unique set)")->required();
    score_cmd->add_option("--generations", s_generations, "generations.jsonl")->required();
    score_cmd->add_option("--corpus", s_corpus, "Corpus store directory")->required();
    score_cmd->add_option("--weights", s_weights, "w1,w2,w3 (default 1/3 each)");
    score_cmd->add_option("--wd", s_wd, "Dissimilarity weight")->default_val(0.1);
    score_cmd->add_option("--penalty", s_penalty, "Deduction per unique alert")
        ->default_val(0.69);
    score_cmd->add_option("--leak-factor", s_leak, "Leak deduction factor")->default_val(0.5);
    score_cmd->add_option("--min-delta", s_min_delta, "Dissimilarity exclusion threshold")
        ->default_val(1.0);
    score_cmd->add_option("--na-policy", s_na_policy, "zero | exclude")->default_val("zero");
    score_cmd->add_option("--out", s_out, "Report output directory")->required();

    CLI11_PARSE(app, argc, argv);

    if (extract->parsed()) {
        std::vector<std::string> warnings;
        CorpusSnapshot snapshot = extract_functions(ex_project, ex_config, &warnings);
        snapshot.project_name =
            ex_name.empty() ? std::filesystem::path(ex_project).filename().string() : ex_name;
        snapshot.commit_id = ex_commit.empty() ? detect_commit(ex_project) : ex_commit;
        for (const auto& w : warnings)
            std::cerr << "warning: " << w << "\n";
        save_corpus(snapshot, ex_out);
        std::cout << "extracted " << snapshot.stats.functions_found << " functions, retained "
                  << snapshot.records.size() << " within [" << ex_config.min_tokens << ", "
                  << ex_config.max_tokens << "] tokens, filtered "
                  << snapshot.stats.functions_filtered << "\n";
        std::cout << "store: " << ex_out << "\n";
        return 0;
    }

    if (generate_cmd->parsed()) {
        CorpusSnapshot snapshot = load_corpus(g_corpus);
        PromptTemplate tmpl = resolve_template(g_system_tmpl, g_user_tmpl, false);
        auto backend = make_backend(g_backend, g_recordings, g_backend_config);

        std::vector<PromptRequest> requests;
        requests.reserve(snapshot.records.size());
        for (const auto& rec : snapshot.records)
            requests.push_back(render_prompt(rec, tmpl, g_model, g_seed));

        std::vector<GenerationResult> results =
            generate_batch(requests, *backend, g_in_flight, g_retries);

        JsonlWriter writer(g_out);
        size_t ok = 0, unparseable = 0, backend_error = 0;
        for (const auto& r : results) {
            writer.append(generation_to_json(r));
            if (r.status == GenerationStatus::Ok)
                ++ok;
            else if (r.status == GenerationStatus::Unparseable)
                ++unparseable;
            else
                ++backend_error;
        }
        writer.flush();
        std::cout << "generated " << results.size() << " results: " << ok << " ok, "
                  << unparseable << " unparseable, " << backend_error << " backend_error\n";
        return 0;
    }

    if (probe->parsed()) {
        CorpusSnapshot snapshot = load_corpus(p_corpus);
        const FunctionRecord* target = nullptr;
        for (const auto& rec : snapshot.records)
            if (rec.id == p_function || rec.name == p_function) {
                target = &rec;
                break;
            }
        if (target == nullptr)
            throw std::runtime_error("function not found in corpus: " + p_function);
        auto backend = make_backend(p_backend, p_recordings, p_backend_config);
        PromptTemplate tmpl = resolve_template("", "", true);
        PromptRequest req = render_prompt(*target, tmpl, p_model, 0);
        BackendReply reply = backend->generate_raw(req);
        if (!reply.ok)
            throw std::runtime_error("probe backend error: " + reply.error);
        ProbeResult pr;
        pr.answer = reply.text;
        std::string lower_answer = reply.text, lower_kw = p_keyword;
        for (char& ch : lower_answer) ch = static_cast<char>(std::tolower((unsigned char)ch));
        for (char& ch : lower_kw) ch = static_cast<char>(std::tolower((unsigned char)ch));
        pr.recognized = lower_answer.find(lower_kw) != std::string::npos;
        std::cout << json{{"function_id", target->id},
                          {"name", target->name},
                          {"recognized", pr.recognized},
                          {"answer", pr.answer}}
                         .dump(2)
                  << "\n";
        return 0;
    }

    if (patch->parsed()) {
        std::filesystem::path journal =
            pa_journal.empty() ? std::filesystem::path(pa_workspace) / ".swapbench-journal.jsonl"
                               : std::filesystem::path(pa_journal);
        if (pa_revert) {
            PatchSet ps = read_patch_journal(journal);
            revert_patch(ps);
            write_patch_journal(ps, journal);
            std::cout << "reverted " << ps.entries.size() << " entries in " << pa_workspace
                      << "\n";
            return 0;
        }
        if (pa_plan.empty())
            throw std::runtime_error("patch needs --plan (or --revert)");
        std::vector<PatchEntry> entries;
        for (const auto& row : read_jsonl(pa_plan)) {
            PatchEntry e;
            e.function_id = row.at("function_id").get<std::string>();
            e.file_path = row.at("file_path").get<std::string>();
            e.byte_begin = row.at("byte_begin").get<size_t>();
            e.byte_end = row.at("byte_end").get<size_t>();
            e.original_text = row.at("original_text").get<std::string>();
            e.replacement_text = row.at("replacement_text").get<std::string>();
            entries.push_back(std::move(e));
        }
        PatchSet ps = apply_patch(pa_workspace, entries);
        write_patch_journal(ps, journal);
        std::cout << "applied " << entries.size() << " entries; journal: " << journal << "\n";
        return 0;
    }

    if (compile->parsed()) {
        ProjectAdapter adapter = load_project_adapter(c_adapter);
        CorpusSnapshot snapshot = load_corpus(c_corpus);
        std::map<std::string, const FunctionRecord*> by_id;
        for (const auto& rec : snapshot.records)
            by_id[rec.id] = &rec;

        std::vector<std::pair<FunctionRecord, std::string>> candidates;
        for (const auto& g : load_generations(c_generations)) {
            if (g.status != GenerationStatus::Ok)
                continue;
            auto it = by_id.find(g.function_id);
            if (it == by_id.end()) {
                std::cerr << "warning: generation for unknown function " << g.function_id
                          << " skipped\n";
                continue;
            }
            candidates.emplace_back(*it->second, *g.extracted_code);
        }
        if (candidates.empty())
            throw std::runtime_error("no usable generations (status ok) to compile");

        std::filesystem::path scratch =
            c_scratch.empty() ? std::filesystem::temp_directory_path() / "swapbench-compile"
                              : std::filesystem::path(c_scratch);

        JsonlWriter writer(c_out);
        CompileCampaignOptions options;
        options.jobs = c_jobs;
        options.full_rebuild_every = c_full_every;
        options.on_outcome = [&](const CompileOutcome& o) {
            writer.append(outcome_to_json(o));
            writer.flush();
        };
        std::vector<CompileOutcome> outcomes =
            run_compile_campaign(adapter, c_project, candidates, scratch, options);

        size_t success = 0, failure = 0, unrelated = 0;
        for (const auto& o : outcomes) {
            if (o.verdict == CompileVerdict::Success) ++success;
            else if (o.verdict == CompileVerdict::Failure) ++failure;
            else ++unrelated;
        }
        std::cout << "outcomes: " << success << " success, " << failure << " failure, "
                  << unrelated << " unrelated\n";
        try {
            std::cout << "s1 = " << compute_s1(outcomes) << "\n";
        } catch (const std::exception& e) {
            std::cout << "s1 undefined: " << e.what() << "\n";
        }
        return 0;
    }

    if (test->parsed()) {
        ProjectAdapter adapter = load_project_adapter(t_adapter);
        CorpusSnapshot snapshot = load_corpus(t_corpus);

        std::map<std::string, std::string> code_by_id;
        for (const auto& g : load_generations(t_generations))
            if (g.status == GenerationStatus::Ok)
                code_by_id[g.function_id] = *g.extracted_code;

        std::vector<std::pair<std::string, std::string>> success_candidates;
        for (const auto& o : load_outcomes(t_outcomes))
            if (o.verdict == CompileVerdict::Success && code_by_id.count(o.function_id))
                success_candidates.emplace_back(o.function_id, code_by_id[o.function_id]);

        std::filesystem::path scratch =
            t_scratch.empty() ? std::filesystem::temp_directory_path() / "swapbench-test"
                              : std::filesystem::path(t_scratch);

        // Baseline first; it also validates the adapter's log parser.
        std::filesystem::path baseline_ws = prepare_workspace(t_project, scratch);
        verify_baseline(adapter, baseline_ws);
        TestBaseline baseline = run_baseline_tests(adapter, baseline_ws);
        std::cout << "baseline: " << baseline.passed << "/" << baseline.total_tests
                  << " passed (rate " << baseline.pass_rate << ")\n";
        if (!t_baseline_out.empty())
            write_file(t_baseline_out, json{{"total_tests", baseline.total_tests},
                                            {"passed", baseline.passed},
                                            {"pass_rate", baseline.pass_rate}}
                                               .dump(2) +
                                           "\n");

        TestCampaignOptions options;
        options.iterations = t_iterations;
        options.master_seed = t_master_seed;
        options.jobs = t_jobs;
        if (t_batch != "auto")
            options.batch_size = std::stoul(t_batch);

        JsonlWriter writer(t_out);
        options.on_iteration = [&](const TestIteration& it) {
            writer.append(iteration_to_json(it));
            writer.flush();
        };

        std::vector<TestIteration> iterations =
            run_test_campaign(adapter, t_project, snapshot.records, success_candidates,
                              snapshot.records.size(), scratch, options);

        NaPolicy policy = t_na_policy == "exclude" ? NaPolicy::Exclude : NaPolicy::Zero;
        std::cout << "s2 = " << compute_s2(iterations, policy) << "\n";
        return 0;
    }

    if (triage->parsed()) {
        std::vector<SanitizerAlert> pooled;
        if (!tr_logs.empty()) {
            std::vector<std::filesystem::path> files;
            for (const auto& e : std::filesystem::directory_iterator(tr_logs))
                if (e.is_regular_file())
                    files.push_back(e.path());
            std::sort(files.begin(), files.end());
            for (const auto& f : files) {
                auto found =
                    parse_sanitizer_logs(read_file(f), tr_source, f.filename().string());
                pooled.insert(pooled.end(), found.begin(), found.end());
            }
        }
        if (!tr_outcomes.empty())
            for (const auto& o : load_outcomes(tr_outcomes))
                pooled.insert(pooled.end(), o.alerts.begin(), o.alerts.end());
        if (!tr_iterations.empty())
            for (const auto& it : load_iterations(tr_iterations))
                pooled.insert(pooled.end(), it.alerts.begin(), it.alerts.end());

        std::vector<SanitizerAlert> unique = dedupe_alerts(pooled);
        JsonlWriter writer(tr_out);
        for (const auto& a : unique)
            writer.append(alert_to_json(a));
        writer.flush();

        std::map<std::string, size_t> counts;
        for (const auto& a : unique)
            ++counts[to_string(a.category)];
        std::cout << "unique alerts: " << unique.size() << " (from " << pooled.size()
                  << " raw)\n";
        for (const auto& [cat, n] : counts)
            std::cout << "  " << cat << ": " << n << "\n";
        std::cout << "s3 = " << compute_s3(unique, tr_penalty, tr_leak) << "\n";
        return 0;
    }

    if (fuzz->parsed()) {
        FuzzerAdapter fuzzer = load_fuzzer_adapter(f_fuzzer);
        std::vector<FuzzIterationRef> valid;
        for (const auto& it : load_iterations(f_iter_file))
            if (it.status == "ok")
                valid.push_back({it.iteration_index, it.sampled_ids});

        std::filesystem::path work =
            f_work.empty() ? std::filesystem::temp_directory_path() / "swapbench-fuzz"
                           : std::filesystem::path(f_work);

        std::function<bool(const FuzzIterationRef&, std::string&)> stage;
        std::unique_ptr<ProjectAdapter> adapter;
        std::filesystem::path fuzz_ws;
        CorpusSnapshot snapshot;
        std::map<std::string, const FunctionRecord*> by_id;
        std::map<std::string, std::string> code_by_id;
        if (!f_adapter.empty()) {
            if (f_project.empty() || f_corpus.empty() || f_generations.empty())
                throw std::runtime_error(
                    "full mode needs --adapter, --project, --corpus and --generations");
            adapter = std::make_unique<ProjectAdapter>(load_project_adapter(f_adapter));
            snapshot = load_corpus(f_corpus);
            for (const auto& rec : snapshot.records)
                by_id[rec.id] = &rec;
            for (const auto& g : load_generations(f_generations))
                if (g.status == GenerationStatus::Ok)
                    code_by_id[g.function_id] = *g.extracted_code;
            fuzz_ws = prepare_workspace(f_project, work);
            verify_baseline(*adapter, fuzz_ws);
            fuzzer.env["SWAPBENCH_WORKSPACE"] = fuzz_ws.string();

            stage = [&](const FuzzIterationRef& ref, std::string& error) {
                std::vector<PatchEntry> entries;
                for (const auto& id : ref.sampled_ids) {
                    auto r = by_id.find(id);
                    auto c = code_by_id.find(id);
                    if (r == by_id.end() || c == code_by_id.end()) {
                        error = "iteration references unknown candidate " + id;
                        return false;
                    }
                    entries.push_back(make_patch_entry(*r->second, c->second));
                }
                try {
                    PatchSet ps = apply_patch(fuzz_ws, entries);
                    RunSpec spec;
                    spec.command = adapter->build_cmd;
                    spec.cwd = fuzz_ws;
                    spec.env = adapter->sanitizer_env;
                    spec.timeout = std::chrono::seconds(adapter->build_timeout_sec);
                    RunResult r = run_command(spec);
                    if (!r.ok()) {
                        revert_patch(ps);
                        error = "batch rebuild failed";
                        return false;
                    }
                    // leave patched+built for the fuzzer run; revert happens on
                    // the next stage call via journal
                    write_patch_journal(ps, fuzz_ws / ".swapbench-journal.jsonl");
                    return true;
                } catch (const std::exception& e) {
                    error = e.what();
                    return false;
                }
            };
        }

        std::vector<std::string> warnings;
        FuzzCampaign campaign;
        if (stage) {
            // Wrap staging so each iteration reverts the previous one first.
            auto staged = [&](const FuzzIterationRef& ref, std::string& error) {
                std::filesystem::path journal = fuzz_ws / ".swapbench-journal.jsonl";
                if (std::filesystem::exists(journal)) {
                    PatchSet prev = read_patch_journal(journal);
                    if (prev.applied)
                        revert_patch(prev);
                    std::filesystem::remove(journal);
                }
                return stage(ref, error);
            };
            campaign = run_fuzz_campaign(fuzzer, valid, f_max_iters, f_budget, work, f_model,
                                         staged, &warnings);
        } else {
            campaign = run_fuzz_campaign(fuzzer, valid, f_max_iters, f_budget, work, f_model,
                                         nullptr, &warnings);
        }

        for (const auto& w : warnings)
            std::cerr << "warning: " << w << "\n";
        write_file(f_out, campaign_to_json(campaign).dump(2) + "\n");
        std::cout << "campaign over " << campaign.iterations_used << " iterations, "
                  << campaign.total << " unique alerts\n";
        for (const auto& [cat, n] : campaign.category_counts)
            std::cout << "  " << cat << ": " << n << "\n";
        return 0;
    }

    if (score_cmd->parsed()) {
        CorpusSnapshot snapshot = load_corpus(s_corpus);
        std::map<std::string, const FunctionRecord*> by_id;
        for (const auto& rec : snapshot.records)
            by_id[rec.id] = &rec;

        std::vector<GenerationResult> generations = load_generations(s_generations);
        std::set<std::string> models;
        for (const auto& g : generations)
            models.insert(g.model_id);
        if (models.size() != 1)
            throw std::runtime_error("score expects one model per artifact set, found " +
                                     std::to_string(models.size()));
        std::string model_id = *models.begin();

        std::vector<CompileOutcome> outcomes = load_outcomes(s_outcomes);
        std::vector<TestIteration> iterations = load_iterations(s_iterations);
        std::vector<SanitizerAlert> alerts;
        for (const auto& row : read_jsonl(s_alerts))
            alerts.push_back(alert_from_json(row));

        ScoreWeights weights;
        if (s_weights != "1/3,1/3,1/3") {
            double w1, w2, w3;
            if (std::sscanf(s_weights.c_str(), "%lf,%lf,%lf", &w1, &w2, &w3) != 3)
                throw std::runtime_error("--weights must be w1,w2,w3");
            weights.w1 = w1;
            weights.w2 = w2;
            weights.w3 = w3;
        }
        weights.wd = s_wd;

        double s1 = compute_s1(outcomes);
        NaPolicy policy = s_na_policy == "exclude" ? NaPolicy::Exclude : NaPolicy::Zero;
        double s2 = compute_s2(iterations, policy);
        double s3 = compute_s3(alerts, s_penalty, s_leak);

        // Dissimilarity over generations whose verdict involved the build.
        std::map<std::string, CompileVerdict> verdict_by_id;
        for (const auto& o : outcomes)
            verdict_by_id[o.function_id] = o.verdict;
        std::vector<DeltaPair> pairs;
        for (const auto& g : generations) {
            if (g.status != GenerationStatus::Ok)
                continue;
            auto v = verdict_by_id.find(g.function_id);
            if (v == verdict_by_id.end() || v->second == CompileVerdict::Unrelated)
                continue;
            auto rec = by_id.find(g.function_id);
            if (rec == by_id.end())
                continue;
            pairs.push_back({g.function_id, rec->second->source_text, *g.extracted_code});
        }
        DeltaReport delta = aggregate_delta(model_id, pairs, s_min_delta);
        if (delta.below_threshold)
            std::cerr << "warning: " << model_id << " falls below the dissimilarity threshold ("
                      << delta.d_raw << " < " << s_min_delta
                      << " changed lines/function); edits are near-identity\n";

        ScoreCard card = score(model_id, s1, s2, s3, delta.d_raw, weights);

        ReportInputs inputs;
        inputs.scorecards = {card};
        inputs.iterations[model_id] = iterations;
        inputs.alerts[model_id] = alerts;
        inputs.manifest_extra = json{
            {"inputs",
             {{"corpus", {{"path", s_corpus},
                          {"functions_digest",
                           to_hex(file_digest(std::filesystem::path(s_corpus) /
                                              "functions.jsonl"))}}},
              {"generations", {{"path", s_generations},
                               {"digest", to_hex(file_digest(s_generations))}}},
              {"outcomes", {{"path", s_outcomes}, {"digest", to_hex(file_digest(s_outcomes))}}},
              {"iterations",
               {{"path", s_iterations}, {"digest", to_hex(file_digest(s_iterations))}}},
              {"alerts", {{"path", s_alerts}, {"digest", to_hex(file_digest(s_alerts))}}}}},
            {"config",
             {{"weights", {{"w1", weights.w1}, {"w2", weights.w2}, {"w3", weights.w3},
                           {"wd", weights.wd}}},
              {"penalty", s_penalty},
              {"leak_factor", s_leak},
              {"min_delta", s_min_delta},
              {"na_policy", s_na_policy}}},
            {"delta", {{"d_raw", delta.d_raw}, {"below_threshold", delta.below_threshold}}},
        };
        emit_report(inputs, s_out);

        std::cout << "model " << model_id << ": s1=" << s1 << " s2=" << s2 << " s3=" << s3
                  << " d_raw=" << delta.d_raw << "\n";
        std::cout << "final = " << card.final_score << " (report in " << s_out << ")\n";
        return 0;
    }

    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
