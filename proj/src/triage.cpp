#include "swapbench/triage.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

#include "swapbench/hash.hpp"
#include "swapbench/subprocess.hpp"

namespace swapbench {

std::string to_string(AlertCategory c) {
    switch (c) {
    case AlertCategory::SEGV: return "SEGV";
    case AlertCategory::Spatial: return "Spatial";
    case AlertCategory::Temporal: return "Temporal";
    case AlertCategory::Undefined: return "Undefined";
    case AlertCategory::Leak: return "Leak";
    }
    return "Undefined";
}

AlertCategory alert_category_from_string(const std::string& s) {
    if (s == "SEGV") return AlertCategory::SEGV;
    if (s == "Spatial") return AlertCategory::Spatial;
    if (s == "Temporal") return AlertCategory::Temporal;
    if (s == "Leak") return AlertCategory::Leak;
    return AlertCategory::Undefined;
}

namespace {

bool contains(const std::string& haystack, const char* needle) {
    return haystack.find(needle) != std::string::npos;
}

std::string lower(std::string s) {
    for (char& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

AlertCategory categorize_alert(const std::string& kind, const std::string& tool, bool* warned) {
    if (warned)
        *warned = false;
    std::string k = lower(kind);

    if (tool == "lsan" || contains(k, "leak"))
        return AlertCategory::Leak;
    if (tool == "ubsan")
        return AlertCategory::Undefined;
    if (k == "segv" || contains(k, "segv") || contains(k, "segmentation"))
        return AlertCategory::SEGV;
    if (contains(k, "buffer-overflow") || contains(k, "buffer-underflow") ||
        contains(k, "out-of-bounds") || contains(k, "container-overflow") ||
        k == "stack-overflow")
        return AlertCategory::Spatial;
    if (contains(k, "use-after") || contains(k, "double-free") || contains(k, "invalid-free") ||
        contains(k, "bad-free") || contains(k, "alloc-dealloc-mismatch"))
        return AlertCategory::Temporal;

    if (warned)
        *warned = true;
    return AlertCategory::Undefined;
}

std::string make_dedup_key(AlertCategory category, const std::string& kind,
                           const std::vector<std::string>& frames, int frame_depth) {
    std::uint64_t h = fnv1a64(to_string(category));
    h = fnv1a64(std::string_view("\0", 1), h);
    h = fnv1a64(kind, h);
    for (int i = 0; i < frame_depth && i < static_cast<int>(frames.size()); ++i) {
        h = fnv1a64(std::string_view("\0", 1), h);
        h = fnv1a64(frames[static_cast<size_t>(i)], h);
    }
    return to_hex(h);
}

namespace {

// "    #0 0x55e4 in gc_scan_roots /src/zend_gc.c:123:4" -> "gc_scan_roots"
// "    #2 0x7f0a (/lib/libc.so.6+0x2d43a)"              -> "/lib/libc.so.6+0x2d43a"
// "    #0 bump /src/prog.c:4 (prog+0x1274)"             -> "bump"   (tsan style)
std::optional<std::string> parse_frame(const std::string& line) {
    static const std::regex re(R"(^\s*#(\d+)\s+0x[0-9a-fA-F]+\s+(.*)$)");
    static const std::regex tsan_frame_re(R"(^\s*#(\d+)\s+([A-Za-z_][\w:~<>]*)\s+\S.*$)");
    std::smatch m;
    if (std::regex_match(line, m, re)) {
        std::string rest = m[2].str();
        if (rest.rfind("in ", 0) == 0) {
            rest = rest.substr(3);
            // keep only the symbol, drop the source location
            auto sp = rest.find(' ');
            if (sp != std::string::npos)
                rest = rest.substr(0, sp);
            return rest;
        }
        if (!rest.empty() && rest.front() == '(' && rest.back() == ')')
            return rest.substr(1, rest.size() - 2);
        return rest;
    }
    if (std::regex_match(line, m, tsan_frame_re))
        return m[2].str();
    return std::nullopt;
}

std::string slug(const std::string& words) {
    std::string out;
    for (char c : words) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        else if (!out.empty() && out.back() != '-')
            out.push_back('-');
    }
    while (!out.empty() && out.back() == '-')
        out.pop_back();
    return out;
}

std::string ubsan_kind(const std::string& message) {
    std::string m = lower(message);
    if (m.rfind("signed integer overflow", 0) == 0) return "signed-integer-overflow";
    if (m.rfind("unsigned integer overflow", 0) == 0) return "unsigned-integer-overflow";
    if (m.rfind("shift exponent", 0) == 0) return "shift-out-of-bounds";
    if (m.rfind("division by zero", 0) == 0) return "division-by-zero";
    if (contains(m, "out of bounds")) return "index-out-of-bounds";
    if (contains(m, "null pointer")) return "null-pointer-use";
    if (contains(m, "misaligned address")) return "misaligned-access";
    if (m.rfind("negation of", 0) == 0) return "negation-overflow";
    if (contains(m, "pointer index expression") || contains(m, "pointer overflow"))
        return "pointer-overflow";
    if (contains(m, "not a valid value for type")) return "invalid-value-load";
    // fallback: slug of the words before the first number, quote or colon
    size_t cut = m.size();
    for (size_t i = 0; i < m.size(); ++i) {
        if (std::isdigit(static_cast<unsigned char>(m[i])) || m[i] == '\'' || m[i] == ':') {
            cut = i;
            break;
        }
    }
    std::string s = slug(m.substr(0, cut));
    return s.empty() ? "runtime-error" : s;
}

std::string tool_from_sanitizer_name(const std::string& name) {
    if (name == "AddressSanitizer") return "asan";
    if (name == "LeakSanitizer") return "lsan";
    if (name == "UndefinedBehaviorSanitizer") return "ubsan";
    return "other";
}

// Kind from an ASan-style ERROR headline.
std::string asan_kind(const std::string& headline) {
    std::string h = headline;
    if (h.rfind("SEGV", 0) == 0) return "SEGV";
    if (h.rfind("attempting double-free", 0) == 0) return "double-free";
    if (h.rfind("attempting free on address", 0) == 0) return "invalid-free";
    if (contains(h, "requested allocation size") && contains(h, "exceeds"))
        return "allocation-size-too-big";
    // first whitespace/colon/paren-delimited word, e.g. "heap-buffer-overflow"
    size_t cut = h.find_first_of(" :(\n");
    std::string head = cut == std::string::npos ? h : h.substr(0, cut);
    if (head.empty())
        return "unknown-report";
    return head;
}

struct LineView {
    std::vector<std::string> lines;
    explicit LineView(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            lines.push_back(line);
        }
    }
};

}  // namespace

std::vector<SanitizerAlert> parse_sanitizer_logs(const std::string& log,
                                                 const std::string& source,
                                                 const std::string& run_ref, int frame_depth) {
    static const std::regex error_re(
        R"(^==(\d+)\s*==\s*(?:ERROR|WARNING): (\w+Sanitizer): (.*)$)");
    static const std::regex tsan_re(R"(^WARNING: ThreadSanitizer: (.*?)\s*\(pid=\d+\)\s*$)");
    static const std::regex ubsan_re(R"(^(.+?):(\d+)(?::(\d+))?: runtime error: (.*)$)");
    static const std::regex summary_re(R"(^SUMMARY: .*$)");
    static const std::regex leak_re(
        R"(^(Direct|Indirect) leak of \d+ byte\(s\) in \d+ object\(s\) allocated from:$)");

    LineView lv(log);
    const auto& lines = lv.lines;
    std::vector<SanitizerAlert> alerts;

    auto finalize = [&](SanitizerAlert& a) {
        a.category = categorize_alert(a.kind, a.tool, &a.category_warning);
        a.dedup_key = make_dedup_key(a.category, a.kind, a.top_frames, frame_depth);
        a.source = source;
        a.first_seen = run_ref;
        alerts.push_back(a);
    };

    size_t i = 0;
    while (i < lines.size()) {
        const std::string& line = lines[i];
        std::smatch m;

        if (std::regex_match(line, m, error_re) || std::regex_match(line, m, tsan_re)) {
            std::string tool, headline;
            if (m.size() >= 4) {
                tool = tool_from_sanitizer_name(m[2].str());
                headline = m[3].str();
            } else {
                tool = "other";
                headline = m[1].str();
            }

            if (tool == "lsan" && contains(headline, "detected memory leaks")) {
                // Each leak paragraph becomes one alert.
                ++i;
                bool saw_summary = false;
                while (i < lines.size()) {
                    if (std::regex_match(lines[i], m, leak_re)) {
                        SanitizerAlert a;
                        a.tool = "lsan";
                        a.kind = lower(m[1].str()) + "-leak";
                        ++i;
                        while (i < lines.size()) {
                            auto f = parse_frame(lines[i]);
                            if (!f)
                                break;
                            if (static_cast<int>(a.top_frames.size()) < frame_depth)
                                a.top_frames.push_back(*f);
                            ++i;
                        }
                        finalize(a);
                        continue;
                    }
                    if (std::regex_match(lines[i], summary_re)) {
                        saw_summary = true;
                        ++i;
                        break;
                    }
                    if (std::regex_match(lines[i], m, error_re))
                        break;  // next report begins
                    ++i;
                }
                (void)saw_summary;
                continue;
            }

            SanitizerAlert a;
            a.tool = tool;
            a.kind = tool == "other" && contains(headline, "data race") ? "data-race"
                                                                        : asan_kind(headline);
            ++i;
            bool terminated = false;
            while (i < lines.size()) {
                const std::string& body = lines[i];
                if (std::regex_match(body, summary_re)) {
                    terminated = true;
                    ++i;
                    break;
                }
                if (contains(body, "==ABORTING")) {
                    terminated = true;
                    ++i;
                    break;
                }
                if (std::regex_match(body, m, error_re)) {
                    terminated = true;  // next block starts; this one is complete enough
                    break;
                }
                auto f = parse_frame(body);
                if (f && static_cast<int>(a.top_frames.size()) < frame_depth)
                    a.top_frames.push_back(*f);
                ++i;
            }
            if (i >= lines.size() && !terminated)
                a.truncated = true;
            finalize(a);
            continue;
        }

        if (std::regex_match(line, m, ubsan_re)) {
            SanitizerAlert a;
            a.tool = "ubsan";
            a.kind = ubsan_kind(m[4].str());
            std::string location = m[1].str() + ":" + m[2].str();
            if (m[3].matched)
                location += ":" + m[3].str();
            ++i;
            // optional stack (UBSAN_OPTIONS=print_stacktrace=1)
            while (i < lines.size()) {
                auto f = parse_frame(lines[i]);
                if (!f)
                    break;
                if (static_cast<int>(a.top_frames.size()) < frame_depth)
                    a.top_frames.push_back(*f);
                ++i;
            }
            if (a.top_frames.empty())
                a.top_frames.push_back(location);
            finalize(a);
            continue;
        }

        ++i;
    }
    return alerts;
}

json alert_to_json(const SanitizerAlert& a) {
    return json{
        {"tool", a.tool},
        {"kind", a.kind},
        {"category", to_string(a.category)},
        {"top_frames", a.top_frames},
        {"dedup_key", a.dedup_key},
        {"source", a.source},
        {"first_seen", a.first_seen},
        {"truncated", a.truncated},
        {"category_warning", a.category_warning},
    };
}

SanitizerAlert alert_from_json(const json& j) {
    SanitizerAlert a;
    a.tool = j.at("tool").get<std::string>();
    a.kind = j.at("kind").get<std::string>();
    a.category = alert_category_from_string(j.at("category").get<std::string>());
    a.top_frames = j.at("top_frames").get<std::vector<std::string>>();
    a.dedup_key = j.at("dedup_key").get<std::string>();
    a.source = j.value("source", "");
    a.first_seen = j.value("first_seen", "");
    a.truncated = j.value("truncated", false);
    a.category_warning = j.value("category_warning", false);
    return a;
}

std::vector<SanitizerAlert> dedupe_alerts(const std::vector<SanitizerAlert>& alerts) {
    std::map<std::string, SanitizerAlert> best;
    for (const auto& a : alerts) {
        auto it = best.find(a.dedup_key);
        if (it == best.end()) {
            best.emplace(a.dedup_key, a);
            continue;
        }
        // Earliest first_seen wins; break ties on the serialized alert so the
        // result is independent of input order.
        const SanitizerAlert& cur = it->second;
        auto rank = [](const SanitizerAlert& x) {
            return std::make_pair(x.first_seen, alert_to_json(x).dump());
        };
        if (rank(a) < rank(cur))
            it->second = a;
    }
    std::vector<SanitizerAlert> out;
    out.reserve(best.size());
    for (auto& [key, a] : best)
        out.push_back(std::move(a));
    return out;
}

double compute_s3(const std::vector<SanitizerAlert>& unique_alerts, double penalty_per_alert,
                  double leak_factor) {
    double total = 0.0;
    for (const auto& a : unique_alerts)
        total += a.category == AlertCategory::Leak ? penalty_per_alert * leak_factor
                                                   : penalty_per_alert;
    return std::max(0.0, 100.0 - total);
}

FuzzCampaign run_fuzz_campaign(
    const FuzzerAdapter& fuzzer, const std::vector<FuzzIterationRef>& valid_iterations,
    size_t max_iterations, size_t budget, const std::filesystem::path& work_dir,
    const std::string& model_id,
    const std::function<bool(const FuzzIterationRef&, std::string& error)>& stage_iteration,
    std::vector<std::string>* warnings) {
    FuzzCampaign campaign;
    campaign.model_id = model_id;
    campaign.inputs_per_iteration = budget;

    std::filesystem::create_directories(work_dir);

    if (!fuzzer.prepare_cmd.empty()) {
        RunSpec prep;
        prep.command = fuzzer.prepare_cmd;
        prep.cwd = work_dir;
        prep.env = fuzzer.env;
        prep.timeout = std::chrono::seconds(fuzzer.run_timeout_sec);
        RunResult r = run_command(prep);
        if (!r.ok())
            throw std::runtime_error("fuzzer prepare command failed: " + r.log);
    }

    std::vector<SanitizerAlert> pooled;
    size_t used = 0;
    for (const auto& iter : valid_iterations) {
        if (used >= max_iterations)
            break;

        if (stage_iteration) {
            std::string error;
            if (!stage_iteration(iter, error)) {
                if (warnings)
                    warnings->push_back("iteration " + std::to_string(iter.index) +
                                        " skipped: " + error);
                continue;
            }
        }

        std::filesystem::path log_dir =
            work_dir / ("iter" + std::to_string(iter.index));
        std::filesystem::create_directories(log_dir);

        RunSpec spec;
        spec.command = fuzzer.run_cmd;
        spec.cwd = work_dir;
        spec.env = fuzzer.env;
        spec.env["SWAPBENCH_ITERATION"] = std::to_string(iter.index);
        spec.env["SWAPBENCH_BUDGET"] = std::to_string(budget);
        spec.env["SWAPBENCH_LOG_DIR"] = log_dir.string();
        spec.timeout = std::chrono::seconds(fuzzer.run_timeout_sec);
        RunResult r = run_command(spec);
        if (!r.ok()) {
            if (warnings)
                warnings->push_back("iteration " + std::to_string(iter.index) +
                                    " fuzzer run failed (exit " + std::to_string(r.exit_code) +
                                    "), skipped");
            continue;
        }

        ++used;
        std::string run_ref = "fuzz-iter" + std::to_string(iter.index);
        std::vector<std::filesystem::path> logs;
        if (std::filesystem::exists(log_dir))
            for (const auto& e : std::filesystem::directory_iterator(log_dir))
                if (e.is_regular_file() &&
                    fnmatch(fuzzer.log_glob.c_str(), e.path().filename().c_str(), 0) == 0)
                    logs.push_back(e.path());
        std::sort(logs.begin(), logs.end());
        for (const auto& lp : logs) {
            auto found = parse_sanitizer_logs(read_file(lp), "fuzz", run_ref);
            pooled.insert(pooled.end(), found.begin(), found.end());
        }
    }

    campaign.iterations_used = used;
    campaign.unique_alerts = dedupe_alerts(pooled);
    for (const auto& a : campaign.unique_alerts)
        ++campaign.category_counts[to_string(a.category)];
    campaign.total = campaign.unique_alerts.size();
    return campaign;
}

json campaign_to_json(const FuzzCampaign& c) {
    json counts = json::object();
    for (const auto& [k, v] : c.category_counts)
        counts[k] = v;
    json alerts = json::array();
    for (const auto& a : c.unique_alerts)
        alerts.push_back(alert_to_json(a));
    return json{
        {"model_id", c.model_id},
        {"iterations_used", c.iterations_used},
        {"inputs_per_iteration", c.inputs_per_iteration},
        {"counts", counts},
        {"total", c.total},
        {"unique_alerts", alerts},
    };
}

}  // namespace swapbench
