#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace swapbench {

// Per-suite log parser. summary mode: one regex with two capture groups
// (passed, total). list mode: per-line pass/fail patterns, counted.
struct TestLogParser {
    std::string mode = "summary";
    std::string pattern;       // summary mode
    std::string pass_pattern;  // list mode
    std::string fail_pattern;  // list mode

    // (passed, total), or nullopt when the log carries no parseable result.
    std::optional<std::pair<long, long>> parse(const std::string& log) const;
};

// Everything project-specific the harnesses need: how to configure, build,
// clean and test one checkout, and how to read its logs.
struct ProjectAdapter {
    std::string name;
    std::string configure_cmd;  // may be empty
    std::string build_cmd;
    std::string clean_cmd;      // optional, used by the full-rebuild check
    std::string test_cmd;
    std::string toolchain_cmd = "cc --version";
    std::map<std::string, std::string> sanitizer_env;
    std::map<std::string, std::string> baseline_expectations;
    TestLogParser test_parser;
    long build_timeout_sec = 1800;
    long test_timeout_sec = 3600;
    size_t log_capture_bytes = 1 << 20;
};

ProjectAdapter load_project_adapter(const std::filesystem::path& file);

// External fuzzer contract: prepare once, then run per iteration; alerts are
// read from log files matching log_glob under the output directory.
struct FuzzerAdapter {
    std::string name;
    std::string prepare_cmd;  // may be empty
    std::string run_cmd;
    std::string log_glob = "*.log";
    std::map<std::string, std::string> env;
    long run_timeout_sec = 3600;
};

FuzzerAdapter load_fuzzer_adapter(const std::filesystem::path& file);

}  // namespace swapbench
