#include "swapbench/adapter.hpp"

#include <regex>
#include <sstream>
#include <stdexcept>

#include "swapbench/io.hpp"

namespace swapbench {

std::optional<std::pair<long, long>> TestLogParser::parse(const std::string& log) const {
    if (mode == "summary") {
        std::regex re(pattern);
        std::smatch m;
        // Take the last match so progress lines before the final summary
        // do not win.
        std::optional<std::pair<long, long>> found;
        auto begin = std::sregex_iterator(log.begin(), log.end(), re);
        for (auto it = begin; it != std::sregex_iterator(); ++it) {
            if (it->size() < 3)
                continue;
            try {
                found = {std::stol((*it)[1].str()), std::stol((*it)[2].str())};
            } catch (const std::exception&) {
                continue;
            }
        }
        return found;
    }
    if (mode == "list") {
        std::regex pass_re(pass_pattern);
        std::regex fail_re(fail_pattern);
        long passed = 0, failed = 0;
        std::istringstream in(log);
        std::string line;
        while (std::getline(in, line)) {
            if (std::regex_search(line, pass_re))
                ++passed;
            else if (std::regex_search(line, fail_re))
                ++failed;
        }
        if (passed + failed == 0)
            return std::nullopt;
        return std::make_pair(passed, passed + failed);
    }
    throw std::runtime_error("unknown test log parser mode: " + mode);
}

namespace {

std::map<std::string, std::string> read_string_map(const json& j, const char* key) {
    std::map<std::string, std::string> out;
    if (!j.contains(key))
        return out;
    for (auto& [k, v] : j.at(key).items())
        out[k] = v.is_string() ? v.get<std::string>() : v.dump();
    return out;
}

}  // namespace

ProjectAdapter load_project_adapter(const std::filesystem::path& file) {
    json j = json::parse(read_file(file), nullptr, false);
    if (j.is_discarded())
        throw std::runtime_error("adapter file is not valid JSON: " + file.string());

    ProjectAdapter a;
    a.name = j.value("name", file.stem().string());
    a.configure_cmd = j.value("configure_cmd", "");
    a.build_cmd = j.value("build_cmd", "");
    a.clean_cmd = j.value("clean_cmd", "");
    a.test_cmd = j.value("test_cmd", "");
    a.toolchain_cmd = j.value("toolchain_cmd", std::string("cc --version"));
    a.sanitizer_env = read_string_map(j, "sanitizer_env");
    a.baseline_expectations = read_string_map(j, "baseline_expectations");
    a.build_timeout_sec = j.value("build_timeout_sec", 1800L);
    a.test_timeout_sec = j.value("test_timeout_sec", 3600L);
    a.log_capture_bytes = j.value("log_capture_bytes", size_t{1} << 20);

    if (a.build_cmd.empty())
        throw std::runtime_error("adapter " + file.string() + " has no build_cmd");

    if (j.contains("log_parsers") && j["log_parsers"].contains("test_summary")) {
        const auto& p = j["log_parsers"]["test_summary"];
        a.test_parser.mode = p.value("mode", "summary");
        a.test_parser.pattern = p.value("pattern", "");
        a.test_parser.pass_pattern = p.value("pass_pattern", "");
        a.test_parser.fail_pattern = p.value("fail_pattern", "");
    }
    return a;
}

FuzzerAdapter load_fuzzer_adapter(const std::filesystem::path& file) {
    json j = json::parse(read_file(file), nullptr, false);
    if (j.is_discarded())
        throw std::runtime_error("fuzzer adapter file is not valid JSON: " + file.string());

    FuzzerAdapter f;
    f.name = j.value("name", file.stem().string());
    f.prepare_cmd = j.value("prepare_cmd", "");
    f.run_cmd = j.value("run_cmd", "");
    f.log_glob = j.value("log_glob", std::string("*.log"));
    f.env = read_string_map(j, "env");
    f.run_timeout_sec = j.value("run_timeout_sec", 3600L);
    if (f.run_cmd.empty())
        throw std::runtime_error("fuzzer adapter " + file.string() + " has no run_cmd");
    return f;
}

}  // namespace swapbench
