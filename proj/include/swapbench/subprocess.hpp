#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <string>

namespace swapbench {

struct RunSpec {
    std::string command;  // run through /bin/sh -c
    std::filesystem::path cwd;
    std::map<std::string, std::string> env;  // merged over the parent env
    std::chrono::milliseconds timeout{std::chrono::minutes(30)};
    size_t capture_limit = 1 << 20;  // combined stdout+stderr, head+tail split
};

struct RunResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string log;          // combined output, bounded
    bool log_truncated = false;
    std::chrono::milliseconds duration{0};

    bool ok() const { return exit_code == 0 && !timed_out; }
};

RunResult run_command(const RunSpec& spec);

// Keeps the first and last capture_limit/2 bytes with an elision marker in
// between, so both the first error and the final summary survive long logs.
class BoundedLog {
public:
    explicit BoundedLog(size_t limit);
    void append(const char* data, size_t len);
    std::string str() const;
    bool truncated() const { return dropped_ > 0; }

private:
    size_t head_limit_;
    size_t tail_limit_;
    std::string head_;
    std::string tail_;  // ring, rotated on overflow
    size_t tail_start_ = 0;
    size_t dropped_ = 0;
};

}  // namespace swapbench
