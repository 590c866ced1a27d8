#include "swapbench/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>
#include <vector>

extern char** environ;

namespace swapbench {

BoundedLog::BoundedLog(size_t limit)
    : head_limit_(limit / 2), tail_limit_(limit - limit / 2) {}

void BoundedLog::append(const char* data, size_t len) {
    size_t i = 0;
    while (i < len && head_.size() < head_limit_)
        head_.push_back(data[i++]);
    if (i >= len)
        return;
    for (; i < len; ++i) {
        if (tail_.size() < tail_limit_) {
            tail_.push_back(data[i]);
        } else {
            tail_[tail_start_] = data[i];
            tail_start_ = (tail_start_ + 1) % tail_limit_;
            ++dropped_;
        }
    }
}

std::string BoundedLog::str() const {
    std::string out = head_;
    if (dropped_ > 0)
        out += "\n[... " + std::to_string(dropped_) + " bytes elided ...]\n";
    out += tail_.substr(tail_start_);
    out += tail_.substr(0, tail_start_);
    return out;
}

RunResult run_command(const RunSpec& spec) {
    int fds[2];
    if (pipe(fds) != 0)
        throw std::runtime_error(std::string("pipe failed: ") + std::strerror(errno));

    // Build the child environment: parent env with spec.env merged on top.
    std::vector<std::string> env_strings;
    for (char** e = environ; *e != nullptr; ++e) {
        std::string_view entry(*e);
        auto eq = entry.find('=');
        std::string key(entry.substr(0, eq));
        if (spec.env.count(key) == 0)
            env_strings.emplace_back(entry);
    }
    for (const auto& [k, v] : spec.env)
        env_strings.push_back(k + "=" + v);
    std::vector<char*> envp;
    envp.reserve(env_strings.size() + 1);
    for (auto& s : env_strings)
        envp.push_back(s.data());
    envp.push_back(nullptr);

    auto start = std::chrono::steady_clock::now();
    pid_t pid = fork();
    if (pid < 0) {
        close(fds[0]);
        close(fds[1]);
        throw std::runtime_error(std::string("fork failed: ") + std::strerror(errno));
    }

    if (pid == 0) {
        setpgid(0, 0);  // own process group, so timeout kills the whole job
        close(fds[0]);
        dup2(fds[1], STDOUT_FILENO);
        dup2(fds[1], STDERR_FILENO);
        close(fds[1]);
        if (!spec.cwd.empty() && chdir(spec.cwd.c_str()) != 0)
            _exit(127);
        execle("/bin/sh", "sh", "-c", spec.command.c_str(), nullptr, envp.data());
        _exit(127);
    }

    close(fds[1]);
    fcntl(fds[0], F_SETFL, O_NONBLOCK);

    RunResult result;
    BoundedLog log(spec.capture_limit);
    auto deadline = start + spec.timeout;
    std::chrono::steady_clock::time_point kill_time;
    bool killed = false;
    char buf[8192];

    bool eof = false;
    while (!eof) {
        auto now = std::chrono::steady_clock::now();
        if (!killed && now >= deadline) {
            kill(-pid, SIGKILL);
            kill(pid, SIGKILL);
            killed = true;
            kill_time = now;
        }
        // A detached grandchild can keep the pipe open past the kill; stop
        // draining after a short grace period.
        if (killed && now - kill_time > std::chrono::seconds(2))
            break;
        int wait_ms = 200;
        if (!killed) {
            auto left =
                std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
            wait_ms = static_cast<int>(std::min<long long>(std::max<long long>(left, 0), 200));
        }
        struct pollfd pfd{fds[0], POLLIN, 0};
        int pr = poll(&pfd, 1, wait_ms);
        if (pr > 0) {
            while (true) {
                ssize_t n = read(fds[0], buf, sizeof(buf));
                if (n > 0) {
                    log.append(buf, static_cast<size_t>(n));
                    continue;
                }
                if (n == 0) {
                    eof = true;
                    break;
                }
                if (errno == EAGAIN || errno == EWOULDBLOCK)
                    break;
                eof = true;
                break;
            }
        }
    }
    close(fds[0]);

    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }

    result.timed_out = killed;
    if (WIFEXITED(status))
        result.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        result.exit_code = 128 + WTERMSIG(status);
    result.log = log.str();
    result.log_truncated = log.truncated();
    result.duration = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    return result;
}

}  // namespace swapbench
