// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0
//
// POSIX child process with merged stdout/stderr capture and a wall-clock
// timeout.  The child runs in its own process group so a timeout kills any
// grandchildren (lake spawns lean) as well.

#pragma once

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "dream/errors.hpp"

namespace dream {

struct ProcessResult {
    int exit_code = -1;
    std::string output;
    bool timed_out = false;
    std::chrono::milliseconds duration{0};
};

inline ProcessResult run_process(const std::vector<std::string>& argv, const std::filesystem::path& cwd,
                                 std::chrono::milliseconds timeout) {
    if (argv.empty())
        throw InvalidArgument("run_process: empty command");

    int out_pipe[2];
    int err_pipe[2]; // reports exec failure errno, closed on successful exec
    if (pipe(out_pipe) != 0 || pipe2(err_pipe, O_CLOEXEC) != 0)
        throw EnvironmentError(std::string("pipe: ") + std::strerror(errno));

    std::vector<char*> args;
    args.reserve(argv.size() + 1);
    for (const auto& a : argv)
        args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    const std::string cwd_str = cwd.empty() ? std::string() : cwd.string();

    auto start = std::chrono::steady_clock::now();
    pid_t pid = fork();
    if (pid < 0)
        throw EnvironmentError(std::string("fork: ") + std::strerror(errno));
    if (pid == 0) {
        setpgid(0, 0);
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(out_pipe[1], STDERR_FILENO);
        close(out_pipe[0]);
        close(out_pipe[1]);
        close(err_pipe[0]);
        if (!cwd_str.empty() && chdir(cwd_str.c_str()) != 0) {
            int e = errno;
            (void)!write(err_pipe[1], &e, sizeof e);
            _exit(127);
        }
        execvp(args[0], args.data());
        int e = errno;
        (void)!write(err_pipe[1], &e, sizeof e);
        _exit(127);
    }
    close(out_pipe[1]);
    close(err_pipe[1]);

    int exec_errno = 0;
    if (read(err_pipe[0], &exec_errno, sizeof exec_errno) == sizeof exec_errno) {
        close(err_pipe[0]);
        close(out_pipe[0]);
        waitpid(pid, nullptr, 0);
        throw EnvironmentError("cannot execute '" + argv[0] + "': " + std::strerror(exec_errno));
    }
    close(err_pipe[0]);

    ProcessResult result;
    const auto deadline = start + timeout;
    char buf[4096];
    while (true) {
        auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            result.timed_out = true;
            kill(-pid, SIGKILL);
            break;
        }
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
        pollfd pfd{out_pipe[0], POLLIN, 0};
        int rc = poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining, 1000)));
        if (rc < 0 && errno == EINTR)
            continue;
        if (rc <= 0)
            continue;
        ssize_t n = read(out_pipe[0], buf, sizeof buf);
        if (n <= 0)
            break;
        result.output.append(buf, static_cast<std::size_t>(n));
    }
    close(out_pipe[0]);

    int status = 0;
    waitpid(pid, &status, 0);
    if (result.timed_out)
        result.exit_code = -1;
    else if (WIFEXITED(status))
        result.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        result.exit_code = 128 + WTERMSIG(status);
    result.duration =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return result;
}

} // namespace dream
