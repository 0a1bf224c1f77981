// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

namespace dream::text {

/// Lines of a text plus whether the final line was newline-terminated, so that
/// join(split(s)) == s for every s.
struct Lines {
    std::vector<std::string> lines;
    bool trailing_newline = false;
};

inline Lines split_lines(std::string_view text) {
    Lines out;
    if (text.empty())
        return out;
    std::size_t start = 0;
    while (true) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            out.lines.emplace_back(text.substr(start));
            break;
        }
        out.lines.emplace_back(text.substr(start, nl - start));
        start = nl + 1;
        if (start == text.size()) {
            out.trailing_newline = true;
            break;
        }
    }
    return out;
}

inline std::string join_lines(const Lines& l) {
    std::string out;
    for (std::size_t i = 0; i < l.lines.size(); ++i) {
        if (i)
            out += '\n';
        out += l.lines[i];
    }
    if (l.trailing_newline)
        out += '\n';
    return out;
}

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::string_view trim_left(std::string_view s) {
    auto b = s.find_first_not_of(" \t");
    return b == std::string_view::npos ? std::string_view{} : s.substr(b);
}

inline std::string_view trim_right(std::string_view s) {
    auto e = s.find_last_not_of(" \t\r");
    return e == std::string_view::npos ? std::string_view{} : s.substr(0, e + 1);
}

inline bool starts_with_word(std::string_view s, std::string_view word) {
    if (!s.starts_with(word))
        return false;
    if (s.size() == word.size())
        return true;
    char c = s[word.size()];
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '(' || c == '{' || c == '[';
}

inline std::size_t count_lines(std::string_view s) { return split_lines(s).lines.size(); }

/// 64-bit FNV-1a, stable across platforms and runs.
inline std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex_digest(std::string_view data) { return fmt::format("{:016x}", fnv1a(data)); }

inline std::string indent(std::string_view body, std::string_view pad) {
    auto l = split_lines(body);
    for (auto& line : l.lines)
        if (!line.empty())
            line.insert(0, pad);
    return join_lines(l);
}

/// collapse a multi-line message onto one line
inline std::string single_line(std::string_view s) {
    auto l = split_lines(s);
    std::string out;
    for (auto& line : l.lines) {
        auto t = trim(line);
        if (t.empty())
            continue;
        if (!out.empty())
            out += " | ";
        out += t;
    }
    return out;
}

inline std::string utc_timestamp() {
    auto now = std::chrono::system_clock::now();
    auto secs = std::chrono::system_clock::to_time_t(now);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    return fmt::format("{}.{:03d}Z", buf, static_cast<int>(ms));
}

} // namespace dream::text
