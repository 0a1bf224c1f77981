// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0
//
// Structured checker diagnostics and the lexical placeholder scan.

#pragma once

#include <algorithm>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dream/text.hpp"

namespace dream {

enum class Severity { Error, Warning };

inline std::string_view severity_name(Severity s) { return s == Severity::Error ? "error" : "warning"; }

struct Diagnostic {
    int line = 1;   // 1-based
    int column = 0; // as reported by the checker, see column_zero_based
    Severity severity = Severity::Error;
    std::string message;
    bool column_zero_based = true;

    bool operator==(const Diagnostic&) const = default;
};

inline void to_json(nlohmann::json& j, const Diagnostic& d) {
    j = {{"line", d.line},
         {"column", d.column},
         {"column_base", d.column_zero_based ? 0 : 1},
         {"severity", severity_name(d.severity)},
         {"message", d.message}};
}

inline void from_json(const nlohmann::json& j, Diagnostic& d) {
    d.line = j.value("line", 1);
    d.column = j.value("column", 0);
    d.column_zero_based = j.value("column_base", 0) == 0;
    d.severity = j.value("severity", std::string("error")) == "warning" ? Severity::Warning : Severity::Error;
    d.message = j.value("message", std::string());
}

inline void sort_diagnostics(std::vector<Diagnostic>& ds) {
    std::stable_sort(ds.begin(), ds.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return a.line != b.line ? a.line < b.line : a.column < b.column;
    });
}

struct ParsedOutput {
    std::vector<Diagnostic> diagnostics;
    /// Lines that belong to no parsed diagnostic, in input order.
    std::vector<std::string> residual;
};

namespace detail {
// file:line:col: severity[(code)]: message
inline const std::regex& header_regex() {
    static const std::regex re(R"(^(.+?):(\d+):(\d+):\s*(error|warning|info)(\([^)]*\))?:\s?(.*)$)");
    return re;
}
inline const std::regex& header_like_regex() {
    static const std::regex re(R"(^[^\s:][^:]*:\d+:\d+:)");
    return re;
}
} // namespace detail

inline bool is_header_like(std::string_view line) {
    return std::regex_search(line.begin(), line.end(), detail::header_like_regex());
}

/// Parse `file:line:column: severity: message` records.  Lines following a
/// header up to the next header form that record's message body.  Lines before
/// the first header, header-like lines that do not parse, and `info` records
/// are kept in `residual`.  Never throws.
inline ParsedOutput parse_diagnostics(std::string_view raw_output) {
    ParsedOutput out;
    auto lines = text::split_lines(raw_output);
    enum class Sink { Residual, Diagnostic, Info } sink = Sink::Residual;
    for (auto& raw : lines.lines) {
        std::string line(text::trim_right(raw));
        std::smatch m;
        bool matched = false;
        try {
            matched = std::regex_match(line, m, detail::header_regex());
        } catch (const std::regex_error&) {
            matched = false;
        }
        if (matched) {
            const auto sev = m[4].str();
            if (sev == "info") {
                out.residual.push_back(line);
                sink = Sink::Info;
                continue;
            }
            Diagnostic d;
            try {
                d.line = std::max(1, std::stoi(m[2].str()));
                d.column = std::stoi(m[3].str());
            } catch (const std::exception&) {
                out.residual.push_back(line);
                sink = Sink::Residual;
                continue;
            }
            d.severity = sev == "error" ? Severity::Error : Severity::Warning;
            d.message = m[6].str();
            out.diagnostics.push_back(std::move(d));
            sink = Sink::Diagnostic;
            continue;
        }
        if (is_header_like(line)) {
            out.residual.push_back(line);
            sink = Sink::Residual;
            continue;
        }
        if (sink == Sink::Diagnostic) {
            auto& msg = out.diagnostics.back().message;
            if (!msg.empty())
                msg += '\n';
            msg += line;
        } else {
            if (!text::trim(line).empty())
                out.residual.push_back(line);
        }
    }
    for (auto& d : out.diagnostics) {
        while (!d.message.empty() && (d.message.back() == '\n' || d.message.back() == ' '))
            d.message.pop_back();
        if (d.message.empty())
            d.message = "(no message)";
    }
    sort_diagnostics(out.diagnostics);
    return out;
}

// ---------------------------------------------------------------------------
// Placeholder scan

struct PlaceholderHit {
    std::string token;
    int line = 1;   // 1-based
    int column = 0; // 0-based byte column
};

namespace detail {
inline bool is_ident_char(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '\'' ||
           c == '!' || c == '?' || c == '.' || c >= 0x80;
}
} // namespace detail

/// Identifiers equal to one of `keywords`, ignoring Lean comments (`--`,
/// nested `/- -/`), string literals and character literals.
inline std::vector<PlaceholderHit> find_placeholders(std::string_view src, const std::vector<std::string>& keywords) {
    std::vector<PlaceholderHit> hits;
    int line = 1;
    std::size_t line_start = 0;
    std::size_t i = 0;
    const std::size_t n = src.size();
    auto newline = [&](std::size_t at) {
        ++line;
        line_start = at + 1;
    };
    while (i < n) {
        char c = src[i];
        if (c == '\n') {
            newline(i);
            ++i;
            continue;
        }
        if (c == '-' && i + 1 < n && src[i + 1] == '-') {
            while (i < n && src[i] != '\n')
                ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '-') {
            int depth = 1;
            i += 2;
            while (i < n && depth > 0) {
                if (src[i] == '\n')
                    newline(i);
                if (src[i] == '/' && i + 1 < n && src[i + 1] == '-') {
                    ++depth;
                    i += 2;
                } else if (src[i] == '-' && i + 1 < n && src[i + 1] == '/') {
                    --depth;
                    i += 2;
                } else {
                    ++i;
                }
            }
            continue;
        }
        if (c == '"') {
            ++i;
            while (i < n && src[i] != '"') {
                if (src[i] == '\\' && i + 1 < n)
                    ++i;
                if (src[i] == '\n')
                    newline(i);
                ++i;
            }
            ++i;
            continue;
        }
        if (c == '\'' && (i == 0 || !detail::is_ident_char(static_cast<unsigned char>(src[i - 1])))) {
            // character literal such as 'a' or '\n'
            std::size_t j = i + 1;
            if (j < n && src[j] == '\\')
                j += 2;
            else
                ++j;
            if (j < n && src[j] == '\'') {
                i = j + 1;
                continue;
            }
            ++i;
            continue;
        }
        if (detail::is_ident_char(static_cast<unsigned char>(c)) && c != '.' && c != '\'') {
            std::size_t start = i;
            while (i < n && detail::is_ident_char(static_cast<unsigned char>(src[i])))
                ++i;
            std::string_view tok = src.substr(start, i - start);
            for (const auto& kw : keywords)
                if (tok == kw || (tok.size() > kw.size() && tok.ends_with(kw) && tok[tok.size() - kw.size() - 1] == '.'))
                    hits.push_back({kw, line, static_cast<int>(start - line_start)});
            continue;
        }
        ++i;
    }
    return hits;
}

inline const std::vector<std::string>& default_placeholders() {
    static const std::vector<std::string> kw{"sorry", "admit", "sorryAx"};
    return kw;
}

} // namespace dream
