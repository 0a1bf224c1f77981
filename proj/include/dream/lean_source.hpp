// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0
//
// Line-level structure of Lean 4 source: top-level declaration blocks,
// imports, and the `:=` split of a theorem declaration.  This is not a Lean
// parser; it only needs to be right for the flat, declaration-per-block files
// the dataset pipeline produces.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dream/text.hpp"

namespace dream::lean {

enum class BlockKind { Import, Theorem, Declaration, Comment, Blank };

struct Block {
    BlockKind kind = BlockKind::Blank;
    std::string text; // exact source lines including their newlines
    int first_line = 1;
};

namespace detail {

inline bool is_ident_start(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

inline std::string_view first_word(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size() && !(s[i] == ' ' || s[i] == '\t' || s[i] == '(' || s[i] == '{' || s[i] == '['))
        ++i;
    return s.substr(0, i);
}

// Updates the block-comment depth across one line and reports whether the
// line has code outside comments.
inline bool scan_line(std::string_view line, int& depth) {
    bool code = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (depth > 0) {
            if (line[i] == '/' && i + 1 < line.size() && line[i + 1] == '-') {
                ++depth;
                ++i;
            } else if (line[i] == '-' && i + 1 < line.size() && line[i + 1] == '/') {
                --depth;
                ++i;
            }
            continue;
        }
        if (line[i] == '-' && i + 1 < line.size() && line[i + 1] == '-')
            break;
        if (line[i] == '/' && i + 1 < line.size() && line[i + 1] == '-') {
            ++depth;
            ++i;
            continue;
        }
        if (line[i] != ' ' && line[i] != '\t' && line[i] != '\r')
            code = true;
    }
    return code;
}

inline bool is_continuation_start(std::string_view line) {
    if (line.empty())
        return true;
    unsigned char c = static_cast<unsigned char>(line[0]);
    if (c == ' ' || c == '\t' || c == '|' || c == ')' || c == ']' || c == '}' || c == ',')
        return true;
    if (line.starts_with(":=") || line.starts_with("\xE2\x9F\xA9")) // ⟩
        return true;
    return false;
}

} // namespace detail

/// Keyword that determines the block's kind, after attributes and modifiers.
inline std::string_view declaration_keyword(std::string_view code_line) {
    auto s = text::trim_left(code_line);
    while (true) {
        if (s.starts_with("@[")) {
            auto close = s.find(']');
            if (close == std::string_view::npos)
                return {};
            s = text::trim_left(s.substr(close + 1));
            continue;
        }
        auto w = detail::first_word(s);
        if (w == "private" || w == "protected" || w == "noncomputable" || w == "unsafe" || w == "partial" ||
            w == "nonrec") {
            s = text::trim_left(s.substr(w.size()));
            continue;
        }
        return w;
    }
}

inline BlockKind classify(std::string_view block_text) {
    int depth = 0;
    auto lines = text::split_lines(block_text);
    for (const auto& l : lines.lines) {
        int before = depth;
        bool code = detail::scan_line(l, depth);
        if (!code)
            continue;
        // strip a leading comment closed on this line, e.g. "-/ theorem ..."
        std::string_view s = l;
        if (before > 0) {
            auto close = s.find("-/");
            s = close == std::string_view::npos ? s : s.substr(close + 2);
        }
        auto kw = declaration_keyword(s);
        if (kw == "import")
            return BlockKind::Import;
        if (kw == "theorem" || kw == "lemma")
            return BlockKind::Theorem;
        return BlockKind::Declaration;
    }
    for (const auto& l : lines.lines)
        if (!text::trim(l).empty())
            return BlockKind::Comment;
    return BlockKind::Blank;
}

/// Partition source into top-level blocks; concatenating the block texts
/// reproduces the input exactly.  A comment block directly followed by a
/// declaration (no blank line) is merged into it.
inline std::vector<Block> split_blocks(std::string_view source) {
    std::vector<Block> blocks;
    auto lines = text::split_lines(source);
    int depth = 0;
    bool prev_blank = true;
    for (std::size_t i = 0; i < lines.lines.size(); ++i) {
        const auto& line = lines.lines[i];
        const bool last = i + 1 == lines.lines.size();
        std::string with_nl = line + ((last && !lines.trailing_newline) ? "" : "\n");
        const bool blank = text::trim(line).empty();
        const bool inside_comment = depth > 0;
        detail::scan_line(line, depth);

        bool starts_block = !inside_comment && !blank && !detail::is_continuation_start(line);
        if (blocks.empty()) {
            blocks.push_back({BlockKind::Blank, with_nl, static_cast<int>(i + 1)});
            prev_blank = blank;
            continue;
        }
        if (starts_block) {
            auto& prev = blocks.back();
            bool merge = !prev_blank && classify(prev.text) == BlockKind::Comment;
            if (!merge)
                blocks.push_back({BlockKind::Blank, "", static_cast<int>(i + 1)});
        }
        blocks.back().text += with_nl;
        prev_blank = blank;
    }
    // imports are one per line even when written back to back
    std::vector<Block> out;
    for (auto& b : blocks) {
        b.kind = classify(b.text);
        if (b.kind == BlockKind::Import) {
            auto ls = text::split_lines(b.text);
            if (ls.lines.size() > 1) {
                int ln = b.first_line;
                for (std::size_t j = 0; j < ls.lines.size(); ++j) {
                    bool end = j + 1 == ls.lines.size();
                    Block ib{BlockKind::Import, ls.lines[j] + ((end && !ls.trailing_newline) ? "" : "\n"), ln++};
                    ib.kind = classify(ib.text);
                    out.push_back(std::move(ib));
                }
                continue;
            }
        }
        out.push_back(std::move(b));
    }
    return out;
}

struct TheoremParts {
    std::string header; // up to (not including) the top-level ":="
    std::string body;   // after ":=", trimmed; empty when there is no ":="
    bool has_assign = false;
};

/// Split a theorem block at its first top-level `:=`.
inline TheoremParts split_theorem(std::string_view decl) {
    int depth = 0;   // brackets
    int comment = 0; // nested block comments
    for (std::size_t i = 0; i < decl.size(); ++i) {
        char c = decl[i];
        char nx = i + 1 < decl.size() ? decl[i + 1] : '\0';
        if (comment > 0) {
            if (c == '/' && nx == '-') {
                ++comment;
                ++i;
            } else if (c == '-' && nx == '/') {
                --comment;
                ++i;
            }
            continue;
        }
        if (c == '-' && nx == '-') {
            while (i < decl.size() && decl[i] != '\n')
                ++i;
            continue;
        }
        if (c == '/' && nx == '-') {
            ++comment;
            ++i;
            continue;
        }
        if (c == '"') {
            ++i;
            while (i < decl.size() && decl[i] != '"') {
                if (decl[i] == '\\')
                    ++i;
                ++i;
            }
            continue;
        }
        if (c == '(' || c == '[' || c == '{')
            ++depth;
        else if (c == ')' || c == ']' || c == '}')
            --depth;
        else if (decl.substr(i, 3) == "\xE2\x9F\xA8") // ⟨
            ++depth;
        else if (decl.substr(i, 3) == "\xE2\x9F\xA9") // ⟩
            --depth;
        if (depth == 0 && c == ':' && nx == '=') {
            TheoremParts p;
            p.header = std::string(text::trim_right(decl.substr(0, i)));
            p.body = std::string(text::trim(decl.substr(i + 2)));
            p.has_assign = true;
            return p;
        }
    }
    return {std::string(text::trim_right(text::trim(decl))), {}, false};
}

/// True for bodies that are only a placeholder: `sorry`, `by sorry`, `by\n  sorry`.
inline bool is_placeholder_body(std::string_view body) {
    std::vector<std::string_view> words;
    std::size_t i = 0;
    while (i < body.size()) {
        while (i < body.size() && (body[i] == ' ' || body[i] == '\t' || body[i] == '\n' || body[i] == '\r'))
            ++i;
        std::size_t s = i;
        while (i < body.size() && !(body[i] == ' ' || body[i] == '\t' || body[i] == '\n' || body[i] == '\r'))
            ++i;
        if (i > s)
            words.push_back(body.substr(s, i - s));
    }
    return (words.size() == 1 && words[0] == "sorry") ||
           (words.size() == 2 && words[0] == "by" && words[1] == "sorry");
}

inline std::optional<std::string> theorem_name(std::string_view decl) {
    int depth = 0;
    for (const auto& l : text::split_lines(decl).lines) {
        if (!detail::scan_line(l, depth))
            continue;
        auto s = text::trim_left(l);
        // skip modifiers the same way declaration_keyword does
        auto kw = declaration_keyword(s);
        auto pos = s.find(kw);
        if (pos == std::string_view::npos)
            return std::nullopt;
        auto rest = text::trim_left(s.substr(pos + kw.size()));
        std::size_t e = 0;
        while (e < rest.size() && rest[e] != ' ' && rest[e] != ':' && rest[e] != '(' && rest[e] != '{' &&
               rest[e] != '[' && rest[e] != '\t')
            ++e;
        if (e == 0)
            return std::nullopt;
        return std::string(rest.substr(0, e));
    }
    return std::nullopt;
}

inline std::string strip_trailing_newlines(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r'))
        s.pop_back();
    return s;
}

} // namespace dream::lean
