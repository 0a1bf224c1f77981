// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dream/errors.hpp"
#include "dream/lean_source.hpp"

namespace dream {

enum class TheoremOrigin { TptpRevised, Manual };

inline std::string_view origin_name(TheoremOrigin o) { return o == TheoremOrigin::Manual ? "manual" : "tptp"; }

inline TheoremOrigin origin_from_name(std::string_view s) {
    if (s == "manual" || s == "Manual")
        return TheoremOrigin::Manual;
    if (s == "tptp" || s == "TptpRevised" || s == "tptp_revised")
        return TheoremOrigin::TptpRevised;
    throw ValidationError("unknown theorem origin '" + std::string(s) + "'");
}

/// A formal problem: imports, context declarations, and one conjecture whose
/// body is a placeholder.
struct Theorem {
    std::string id;
    std::string domain;
    std::vector<std::string> imports;
    std::string context_source;
    std::string conjecture_source;
    TheoremOrigin origin = TheoremOrigin::TptpRevised;

    /// Full Lean file: imports, context, conjecture.
    std::string source() const {
        std::string out;
        for (const auto& i : imports)
            out += i + "\n";
        if (!imports.empty())
            out += "\n";
        if (!context_source.empty())
            out += lean::strip_trailing_newlines(context_source) + "\n\n";
        out += lean::strip_trailing_newlines(conjecture_source) + "\n";
        return out;
    }
};

inline void to_json(nlohmann::json& j, const Theorem& t) {
    j = {{"id", t.id},
         {"domain", t.domain},
         {"origin", origin_name(t.origin)},
         {"imports", t.imports},
         {"context", t.context_source},
         {"conjecture", t.conjecture_source}};
}

/// Split a Lean source into imports / context / conjecture.
/// Throws StructureError unless there is exactly one theorem declaration.
inline Theorem theorem_from_source(std::string_view source, std::string id, std::string domain = {},
                                   TheoremOrigin origin = TheoremOrigin::TptpRevised) {
    Theorem t;
    t.id = std::move(id);
    t.domain = std::move(domain);
    t.origin = origin;
    int theorems = 0;
    std::string context;
    for (const auto& b : lean::split_blocks(source)) {
        switch (b.kind) {
        case lean::BlockKind::Import:
            t.imports.emplace_back(text::trim(b.text));
            break;
        case lean::BlockKind::Theorem:
            ++theorems;
            t.conjecture_source = lean::strip_trailing_newlines(b.text);
            break;
        case lean::BlockKind::Blank:
            break;
        default:
            context += b.text;
        }
    }
    if (theorems != 1)
        throw StructureError("expected exactly one theorem declaration in '" + t.id + "', found " +
                             std::to_string(theorems));
    t.context_source = lean::strip_trailing_newlines(context);
    return t;
}

inline std::string read_text_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw EnvironmentError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::filesystem::path& p, std::string_view content) {
    if (p.has_parent_path())
        std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw EnvironmentError("cannot write " + p.string());
    out << content;
}

inline Theorem load_theorem_file(const std::filesystem::path& p, std::string id = {}, std::string domain = {},
                                 TheoremOrigin origin = TheoremOrigin::TptpRevised) {
    if (id.empty())
        id = p.stem().string();
    return theorem_from_source(read_text_file(p), std::move(id), std::move(domain), origin);
}

/// Drop `axiom` declarations from the context (background-restriction runs).
inline Theorem without_context_axioms(Theorem t) {
    std::string kept;
    for (const auto& b : lean::split_blocks(t.context_source)) {
        if (b.kind == lean::BlockKind::Declaration) {
            auto lines = text::split_lines(b.text);
            bool is_axiom = false;
            int depth = 0;
            for (const auto& l : lines.lines) {
                if (lean::detail::scan_line(l, depth)) {
                    is_axiom = lean::declaration_keyword(l) == "axiom";
                    break;
                }
            }
            if (is_axiom)
                continue;
        }
        kept += b.text;
    }
    t.context_source = lean::strip_trailing_newlines(kept);
    return t;
}

} // namespace dream
