// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0
//
// Prompt roles and the small template language used to render them.
//
// Template syntax:
//   {name}            required field, substituted verbatim
//   {?name} ... {/name}  section kept only when `name` is present and non-empty
//   {{ and }}         literal braces
// Any other brace is copied through unchanged, so Lean snippets in templates
// need no escaping unless they look like `{identifier}`.

#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

#include <nlohmann/json.hpp>

#include "dream/errors.hpp"

namespace dream {

enum class PromptRole {
    ProposeAxioms,
    SynthesizeAxiom,
    ProposeStrategy,
    GenerateProof,
    AnnotateSubpropositions,
    AnalyzeFailures,
    TranslateTptp,
    OptimizeContext,
};

inline constexpr std::array kAllRoles = {
    PromptRole::ProposeAxioms,   PromptRole::SynthesizeAxiom,         PromptRole::ProposeStrategy,
    PromptRole::GenerateProof,   PromptRole::AnnotateSubpropositions, PromptRole::AnalyzeFailures,
    PromptRole::TranslateTptp,   PromptRole::OptimizeContext,
};

inline std::string_view role_name(PromptRole r) {
    switch (r) {
    case PromptRole::ProposeAxioms: return "ProposeAxioms";
    case PromptRole::SynthesizeAxiom: return "SynthesizeAxiom";
    case PromptRole::ProposeStrategy: return "ProposeStrategy";
    case PromptRole::GenerateProof: return "GenerateProof";
    case PromptRole::AnnotateSubpropositions: return "AnnotateSubpropositions";
    case PromptRole::AnalyzeFailures: return "AnalyzeFailures";
    case PromptRole::TranslateTptp: return "TranslateTptp";
    case PromptRole::OptimizeContext: return "OptimizeContext";
    }
    return "?";
}

inline std::optional<PromptRole> role_from_name(std::string_view s) {
    for (auto r : kAllRoles)
        if (role_name(r) == s)
            return r;
    return std::nullopt;
}

/// Role-specific bundle of named fields.  Values are strings, numbers, or
/// arrays of strings (arrays render as their items separated by blank lines).
using PromptContext = nlohmann::json;

struct RenderedPrompt {
    std::string system_text;
    std::string user_text;
    bool operator==(const RenderedPrompt&) const = default;
};

struct PromptTemplate {
    std::string system;
    std::string user;
};

namespace detail {

inline bool is_field_char(char c) { return (c >= 'a' && c <= 'z') || c == '_' || (c >= '0' && c <= '9'); }

inline bool field_present(const PromptContext& ctx, const std::string& name) {
    if (!ctx.is_object() || !ctx.contains(name))
        return false;
    const auto& v = ctx.at(name);
    if (v.is_null())
        return false;
    if (v.is_string())
        return !v.get_ref<const std::string&>().empty();
    if (v.is_array())
        return !v.empty();
    return true;
}

inline std::string field_text(const PromptContext& ctx, const std::string& name) {
    if (!ctx.is_object() || !ctx.contains(name) || ctx.at(name).is_null())
        throw TemplateError(name, "prompt template requires missing context field '" + name + "'");
    const auto& v = ctx.at(name);
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_array()) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i)
                out += "\n\n";
            out += v[i].is_string() ? v[i].get<std::string>() : v[i].dump();
        }
        return out;
    }
    return v.dump();
}

// Parses a `{...}` tag starting at pos; returns (kind, name, end) where kind is
// one of '=', '?', '/', or 0 when the brace is not a tag.
struct Tag {
    char kind = 0;
    std::string name;
    std::size_t end = 0;
};

inline Tag read_tag(std::string_view t, std::size_t pos) {
    Tag tag;
    std::size_t i = pos + 1;
    char kind = '=';
    if (i < t.size() && (t[i] == '?' || t[i] == '/')) {
        kind = t[i];
        ++i;
    }
    std::size_t start = i;
    while (i < t.size() && is_field_char(t[i]))
        ++i;
    if (i == start || i >= t.size() || t[i] != '}')
        return tag;
    tag.kind = kind;
    tag.name = std::string(t.substr(start, i - start));
    tag.end = i + 1;
    return tag;
}

inline std::string render_range(std::string_view t, const PromptContext& ctx) {
    std::string out;
    std::size_t i = 0;
    while (i < t.size()) {
        char c = t[i];
        if (c == '{' && i + 1 < t.size() && t[i + 1] == '{') {
            out += '{';
            i += 2;
            continue;
        }
        if (c == '}' && i + 1 < t.size() && t[i + 1] == '}') {
            out += '}';
            i += 2;
            continue;
        }
        if (c == '{') {
            auto tag = read_tag(t, i);
            if (tag.kind == '=') {
                out += field_text(ctx, tag.name);
                i = tag.end;
                continue;
            }
            if (tag.kind == '?') {
                const std::string close = "{/" + tag.name + "}";
                auto close_pos = t.find(close, tag.end);
                if (close_pos == std::string_view::npos)
                    throw TemplateError(tag.name, "unterminated section '{?" + tag.name + "}'");
                if (field_present(ctx, tag.name))
                    out += render_range(t.substr(tag.end, close_pos - tag.end), ctx);
                i = close_pos + close.size();
                continue;
            }
        }
        out += c;
        ++i;
    }
    return out;
}

} // namespace detail

inline std::string render_template(std::string_view tmpl, const PromptContext& ctx) {
    return detail::render_range(tmpl, ctx);
}

/// Built-in templates.  The files under prompts/ in the source tree carry the
/// same text and a test keeps them in sync.
inline PromptTemplate builtin_template(PromptRole role) {
    static const std::string kExpertSystem =
        "You are an expert in first-order logic and the Lean 4 proof assistant. "
        "You reason strictly step by step using first-order inference rules.";
    static const std::string kTheoremBlock =
        "Theorem context:\n```lean\n{context}\n```\n\nConjecture:\n```lean\n{conjecture}\n```\n";

    switch (role) {
    case PromptRole::ProposeAxioms:
        return {kExpertSystem,
                kTheoremBlock +
                    "\nList between {m_min} and {m_max} axioms, taken from the context or from standard "
                    "first-order reasoning, that are most relevant to proving the conjecture. Write one "
                    "axiom per line as a numbered list and state each axiom precisely. Do not write a proof."};
    case PromptRole::SynthesizeAxiom:
        return {kExpertSystem,
                kTheoremBlock +
                    "\nSelected axioms:\n{selected_axioms}\n\nCombine the selected axioms into a single "
                    "second-level axiom: a derived property that follows from them and helps prove the "
                    "conjecture. Reply with the statement of the derived axiom only."};
    case PromptRole::ProposeStrategy:
        return {kExpertSystem,
                kTheoremBlock +
                    "\nFocus axiom set:\n{axiom_set}\n\nPropose a proof strategy for the conjecture that is "
                    "built around the focus axiom set. Describe the sequence of first-order inference steps "
                    "(instantiations, eliminations, case splits) in plain language. Do not write Lean code."};
    case PromptRole::GenerateProof:
        return {kExpertSystem,
                kTheoremBlock +
                    "{?strategy}\nFollow this proof strategy:\n{strategy}\n{/strategy}"
                    "{?insight}\nAnalysis of the previous failed attempts:\n{insight}\n{/insight}"
                    "{?history}\nPrevious failed attempts with their compiler errors (oldest first):\n\n"
                    "{history}\n{/history}"
                    "\nWrite a complete Lean 4 proof of the conjecture. Reproduce the theorem statement "
                    "exactly, replace `sorry` with the proof, and wrap the code with ```lean``` markers."};
    case PromptRole::AnnotateSubpropositions:
        return {kExpertSystem,
                "Conjecture:\n```lean\n{conjecture}\n```\n\nFailed proof with inline compiler errors:\n"
                "```lean\n{proof}\n```\n\nInsert a comment line of the form "
                "`-- Sub-proposition: <what the following block establishes>` before each logical block of "
                "the proof. Do not change, delete, or reorder any existing line, and keep every "
                "`{comment_prefix}` comment exactly as it is. Return the whole annotated proof wrapped with "
                "```lean``` markers."};
    case PromptRole::AnalyzeFailures:
        return {kExpertSystem,
                kTheoremBlock +
                    "\nPrevious failed attempts, annotated with sub-propositions and compiler errors "
                    "(oldest first):\n\n{history}\n\nExamine the mistakes at the level of sub-propositions. "
                    "Identify recurring error patterns, which sub-propositions fail and why, and suggest a "
                    "concrete strategy for the next revision. Do not write a full proof."};
    case PromptRole::TranslateTptp:
        return {"Your task is to convert TPTP format axioms and conjectures into Lean 4 format. Follow these "
                "guidelines:\n"
                "\n"
                "1. Type Declarations:\n"
                "   - Declare all necessary types using `Type`\n"
                "   - Define type variables when needed using uppercase letters (e.g., `A`, `B`)\n"
                "\n"
                "2. Axiom Conversion:\n"
                "   - Convert each TPTP axiom into a complete Lean 4 definition\n"
                "   - Use appropriate Lean 4 syntax for logical operators:\n"
                "   - Do not use `sorry` in axiom definitions\n"
                "\n"
                "3. Conjecture Conversion:\n"
                "   - Convert the conjecture into a theorem statement\n"
                "   - Use `theorem` for the declaration\n"
                "   - End the theorem with `sorry`\n"
                "   - Do not provide the proof\n"
                "\n"
                "4. Code Format:\n"
                "   - Wrap all Lean 4 code with ```lean``` markers\n"
                "   - Use proper indentation\n"
                "   - Include necessary imports\n"
                "   - Add brief comments explaining complex translations\n"
                "\n"
                "5. Variable Handling:\n"
                "   - Declare all variables with appropriate types\n"
                "   - Maintain consistent variable naming between axioms and conjecture\n"
                "   - Use meaningful variable names when possible\n"
                "\n"
                "Please ensure each conversion preserves the original logical meaning while following Lean "
                "4's syntax and type system.",
                "Input TPTP Format:\n"
                "\n"
                "Axioms:\n"
                "{axioms}\n"
                "\n"
                "Conjecture:\n"
                "{conjecture}\n"
                "\n"
                "Please provide the Lean 4 conversion following the guidelines above."};
    case PromptRole::OptimizeContext:
        return {kExpertSystem,
                kTheoremBlock +
                    "\nRemove every declaration from the context that is not needed to state or prove the "
                    "conjecture. Keep the remaining declarations exactly as written and do not rename "
                    "anything. Return only the reduced context wrapped with ```lean``` markers."};
    }
    throw InvalidArgument("unknown prompt role");
}

/// Fields that must be non-empty lists for a role, beyond plain presence.
inline std::vector<std::string> required_nonempty_lists(PromptRole role) {
    if (role == PromptRole::AnalyzeFailures)
        return {"history"};
    return {};
}

class PromptLibrary {
public:
    PromptLibrary() {
        for (auto r : kAllRoles)
            templates_[r] = builtin_template(r);
    }

    /// Override built-ins with `<Role>.system.txt` / `<Role>.user.txt` files
    /// found in `dir`.  Missing files keep the built-in text.
    static PromptLibrary from_directory(const std::filesystem::path& dir) {
        PromptLibrary lib;
        for (auto r : kAllRoles) {
            auto base = std::string(role_name(r));
            if (auto s = read_file(dir / (base + ".system.txt")))
                lib.templates_[r].system = *s;
            if (auto u = read_file(dir / (base + ".user.txt")))
                lib.templates_[r].user = *u;
        }
        return lib;
    }

    const PromptTemplate& get(PromptRole r) const { return templates_.at(r); }

    RenderedPrompt render(PromptRole role, const PromptContext& context) const {
        for (const auto& list : required_nonempty_lists(role)) {
            if (!context.is_object() || !context.contains(list))
                throw TemplateError(list, "prompt template requires missing context field '" + list + "'");
            const auto& v = context.at(list);
            if (!v.is_array() || v.empty())
                throw TemplateError(list, std::string(role_name(role)) + " requires a non-empty '" + list + "'");
        }
        const auto& t = get(role);
        RenderedPrompt out{render_template(t.system, context), render_template(t.user, context)};
        if (out.user_text.empty())
            throw TemplateError("user", "rendered user prompt is empty");
        return out;
    }

private:
    static std::optional<std::string> read_file(const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        if (!in)
            return std::nullopt;
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    std::map<PromptRole, PromptTemplate> templates_;
};

inline RenderedPrompt render_prompt(PromptRole role, const PromptContext& context) {
    static const PromptLibrary lib;
    return lib.render(role, context);
}

} // namespace dream
