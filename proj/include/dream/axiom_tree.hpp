// Copyright (c) 2026, DREAM prover contributors
// SPDX-License-Identifier: Apache-2.0
//
// Two-level combinatorial axiom tree.  The first level holds M model-proposed
// axioms; every k-subset of them owns one leaf, a synthesized second-level
// axiom that seeds a proof strategy.  Leaves are synthesized when consumed.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <regex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dream/combinatorics.hpp"
#include "dream/errors.hpp"
#include "dream/gateway.hpp"
#include "dream/theorem.hpp"

namespace dream {

enum class AxiomOrigin { ModelProposed, FromContext };

struct Axiom {
    std::string id;
    std::string statement;
    AxiomOrigin origin = AxiomOrigin::ModelProposed;
};

struct SecondLevelAxiom {
    IndexTuple parent_indices;
    std::string statement;
};

/// A free-text plan derived from one second-level axiom.
struct Strategy {
    std::string description;
    SecondLevelAxiom focus_axioms;
};

enum class LeafSelection { Lexicographic, Random };

struct AxiomTreeOptions {
    int m_min = 3;
    int m_max = 5;
    int k = 2;
    LeafSelection selection = LeafSelection::Lexicographic;
    std::uint64_t seed = 0;
};

class AxiomTree {
public:
    AxiomTree(std::string theorem_id, std::vector<Axiom> first_level, int k,
              LeafSelection selection = LeafSelection::Lexicographic, std::uint64_t seed = 0)
        : theorem_id_(std::move(theorem_id)), first_level_(std::move(first_level)), k_(k), selection_(selection),
          seed_(seed) {
        const int m = static_cast<int>(first_level_.size());
        check_combination_args(m, k_);
        for (const auto& a : first_level_)
            if (a.statement.empty())
                throw TreeConstructionError("axiom " + a.id + " has an empty statement");
        order_ = k_combinations(m, k_);
        if (selection_ == LeafSelection::Random) {
            std::mt19937_64 rng(seed_ ^ text::fnv1a(theorem_id_));
            for (std::size_t i = order_.size(); i > 1; --i)
                std::swap(order_[i - 1], order_[rng() % i]);
        }
    }

    const std::string& theorem_id() const { return theorem_id_; }
    const std::vector<Axiom>& first_level() const { return first_level_; }
    int m() const { return static_cast<int>(first_level_.size()); }
    int k() const { return k_; }
    std::size_t capacity() const { return order_.size(); }
    std::size_t cursor() const { return cursor_; }
    bool exhausted() const { return cursor_ >= order_.size(); }
    const std::map<IndexTuple, SecondLevelAxiom>& leaves() const { return leaves_; }
    const std::vector<IndexTuple>& consumption_order() const { return order_; }
    const std::vector<std::string>& warnings() const { return warnings_; }
    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

    std::optional<IndexTuple> peek() const {
        if (exhausted())
            return std::nullopt;
        return order_[cursor_];
    }

    /// Leaves already consumed, in consumption order.
    std::vector<SecondLevelAxiom> consumed() const {
        std::vector<SecondLevelAxiom> out;
        for (std::size_t i = 0; i < cursor_; ++i)
            if (auto it = leaves_.find(order_[i]); it != leaves_.end())
                out.push_back(it->second);
        return out;
    }

    /// Store the leaf for the cursor's combination and advance.
    const SecondLevelAxiom& consume(std::string statement) {
        if (exhausted())
            throw PreconditionError("axiom tree exhausted");
        if (statement.empty())
            throw TreeConstructionError("second-level axiom statement is empty");
        const auto& key = order_[cursor_];
        auto [it, inserted] = leaves_.emplace(key, SecondLevelAxiom{key, std::move(statement)});
        (void)inserted;
        ++cursor_;
        return it->second;
    }

    nlohmann::json to_json() const {
        nlohmann::json first = nlohmann::json::array();
        for (const auto& a : first_level_)
            first.push_back({{"id", a.id},
                             {"statement", a.statement},
                             {"origin", a.origin == AxiomOrigin::FromContext ? "FromContext" : "ModelProposed"}});
        nlohmann::json leaves = nlohmann::json::array();
        for (const auto& key : order_)
            if (auto it = leaves_.find(key); it != leaves_.end())
                leaves.push_back({{"parent_indices", it->second.parent_indices}, {"statement", it->second.statement}});
        return {{"theorem_id", theorem_id_},
                {"k", k_},
                {"m", m()},
                {"capacity", capacity()},
                {"selection", selection_ == LeafSelection::Random ? "random" : "lexicographic"},
                {"seed", seed_},
                {"first_level", first},
                {"leaves", leaves},
                {"cursor", cursor_},
                {"warnings", warnings_}};
    }

private:
    std::string theorem_id_;
    std::vector<Axiom> first_level_;
    int k_;
    LeafSelection selection_;
    std::uint64_t seed_;
    std::vector<IndexTuple> order_;
    std::map<IndexTuple, SecondLevelAxiom> leaves_;
    std::size_t cursor_ = 0;
    std::vector<std::string> warnings_;
};

/// Items of a numbered or bulleted list; falls back to non-empty lines when
/// the completion has no list markers.  Code fences are ignored.
inline std::vector<std::string> parse_axiom_list(std::string_view completion) {
    static const std::regex marker(R"(^\s*(?:\d+[.):]|[-*•])\s+(.*\S)\s*$)");
    std::vector<std::string> marked;
    std::vector<std::string> plain;
    for (const auto& raw : text::split_lines(completion).lines) {
        std::string line(text::trim(raw));
        if (line.empty() || line.starts_with("```"))
            continue;
        std::smatch m;
        if (std::regex_match(raw, m, marker))
            marked.push_back(std::string(text::trim(m[1].str())));
        plain.push_back(line);
    }
    return marked.empty() ? plain : marked;
}

inline std::vector<std::string> context_axiom_names(std::string_view context) {
    std::vector<std::string> names;
    for (const auto& b : lean::split_blocks(context)) {
        if (b.kind != lean::BlockKind::Declaration)
            continue;
        int depth = 0;
        for (const auto& l : text::split_lines(b.text).lines) {
            if (!lean::detail::scan_line(l, depth))
                continue;
            if (lean::declaration_keyword(l) == "axiom")
                if (auto n = lean::theorem_name(l))
                    names.push_back(*n);
            break;
        }
    }
    return names;
}

inline PromptContext theorem_prompt_context(const Theorem& t) {
    return {{"context", t.context_source}, {"conjecture", t.conjecture_source}};
}

inline AxiomTree build_axiom_tree(const Theorem& theorem, const Gateway& gateway, const AxiomTreeOptions& opt = {}) {
    if (opt.m_min < 1 || opt.m_max < opt.m_min)
        throw InvalidArgument("axiom count range must satisfy 1 <= min <= max");
    auto ctx = theorem_prompt_context(theorem);
    ctx["m_min"] = opt.m_min;
    ctx["m_max"] = opt.m_max;
    auto resp = gateway.invoke(PromptRole::ProposeAxioms, ctx, theorem.id);
    auto items = parse_axiom_list(resp.text);
    if (items.empty())
        throw TreeConstructionError("model proposed no axioms for " + theorem.id);

    std::vector<std::string> warnings;
    if (static_cast<int>(items.size()) > opt.m_max) {
        warnings.push_back("truncated " + std::to_string(items.size()) + " proposed axioms to " +
                           std::to_string(opt.m_max));
        items.resize(static_cast<std::size_t>(opt.m_max));
    } else if (static_cast<int>(items.size()) < opt.m_min) {
        warnings.push_back("model proposed " + std::to_string(items.size()) + " axioms, fewer than " +
                           std::to_string(opt.m_min));
    }

    const auto known = context_axiom_names(theorem.context_source);
    std::vector<Axiom> first;
    for (std::size_t i = 0; i < items.size(); ++i) {
        Axiom a{"A" + std::to_string(i + 1), items[i], AxiomOrigin::ModelProposed};
        for (const auto& n : known) {
            std::regex word("(^|[^A-Za-z0-9_'.])" + std::regex_replace(n, std::regex(R"([.^$|()\[\]{}*+?\\])"), R"(\$&)") +
                            "($|[^A-Za-z0-9_'])");
            if (std::regex_search(a.statement, word)) {
                a.origin = AxiomOrigin::FromContext;
                break;
            }
        }
        first.push_back(std::move(a));
    }

    int k = opt.k;
    if (k > static_cast<int>(first.size())) {
        warnings.push_back("combination size " + std::to_string(k) + " exceeds axiom count; using " +
                           std::to_string(first.size()));
        k = static_cast<int>(first.size());
    }
    AxiomTree tree(theorem.id, std::move(first), k, opt.selection, opt.seed);
    for (auto& w : warnings)
        tree.add_warning(std::move(w));
    return tree;
}

/// Synthesize and consume the next leaf, or nullopt once every combination
/// has been used.  Only the selected first-level axioms and the theorem are
/// shown to the model.
inline std::optional<SecondLevelAxiom> next_leaf(AxiomTree& tree, const Gateway& gateway, const Theorem& theorem) {
    auto key = tree.peek();
    if (!key)
        return std::nullopt;
    std::string selected;
    for (std::size_t i = 0; i < key->size(); ++i) {
        const auto& a = tree.first_level()[static_cast<std::size_t>((*key)[i] - 1)];
        selected += std::to_string(i + 1) + ". " + a.statement + "\n";
    }
    auto ctx = theorem_prompt_context(theorem);
    ctx["selected_axioms"] = lean::strip_trailing_newlines(selected);
    auto resp = gateway.invoke(PromptRole::SynthesizeAxiom, ctx, theorem.id);
    std::string statement(text::trim(resp.text));
    if (statement.empty())
        throw BackendError("model returned an empty second-level axiom");
    return tree.consume(std::move(statement));
}

inline nlohmann::json to_json(const SecondLevelAxiom& s) {
    return {{"parent_indices", s.parent_indices}, {"statement", s.statement}};
}

inline nlohmann::json to_json(const Strategy& s) {
    return {{"description", s.description}, {"focus_axioms", to_json(s.focus_axioms)}};
}

} // namespace dream
