// Copyright 2026 The t2s Authors
// SPDX-License-Identifier: Apache-2.0

#include "t2s/prompt.hpp"

#include "t2s/text.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <numeric>
#include <set>

namespace t2s {

namespace {

constexpr std::string_view kPreamble =
    "You are SQL developer, an developer with exceptional capabilities in understanding and generating SQL queries.\n"
    "SQL Developer will be given a database schema and a natural language question in English by database administrator,\n"
    "and will have to generate a SQL query to answer the question, following these rules:\n"
    "\n"
    "SQL Developer will always provide a SQL query as an answer, even if it's uncertain or doesn't fully understand the question.\n"
    "When providing the answer, SQL Developer will ONLY provide the SQL query, no more and no less.\n"
    "SQL Developer is guaranteed to produce a correct SQL query and is always certain of the query's correctness.\n"
    "The SQL query provided by SQL Developer must retrieve the requested information based on the given schema and question.\n"
    "The SQL query must adhere to standard SQL syntax and should be compatible with commonly used\n"
    "relational database management systems (e.g., MySQL, PostgreSQL, SQLite).";

std::string budget_message(std::size_t estimate, std::size_t limit) {
    return "prompt needs " + std::to_string(estimate) + " tokens but the budget is " +
           std::to_string(limit) + " (over by " + std::to_string(estimate - limit) + ")";
}

}  // namespace

const char* to_string(Strategy s) noexcept {
    switch (s) {
        case Strategy::zero_shot: return "zero_shot";
        case Strategy::few_shot: return "few_shot";
        case Strategy::structured_few_shot: return "structured_few_shot";
        case Strategy::schema_aware_few_shot: return "schema_aware_few_shot";
        case Strategy::instruction_focused_few_shot: return "instruction_focused_few_shot";
    }
    return "few_shot";
}

Strategy parse_strategy(std::string_view name) {
    for (Strategy s : {Strategy::zero_shot, Strategy::few_shot, Strategy::structured_few_shot,
                       Strategy::schema_aware_few_shot, Strategy::instruction_focused_few_shot})
        if (name == to_string(s)) return s;
    throw Error(ErrorKind::config, "unknown strategy '" + std::string(name) + "'");
}

std::string_view default_preamble() noexcept { return kPreamble; }

BudgetError::BudgetError(std::size_t estimate, std::size_t limit)
    : Error(ErrorKind::budget, budget_message(estimate, limit)), estimate_(estimate), limit_(limit) {}

std::size_t estimate_tokens(std::string_view s) noexcept {
    std::size_t count = 0;
    bool in_word = false;
    for (char c : s) {
        const bool ws = text::is_space(c);
        if (!ws && !in_word) ++count;
        in_word = !ws;
    }
    return count;
}

std::string schema_signature(const DatabaseSchema& schema) {
    std::string out;
    for (std::size_t i = 0; i < schema.tables().size(); ++i) {
        const Table& t = schema.tables()[i];
        if (i) out += ", ";
        out += t.name + "(";
        for (std::size_t j = 0; j < t.columns.size(); ++j) {
            if (j) out += ", ";
            out += t.columns[j].name;
        }
        out += ")";
    }
    return out;
}

namespace {

struct Word {
    std::string_view raw;      // as written, punctuation trimmed at the end
    std::string folded;        // lower-case, punctuation trimmed both ends
};

std::vector<Word> words_of(std::string_view s) {
    std::vector<Word> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && text::is_space(s[i])) ++i;
        std::size_t j = i;
        while (j < s.size() && !text::is_space(s[j])) ++j;
        if (j > i) {
            std::string_view w = s.substr(i, j - i);
            while (!w.empty() && std::string_view(".,;:!?\"')").find(w.back()) != std::string_view::npos)
                w.remove_suffix(1);
            std::string_view f = w;
            while (!f.empty() && std::string_view("\"'(").find(f.front()) != std::string_view::npos)
                f.remove_prefix(1);
            out.push_back({w, text::lower(f)});
        }
        i = j;
    }
    return out;
}

// Cue sequences (lower-case); `operand` says whether the next word belongs to
// the phrase.
struct Cue {
    std::array<std::string_view, 2> words;
    bool operand;
};

constexpr std::array kCues = {
    Cue{{"more", "than"}, true},    Cue{{"less", "than"}, true},     Cue{{"greater", "than"}, true},
    Cue{{"fewer", "than"}, true},   Cue{{"higher", "than"}, true},   Cue{{"lower", "than"}, true},
    Cue{{"larger", "than"}, true},  Cue{{"smaller", "than"}, true},  Cue{{"older", "than"}, true},
    Cue{{"younger", "than"}, true}, Cue{{"at", "least"}, true},      Cue{{"at", "most"}, true},
    Cue{{"equal", "to"}, true},     Cue{{"number", "of"}, false},    Cue{{"above", ""}, true},
    Cue{{"below", ""}, true},       Cue{{"exceeding", ""}, true},    Cue{{"before", ""}, true},
    Cue{{"after", ""}, true},       Cue{{"total", ""}, false},       Cue{{"average", ""}, false},
    Cue{{"mean", ""}, false},       Cue{{"sum", ""}, false},         Cue{{"count", ""}, false},
    Cue{{"maximum", ""}, false},    Cue{{"minimum", ""}, false},     Cue{{"most", ""}, false},
    Cue{{"least", ""}, false},      Cue{{"highest", ""}, false},     Cue{{"lowest", ""}, false},
    Cue{{"largest", ""}, false},    Cue{{"smallest", ""}, false},    Cue{{"biggest", ""}, false},
    Cue{{"oldest", ""}, false},     Cue{{"youngest", ""}, false},
};

}  // namespace

std::vector<std::string> constraint_phrases(std::string_view instruction) {
    const auto words = words_of(instruction);
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < words.size()) {
        bool matched = false;
        if (words[i].folded == "between" && i + 3 < words.size() && words[i + 2].folded == "and") {
            const char* b = words[i].raw.data();
            const char* e = words[i + 3].raw.data() + words[i + 3].raw.size();
            out.emplace_back(b, e);
            i += 4;
            continue;
        }
        for (const Cue& cue : kCues) {
            const std::size_t len = cue.words[1].empty() ? 1 : 2;
            if (i + len > words.size()) continue;
            if (words[i].folded != cue.words[0]) continue;
            if (len == 2 && words[i + 1].folded != cue.words[1]) continue;
            std::size_t last = i + len - 1;
            if (cue.operand) {
                if (last + 1 >= words.size()) continue;
                ++last;
            }
            const char* b = words[i].raw.data();
            const char* e = words[last].raw.data() + words[last].raw.size();
            out.emplace_back(b, e);
            i = last + 1;
            matched = true;
            break;
        }
        if (!matched) ++i;
    }
    return out;
}

namespace {

bool attaches_preamble(Strategy s) {
    return s == Strategy::structured_few_shot || s == Strategy::instruction_focused_few_shot;
}

std::string key_lines(const DatabaseSchema& schema) {
    std::string out;
    if (!schema.primary_keys().empty()) {
        out += "Primary keys: ";
        for (std::size_t i = 0; i < schema.primary_keys().size(); ++i)
            out += (i ? ", " : "") + schema.primary_keys()[i].to_string();
        out += "\n";
    }
    if (!schema.foreign_keys().empty()) {
        out += "Foreign keys: ";
        for (std::size_t i = 0; i < schema.foreign_keys().size(); ++i) {
            const auto& fk = schema.foreign_keys()[i];
            out += (i ? ", " : "") + fk.from.to_string() + " -> " + fk.to.to_string();
        }
        out += "\n";
    }
    return out;
}

std::string schema_block(const DatabaseSchema& schema, Strategy s) {
    std::string out = "Schema: " + schema_signature(schema) + "\n";
    if (s == Strategy::schema_aware_few_shot) out += key_lines(schema);
    return out;
}

}  // namespace

RenderedPrompt render(const PromptSpec& spec, const TokenEstimator& estimator) {
    if (!spec.target.schema) throw Error(ErrorKind::config, "prompt target has no schema");
    if (spec.strategy == Strategy::zero_shot && !spec.examples.empty())
        throw Error(ErrorKind::config, "zero_shot prompts take no examples");
    for (const auto& ex : spec.examples) {
        if (!ex.schema) throw Error(ErrorKind::config, "example '" + ex.point.id + "' has no schema");
        if (ex.point.instruction.empty() || ex.point.gold_sql.empty())
            throw Error(ErrorKind::config, "example '" + ex.point.id + "' lacks instruction or SQL");
    }

    std::string out;
    if (attaches_preamble(spec.strategy)) {
        out += spec.preamble ? *spec.preamble : std::string(default_preamble());
        out += "\n\n";
    }
    for (const auto& ex : spec.examples) {
        out += "Instruction: " + ex.point.instruction + "\n";
        out += schema_block(*ex.schema, spec.strategy);
        out += "SQL: " + ex.point.gold_sql + "\n\n";
    }
    out += "Instruction: " + spec.target.instruction + "\n";
    if (spec.strategy == Strategy::instruction_focused_few_shot) {
        const auto phrases = constraint_phrases(spec.target.instruction);
        if (!phrases.empty()) out += "Constraints: " + text::join(phrases, "; ") + "\n";
    }
    for (const auto& note : spec.target_notes) out += note + "\n";
    out += schema_block(*spec.target.schema, spec.strategy);
    out += "SQL:";

    const std::size_t estimate = estimator ? estimator(out) : estimate_tokens(out);
    if (estimate > spec.max_input_tokens) throw BudgetError(estimate, spec.max_input_tokens);
    return {std::move(out), estimate, spec};
}

SelectionMode parse_selection_mode(std::string_view name) {
    if (name == "first_k") return SelectionMode::first_k;
    if (name == "seeded_random" || name == "random") return SelectionMode::seeded_random;
    if (name == "token_overlap" || name == "overlap") return SelectionMode::token_overlap;
    throw Error(ErrorKind::config, "unknown selection mode '" + std::string(name) + "'");
}

std::vector<std::string> overlap_tokens(std::string_view s) {
    std::vector<std::string> out;
    for (const auto& w : text::split_ws(s)) {
        std::size_t b = 0, e = w.size();
        while (b < e && !text::is_ident_char(w[b])) ++b;
        while (e > b && !text::is_ident_char(w[e - 1])) --e;
        if (e > b) out.push_back(text::lower(std::string_view(w).substr(b, e - b)));
    }
    return out;
}

double token_jaccard(std::string_view a, std::string_view b) {
    const auto ta = overlap_tokens(a);
    const auto tb = overlap_tokens(b);
    const std::set<std::string> sa(ta.begin(), ta.end());
    const std::set<std::string> sb(tb.begin(), tb.end());
    if (sa.empty() && sb.empty()) return 0.0;
    std::size_t inter = 0;
    for (const auto& t : sa) inter += sb.count(t);
    const std::size_t uni = sa.size() + sb.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<ExamplePoint> select_examples(std::span<const ExamplePoint> corpus,
                                          std::string_view target_instruction, std::size_t k,
                                          Selection selection) {
    if (k > corpus.size())
        throw Error(ErrorKind::config, "cannot select " + std::to_string(k) + " examples from a corpus of " +
                                           std::to_string(corpus.size()));
    std::vector<std::size_t> order;
    switch (selection.mode) {
        case SelectionMode::first_k:
            order.resize(corpus.size());
            std::iota(order.begin(), order.end(), 0);
            break;
        case SelectionMode::seeded_random:
            order = seeded_permutation(corpus.size(), selection.seed);
            break;
        case SelectionMode::token_overlap: {
            std::vector<double> score(corpus.size());
            for (std::size_t i = 0; i < corpus.size(); ++i)
                score[i] = token_jaccard(target_instruction, corpus[i].instruction);
            order.resize(corpus.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
            break;
        }
    }
    std::vector<ExamplePoint> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const ExamplePoint& p = corpus[order[i]];
        if (p.instruction.empty() || p.schema_id.empty() || p.gold_sql.empty())
            throw Error(ErrorKind::data, "example '" + p.id + "' is incomplete");
        out.push_back(p);
    }
    return out;
}

CostReport estimate_cost(const CostModel& m) {
    if (m.max_attempts == 0) throw Error(ErrorKind::config, "cost model needs at least one attempt");
    CostReport r;
    r.prompt_tokens = m.k * m.example_tokens + m.question_tokens;
    r.per_layer_token_pair_ops = r.prompt_tokens * r.prompt_tokens;
    r.total_ops_over_attempts = m.max_attempts * r.per_layer_token_pair_ops;
    r.validation_ops = m.max_attempts * m.output_tokens;
    r.selection_ops = m.example_set_size;
    if (m.layers && m.hidden_dim)
        r.full_attention_ops = *m.layers * *m.hidden_dim * r.total_ops_over_attempts;
    return r;
}

std::string approx_millions(std::uint64_t value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f million", static_cast<double>(value) / 1e6);
    return buf;
}

}  // namespace t2s
