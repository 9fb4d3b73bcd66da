#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gesr/expression.hpp"

namespace gesr {

struct GrammarError : std::runtime_error {
    int line = 0;
    int column = 0;
    GrammarError(const std::string& what, int line_, int column_);
};

struct GrammarItem {
    std::string text;
    bool is_nonterminal = false;
    bool operator==(const GrammarItem&) const = default;
};

// One alternative = ordered sequence of items; alternative order defines the
// indices the modulo rule selects among.
using GrammarAlt = std::vector<GrammarItem>;

struct Grammar {
    std::string start_symbol;                    // first rule's left-hand side
    std::vector<std::string> nonterminals;       // definition order
    std::unordered_map<std::string, std::vector<GrammarAlt>> rules;

    const std::vector<GrammarAlt>& alternatives(const std::string& nonterminal) const;
    // Throws std::invalid_argument when a referenced nonterminal has no rule,
    // a rule has no alternatives / an empty alternative, or the start symbol
    // is missing.
    void validate() const;
};

// Parses BNF text: `<name> ::= items | items` definitions, one per logical
// rule; lines without `::=` continue the previous rule. Inside alternatives,
// `<...>` is a nonterminal; `(` and `)` are single-character terminals; any
// other whitespace-free run is one terminal token. Throws GrammarError with
// line/column on malformed input or dangling nonterminal references.
Grammar parse_grammar(std::string_view text);

// Built-in expression grammar (two placeholder feature variables); resize the
// variable rule with instantiate_vars before use on a concrete dataset.
std::string_view default_grammar_text();

// Returns a copy of `tmpl` whose `<var>` rule has exactly n_features
// alternatives x1..xn. Throws std::invalid_argument when n_features < 1.
Grammar instantiate_vars(const Grammar& tmpl, int n_features);

struct MappingStep {
    std::string rule;      // nonterminal expanded
    int alternatives = 0;  // number of alternatives m
    int codon = -1;        // codon consumed; -1 when the rule has one alternative
    int choice = 0;        // selected alternative index (codon mod m)
};

struct TokenMapping {
    bool valid = false;
    std::vector<std::string> tokens;  // partial prefix when invalid
    int consumed = 0;
    std::string failed_rule;          // nonterminal awaiting a codon at exhaustion
    std::vector<MappingStep> trace;   // filled only when requested
};

// Genotype-to-phenotype mapping: depth-first leftmost expansion from the
// start symbol; each expansion of a nonterminal with m >= 2 alternatives
// consumes one codon and selects alternative (codon mod m); rules with a
// single alternative consume nothing. No wrapping: running out of codons
// yields an invalid outcome. Deterministic in (grammar, codons).
TokenMapping map_genotype_tokens(const Grammar& grammar, std::span<const int> codons,
                                 bool want_trace = false);

struct MappingOutcome {
    bool valid = false;
    ExpressionTree tree;  // empty when invalid
    int consumed = 0;

    bool operator==(const MappingOutcome&) const = default;
};

// Token mapping plus parse into an ExpressionTree. Throws std::runtime_error
// if the grammar emits tokens that are not a well-formed expression.
MappingOutcome map_genotype(const Grammar& grammar, std::span<const int> codons);

} // namespace gesr
