#include "gesr/grammar.hpp"

#include <algorithm>
#include <cctype>

#include "gesr/util.hpp"

namespace gesr {

GrammarError::GrammarError(const std::string& what, int line_, int column_)
    : std::runtime_error("grammar error at line " + std::to_string(line_) + ", column " +
                         std::to_string(column_) + ": " + what),
      line(line_),
      column(column_) {}

const std::vector<GrammarAlt>& Grammar::alternatives(const std::string& nonterminal) const {
    auto it = rules.find(nonterminal);
    if (it == rules.end())
        throw std::invalid_argument("no rule for nonterminal " + nonterminal);
    return it->second;
}

void Grammar::validate() const {
    if (start_symbol.empty() || !rules.count(start_symbol))
        throw std::invalid_argument("grammar start symbol '" + start_symbol + "' has no rule");
    for (const auto& name : nonterminals) {
        auto it = rules.find(name);
        if (it == rules.end())
            throw std::invalid_argument("listed nonterminal " + name + " has no rule");
        if (it->second.empty())
            throw std::invalid_argument("rule " + name + " has no alternatives");
        for (const auto& alt : it->second) {
            if (alt.empty())
                throw std::invalid_argument("rule " + name + " has an empty alternative");
            for (const auto& item : alt)
                if (item.is_nonterminal && !rules.count(item.text))
                    throw std::invalid_argument("undefined nonterminal " + item.text +
                                                " referenced from " + name);
        }
    }
}

namespace {

struct ItemRef {
    std::string name;
    int line;
    int column;
};

struct RuleBuilder {
    std::string lhs;
    int line = 0;
    std::vector<GrammarAlt> alts;
    GrammarAlt cur;
    bool after_bar = false;

    void add_item(GrammarItem item) {
        cur.push_back(std::move(item));
        after_bar = false;
    }

    void bar(int line_no, int col) {
        if (cur.empty())
            throw GrammarError("empty alternative in rule " + lhs, line_no, col);
        alts.push_back(std::move(cur));
        cur.clear();
        after_bar = true;
    }

    void finish() {
        if (!cur.empty()) {
            alts.push_back(std::move(cur));
            cur.clear();
        } else if (after_bar) {
            throw GrammarError("empty alternative at end of rule " + lhs, line, 1);
        }
        if (alts.empty())
            throw GrammarError("empty rule " + lhs, line, 1);
    }
};

bool is_space_char(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// Scans one line's worth of rule body, appending items/alternatives.
void scan_body(std::string_view text, int line_no, int col_offset, RuleBuilder& rule,
               std::vector<ItemRef>& refs) {
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        int col = static_cast<int>(i) + 1 + col_offset;
        if (is_space_char(c)) {
            ++i;
        } else if (c == '|') {
            rule.bar(line_no, col);
            ++i;
        } else if (c == '<') {
            std::size_t j = text.find('>', i + 1);
            if (j == std::string_view::npos)
                throw GrammarError("unterminated nonterminal", line_no, col);
            if (j == i + 1)
                throw GrammarError("empty nonterminal name", line_no, col);
            std::string name(text.substr(i, j - i + 1));
            refs.push_back({name, line_no, col});
            rule.add_item({std::move(name), true});
            i = j + 1;
        } else if (c == '(' || c == ')') {
            rule.add_item({std::string(1, c), false});
            ++i;
        } else {
            std::size_t j = i;
            while (j < text.size() && !is_space_char(text[j]) && text[j] != '<' &&
                   text[j] != '|' && text[j] != '(' && text[j] != ')')
                ++j;
            rule.add_item({std::string(text.substr(i, j - i)), false});
            i = j;
        }
    }
}

} // namespace

Grammar parse_grammar(std::string_view text) {
    Grammar g;
    std::vector<ItemRef> refs;
    RuleBuilder rule;
    bool have_rule = false;

    auto flush_rule = [&] {
        if (!have_rule) return;
        rule.finish();
        if (g.rules.count(rule.lhs))
            throw GrammarError("duplicate rule for " + rule.lhs, rule.line, 1);
        g.nonterminals.push_back(rule.lhs);
        g.rules.emplace(rule.lhs, std::move(rule.alts));
        rule = RuleBuilder{};
    };

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        ++line_no;

        std::size_t def = line.find("::=");
        if (def != std::string_view::npos) {
            flush_rule();
            std::string_view lhs = trim(line.substr(0, def));
            std::size_t lhs_col = line.find_first_not_of(" \t");
            int col = lhs_col == std::string_view::npos ? 1 : static_cast<int>(lhs_col) + 1;
            if (lhs.size() < 3 || lhs.front() != '<' || lhs.back() != '>' ||
                lhs.find_first_of("<>", 1) != lhs.size() - 1)
                throw GrammarError("rule left-hand side must be a single <nonterminal>, got '" +
                                       std::string(lhs) + "'",
                                   line_no, col);
            rule.lhs = std::string(lhs);
            rule.line = line_no;
            have_rule = true;
            scan_body(line.substr(def + 3), line_no, static_cast<int>(def) + 3, rule, refs);
        } else if (!trim(line).empty()) {
            if (!have_rule)
                throw GrammarError("rule body before any '::=' definition", line_no,
                                   static_cast<int>(line.find_first_not_of(" \t")) + 1);
            scan_body(line, line_no, 0, rule, refs);
        }

        if (eol == text.size()) break;
        pos = eol + 1;
    }
    flush_rule();

    if (g.nonterminals.empty()) throw GrammarError("no rules found", 1, 1);
    g.start_symbol = g.nonterminals.front();
    for (const auto& ref : refs)
        if (!g.rules.count(ref.name))
            throw GrammarError("undefined nonterminal " + ref.name, ref.line, ref.column);
    g.validate();
    return g;
}

std::string_view default_grammar_text() {
    return "<expr> ::= (<expr> <biop> <expr>) | (<unop> <expr>) | <var> | <const>\n"
           "<biop> ::= + | - | * | / | ^\n"
           "<unop> ::= ln | exp | - | abs\n"
           "<var> ::= x1 | x2\n"
           "<const> ::= -1 | 1\n";
}

Grammar instantiate_vars(const Grammar& tmpl, int n_features) {
    if (n_features < 1)
        throw std::invalid_argument("instantiate_vars: n_features must be >= 1, got " +
                                    std::to_string(n_features));
    Grammar g = tmpl;
    std::vector<GrammarAlt> alts;
    alts.reserve(static_cast<std::size_t>(n_features));
    for (int i = 1; i <= n_features; ++i)
        alts.push_back({GrammarItem{"x" + std::to_string(i), false}});
    auto [it, inserted] = g.rules.insert_or_assign("<var>", std::move(alts));
    (void)it;
    if (inserted) g.nonterminals.push_back("<var>");
    return g;
}

TokenMapping map_genotype_tokens(const Grammar& grammar, std::span<const int> codons,
                                 bool want_trace) {
    TokenMapping out;
    GrammarItem start{grammar.start_symbol, true};
    std::vector<const GrammarItem*> stack;
    stack.push_back(&start);
    std::size_t pos = 0;

    while (!stack.empty()) {
        const GrammarItem* item = stack.back();
        stack.pop_back();
        if (!item->is_nonterminal) {
            out.tokens.push_back(item->text);
            continue;
        }
        const auto& alts = grammar.alternatives(item->text);
        int m = static_cast<int>(alts.size());
        int codon = -1;
        int choice = 0;
        if (m > 1) {
            if (pos >= codons.size()) {
                out.valid = false;
                out.consumed = static_cast<int>(pos);
                out.failed_rule = item->text;
                return out;
            }
            codon = codons[pos++];
            choice = ((codon % m) + m) % m;
        }
        if (want_trace) out.trace.push_back({item->text, m, codon, choice});
        const GrammarAlt& alt = alts[static_cast<std::size_t>(choice)];
        for (auto rit = alt.rbegin(); rit != alt.rend(); ++rit) stack.push_back(&*rit);
    }
    out.valid = true;
    out.consumed = static_cast<int>(pos);
    return out;
}

MappingOutcome map_genotype(const Grammar& grammar, std::span<const int> codons) {
    TokenMapping tm = map_genotype_tokens(grammar, codons, false);
    MappingOutcome out;
    out.consumed = tm.consumed;
    if (!tm.valid) return out;
    std::vector<std::string_view> views(tm.tokens.begin(), tm.tokens.end());
    out.tree = parse_expression_tokens(views);
    out.valid = true;
    return out;
}

} // namespace gesr
