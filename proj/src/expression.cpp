#include "gesr/expression.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace gesr {

bool is_binary(Op op) {
    return op == Op::add || op == Op::sub || op == Op::mul || op == Op::div || op == Op::pow;
}

bool is_unary(Op op) {
    return op == Op::log || op == Op::exp || op == Op::neg || op == Op::abs;
}

std::string_view op_symbol(Op op) {
    switch (op) {
    case Op::add: return "+";
    case Op::sub: return "-";
    case Op::mul: return "*";
    case Op::div: return "/";
    case Op::pow: return "^";
    case Op::log: return "ln";
    case Op::exp: return "exp";
    case Op::neg: return "-";
    case Op::abs: return "abs";
    case Op::var: return "var";
    case Op::constant: return "const";
    }
    return "?";
}

ExpressionTree ExpressionTree::variable(int index) {
    if (index < 1) throw std::invalid_argument("variable index must be >= 1");
    ExpressionTree t;
    Node n;
    n.op = Op::var;
    n.var = index;
    t.nodes_.push_back(n);
    t.eval_depth_ = 1;
    return t;
}

ExpressionTree ExpressionTree::constant(double value) {
    ExpressionTree t;
    Node n;
    n.op = Op::constant;
    n.value = value;
    t.nodes_.push_back(n);
    t.eval_depth_ = 1;
    return t;
}

ExpressionTree ExpressionTree::unary(Op op, ExpressionTree child) {
    if (!is_unary(op)) throw std::invalid_argument("not a unary operation");
    if (child.empty()) throw std::invalid_argument("unary child is empty");
    ExpressionTree t = std::move(child);
    Node n;
    n.op = op;
    n.lhs = static_cast<std::int32_t>(t.nodes_.size()) - 1;
    t.nodes_.push_back(n);
    t.recompute_depth();
    return t;
}

ExpressionTree ExpressionTree::binary(Op op, ExpressionTree lhs, ExpressionTree rhs) {
    if (!is_binary(op)) throw std::invalid_argument("not a binary operation");
    if (lhs.empty() || rhs.empty()) throw std::invalid_argument("binary child is empty");
    ExpressionTree t = std::move(lhs);
    std::int32_t shift = static_cast<std::int32_t>(t.nodes_.size());
    for (const Node& n : rhs.nodes_) {
        Node m = n;
        if (m.lhs >= 0) m.lhs += shift;
        if (m.rhs >= 0) m.rhs += shift;
        t.nodes_.push_back(m);
    }
    Node n;
    n.op = op;
    n.lhs = shift - 1;
    n.rhs = static_cast<std::int32_t>(t.nodes_.size()) - 1;
    t.nodes_.push_back(n);
    t.recompute_depth();
    return t;
}

void ExpressionTree::recompute_depth() {
    // Max operand-stack depth of the postorder evaluation pass.
    int depth = 0, peak = 0;
    for (const Node& n : nodes_) {
        if (is_binary(n.op)) depth -= 1;           // pops two, pushes one
        else if (!is_unary(n.op)) depth += 1;      // leaf push
        peak = std::max(peak, depth);
    }
    eval_depth_ = peak;
}

int ExpressionTree::max_variable() const {
    int m = 0;
    for (const Node& n : nodes_)
        if (n.op == Op::var && n.var > m) m = n.var;
    return m;
}

EvalResult ExpressionTree::evaluate(std::span<const double> row) const {
    if (nodes_.empty()) throw std::logic_error("evaluate on empty expression");
    double local[64];
    std::vector<double> heap;
    double* st = local;
    if (eval_depth_ > 64) {
        heap.resize(static_cast<std::size_t>(eval_depth_));
        st = heap.data();
    }
    int sp = 0;
    for (const Node& n : nodes_) {
        double x;
        switch (n.op) {
        case Op::var:
            if (static_cast<std::size_t>(n.var) > row.size())
                throw std::out_of_range("variable x" + std::to_string(n.var) +
                                        " out of range for row of length " +
                                        std::to_string(row.size()));
            x = row[static_cast<std::size_t>(n.var - 1)];
            break;
        case Op::constant: x = n.value; break;
        case Op::add: sp -= 1; x = st[sp - 1] + st[sp]; break;
        case Op::sub: sp -= 1; x = st[sp - 1] - st[sp]; break;
        case Op::mul: sp -= 1; x = st[sp - 1] * st[sp]; break;
        case Op::div: sp -= 1; x = st[sp - 1] / st[sp]; break;
        case Op::pow: sp -= 1; x = std::pow(st[sp - 1], st[sp]); break;
        case Op::log: x = std::log(st[sp - 1]); break;
        case Op::exp: x = std::exp(st[sp - 1]); break;
        case Op::neg: x = -st[sp - 1]; break;
        case Op::abs: x = std::fabs(st[sp - 1]); break;
        default: throw std::logic_error("bad node");
        }
        if (!std::isfinite(x)) return EvalResult::math_error(n.op);
        if (n.op == Op::var || n.op == Op::constant) {
            st[sp++] = x;
        } else {
            st[sp - 1] = x;
        }
    }
    return EvalResult::success(st[0]);
}

namespace {

std::string format_value(double v) {
    if (std::floor(v) == v && std::fabs(v) < 1e15)
        return std::to_string(static_cast<long long>(v));
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void render(const std::vector<ExpressionTree::Node>& nodes, std::int32_t i, std::string& out) {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    if (n.op == Op::var) {
        out += "x" + std::to_string(n.var);
    } else if (n.op == Op::constant) {
        out += format_value(n.value);
    } else if (is_unary(n.op)) {
        out += "(";
        out += op_symbol(n.op);
        out += " ";
        render(nodes, n.lhs, out);
        out += ")";
    } else {
        out += "(";
        render(nodes, n.lhs, out);
        out += " ";
        out += op_symbol(n.op);
        out += " ";
        render(nodes, n.rhs, out);
        out += ")";
    }
}

} // namespace

std::string ExpressionTree::to_text() const {
    if (nodes_.empty()) return "";
    std::string out;
    render(nodes_, static_cast<std::int32_t>(nodes_.size()) - 1, out);
    return out;
}

namespace {

std::vector<std::string_view> tokenize(std::string_view text) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
        } else if (c == '(' || c == ')') {
            tokens.push_back(text.substr(i, 1));
            ++i;
        } else {
            std::size_t j = i;
            while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != '\n' &&
                   text[j] != '\r' && text[j] != '(' && text[j] != ')')
                ++j;
            tokens.push_back(text.substr(i, j - i));
            i = j;
        }
    }
    return tokens;
}

struct TokenParser {
    std::span<const std::string_view> toks;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error("expression parse error at token " + std::to_string(pos) +
                                 ": " + what);
    }

    std::string_view next() {
        if (pos >= toks.size()) fail("unexpected end of input");
        return toks[pos++];
    }

    void expect(std::string_view t) {
        auto got = next();
        if (got != t) fail("expected '" + std::string(t) + "', got '" + std::string(got) + "'");
    }

    static bool unary_name(std::string_view t, Op& op) {
        if (t == "ln") { op = Op::log; return true; }
        if (t == "exp") { op = Op::exp; return true; }
        if (t == "-") { op = Op::neg; return true; }
        if (t == "abs") { op = Op::abs; return true; }
        return false;
    }

    static bool binary_name(std::string_view t, Op& op) {
        if (t == "+") { op = Op::add; return true; }
        if (t == "-") { op = Op::sub; return true; }
        if (t == "*") { op = Op::mul; return true; }
        if (t == "/") { op = Op::div; return true; }
        if (t == "^") { op = Op::pow; return true; }
        return false;
    }

    ExpressionTree parse_expr() {
        auto t = next();
        if (t == "(") {
            // "(" is followed either by a unary operator or by the left
            // operand of a binary expression; an operand never starts with an
            // operator token, so a leading "-" always means unary minus.
            if (pos >= toks.size()) fail("unexpected end of input after '('");
            Op op;
            if (unary_name(toks[pos], op)) {
                ++pos;
                ExpressionTree child = parse_expr();
                expect(")");
                return ExpressionTree::unary(op, std::move(child));
            }
            ExpressionTree lhs = parse_expr();
            auto opt = next();
            Op bop;
            if (!binary_name(opt, bop)) fail("expected binary operator, got '" + std::string(opt) + "'");
            ExpressionTree rhs = parse_expr();
            expect(")");
            return ExpressionTree::binary(bop, std::move(lhs), std::move(rhs));
        }
        if (t == ")") fail("unexpected ')'");
        if (t.size() >= 2 && t[0] == 'x') {
            char* end = nullptr;
            long idx = std::strtol(t.data() + 1, &end, 10);
            if (end == t.data() + t.size() && idx >= 1)
                return ExpressionTree::variable(static_cast<int>(idx));
        }
        {
            std::string buf(t);
            char* end = nullptr;
            double v = std::strtod(buf.c_str(), &end);
            if (end == buf.c_str() + buf.size() && std::isfinite(v))
                return ExpressionTree::constant(v);
        }
        fail("unrecognized token '" + std::string(t) + "'");
    }
};

} // namespace

ExpressionTree parse_expression_tokens(std::span<const std::string_view> tokens) {
    TokenParser p{tokens};
    ExpressionTree t = p.parse_expr();
    if (p.pos != tokens.size())
        throw std::runtime_error("expression parse error: trailing tokens after position " +
                                 std::to_string(p.pos));
    return t;
}

ExpressionTree parse_expression(std::string_view text) {
    auto tokens = tokenize(text);
    if (tokens.empty()) throw std::runtime_error("expression parse error: empty input");
    return parse_expression_tokens(tokens);
}

} // namespace gesr
