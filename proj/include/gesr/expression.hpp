#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gesr {

enum class Op : std::uint8_t {
    add, sub, mul, div, pow,   // binary
    log, exp, neg, abs,        // unary
    var, constant              // leaves
};

bool is_binary(Op op);
bool is_unary(Op op);
std::string_view op_symbol(Op op);

// Result of evaluating an expression on one data row: either a finite value
// or a math error tagged with the operation that produced it. Division by
// zero, log of a non-positive number, fractional powers of negative bases and
// overflow all surface as math errors; a finite result is never NaN/inf.
struct EvalResult {
    double value = 0.0;
    Op failed_op = Op::constant;
    bool ok = false;

    static EvalResult success(double v) { return {v, Op::constant, true}; }
    static EvalResult math_error(Op op) { return {0.0, op, false}; }
};

// Immutable expression tree stored as a postorder node arena (children before
// parents), which makes evaluation a simple stack-machine pass.
class ExpressionTree {
public:
    struct Node {
        Op op = Op::constant;
        std::int32_t lhs = -1;   // postorder index of left/only child
        std::int32_t rhs = -1;   // postorder index of right child
        std::int32_t var = 0;    // 1-based variable index (var nodes)
        double value = 0.0;      // constant value

        bool operator==(const Node&) const = default;
    };

    ExpressionTree() = default;

    static ExpressionTree variable(int index);
    static ExpressionTree constant(double value);
    static ExpressionTree unary(Op op, ExpressionTree child);
    static ExpressionTree binary(Op op, ExpressionTree lhs, ExpressionTree rhs);

    bool empty() const { return nodes_.empty(); }
    int size() const { return static_cast<int>(nodes_.size()); }
    int max_variable() const;
    const std::vector<Node>& nodes() const { return nodes_; }

    // Throws std::out_of_range if the tree references a variable beyond the
    // row length (contract violation, distinct from a math error).
    EvalResult evaluate(std::span<const double> row) const;

    // Fully parenthesized infix form: "(x1 + x2)", "(ln -1)", "1".
    std::string to_text() const;

    bool operator==(const ExpressionTree&) const = default;

private:
    std::vector<Node> nodes_;
    int eval_depth_ = 0;

    void recompute_depth();
};

// Parses the textual form produced by to_text (and by the grammar's phenotype
// token stream). Throws std::runtime_error on malformed input.
ExpressionTree parse_expression(std::string_view text);
ExpressionTree parse_expression_tokens(std::span<const std::string_view> tokens);

} // namespace gesr
