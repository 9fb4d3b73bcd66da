#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "gesr/expression.hpp"
#include "gesr/rng.hpp"

using namespace gesr;

namespace {

ExpressionTree x(int i) { return ExpressionTree::variable(i); }
ExpressionTree c(double v) { return ExpressionTree::constant(v); }

double eval_ok(const ExpressionTree& t, std::vector<double> row) {
    EvalResult r = t.evaluate(row);
    REQUIRE(r.ok);
    return r.value;
}

// Independent random-tree generator for round-trip property tests.
ExpressionTree random_tree(Rng& rng, int depth) {
    int kind = depth <= 0 ? uniform_int(rng, 0, 1) : uniform_int(rng, 0, 3);
    switch (kind) {
    case 0: return x(uniform_int(rng, 1, 5));
    case 1: {
        static const double consts[] = {-1.0, 1.0, 2.5, 0.1, -3.75, 1e-3};
        return c(consts[uniform_int(rng, 0, 5)]);
    }
    case 2: {
        static const Op unops[] = {Op::log, Op::exp, Op::neg, Op::abs};
        return ExpressionTree::unary(unops[uniform_int(rng, 0, 3)], random_tree(rng, depth - 1));
    }
    default: {
        static const Op biops[] = {Op::add, Op::sub, Op::mul, Op::div, Op::pow};
        return ExpressionTree::binary(biops[uniform_int(rng, 0, 4)], random_tree(rng, depth - 1),
                                      random_tree(rng, depth - 1));
    }
    }
}

} // namespace

TEST_SUITE("expression") {

TEST_CASE("builders render fully parenthesized text") {
    CHECK(x(1).to_text() == "x1");
    CHECK(x(12).to_text() == "x12");
    CHECK(c(1).to_text() == "1");
    CHECK(c(-1).to_text() == "-1");
    CHECK(c(2.5).to_text() == "2.5");
    CHECK(ExpressionTree::binary(Op::add, x(1), x(2)).to_text() == "(x1 + x2)");
    CHECK(ExpressionTree::unary(Op::log, c(-1)).to_text() == "(ln -1)");
    CHECK(ExpressionTree::unary(Op::neg, x(1)).to_text() == "(- x1)");
    CHECK(ExpressionTree::unary(Op::abs, x(1)).to_text() == "(abs x1)");
    CHECK(ExpressionTree::binary(
              Op::mul, ExpressionTree::binary(Op::sub, x(1), c(1)),
              ExpressionTree::unary(Op::exp, x(2)))
              .to_text() == "((x1 - 1) * (exp x2))");
    CHECK(ExpressionTree::binary(Op::pow, x(1), c(-1)).to_text() == "(x1 ^ -1)");
}

TEST_CASE("size, emptiness and variable bookkeeping") {
    ExpressionTree t = ExpressionTree::binary(Op::add, x(3), c(1));
    CHECK(t.size() == 3);
    CHECK_FALSE(t.empty());
    CHECK(t.max_variable() == 3);
    CHECK(ExpressionTree().empty());
    CHECK(ExpressionTree().size() == 0);
    CHECK(c(1).max_variable() == 0);
    CHECK_THROWS_AS(ExpressionTree::variable(0), std::invalid_argument);
}

TEST_CASE("arithmetic on data rows") {
    CHECK(eval_ok(ExpressionTree::binary(Op::add, x(1), x(2)), {2, 3}) == 5.0);
    CHECK(eval_ok(ExpressionTree::binary(Op::sub, x(1), x(2)), {2, 3}) == -1.0);
    CHECK(eval_ok(ExpressionTree::binary(Op::mul, x(1), x(2)), {2, 3}) == 6.0);
    CHECK(eval_ok(ExpressionTree::binary(Op::div, x(1), x(2)), {3, 2}) == 1.5);
    CHECK(eval_ok(ExpressionTree::binary(Op::pow, x(1), x(2)), {2, 3}) == 8.0);
    CHECK(eval_ok(ExpressionTree::unary(Op::neg, x(1)), {4}) == -4.0);
    CHECK(eval_ok(ExpressionTree::unary(Op::abs, x(1)), {-4}) == 4.0);
    CHECK(eval_ok(ExpressionTree::unary(Op::exp, c(0)), {}) == 1.0);
    CHECK(eval_ok(ExpressionTree::unary(Op::log, x(1)), {std::exp(1.0)})
          == doctest::Approx(1.0));
    // ((x1 - x2) * (x1 + x2)) = x1^2 - x2^2
    ExpressionTree t = ExpressionTree::binary(Op::mul,
                                              ExpressionTree::binary(Op::sub, x(1), x(2)),
                                              ExpressionTree::binary(Op::add, x(1), x(2)));
    CHECK(eval_ok(t, {3, 1}) == 8.0);
}

TEST_CASE("math failures surface as errors, not NaN/inf") {
    auto fails_with = [](const ExpressionTree& t, std::vector<double> row, Op op) {
        EvalResult r = t.evaluate(row);
        CHECK_FALSE(r.ok);
        CHECK(r.failed_op == op);
    };
    fails_with(ExpressionTree::binary(Op::div, x(1), x(2)), {1, 0}, Op::div);
    fails_with(ExpressionTree::unary(Op::log, c(0)), {}, Op::log);
    fails_with(ExpressionTree::unary(Op::log, c(-1)), {}, Op::log);
    fails_with(ExpressionTree::binary(Op::pow, x(1), x(2)), {-2, 0.5}, Op::pow);
    // exp(exp(100)) overflows
    fails_with(ExpressionTree::unary(Op::exp, ExpressionTree::unary(Op::exp, x(1))), {100},
               Op::exp);
    // overflow through multiplication of huge intermediates
    ExpressionTree big = ExpressionTree::unary(Op::exp, c(700));
    fails_with(ExpressionTree::binary(Op::mul, big, big), {}, Op::mul);
    // integer powers of negative bases stay fine
    CHECK(eval_ok(ExpressionTree::binary(Op::pow, x(1), x(2)), {-2, 2}) == 4.0);
}

TEST_CASE("variable index beyond the row is a contract violation") {
    ExpressionTree t = ExpressionTree::binary(Op::add, x(1), x(3));
    CHECK_THROWS_AS(t.evaluate(std::vector<double>{1.0, 2.0}), std::out_of_range);
    CHECK_THROWS_AS(ExpressionTree().evaluate(std::vector<double>{1.0}), std::logic_error);
}

TEST_CASE("parsing the textual forms") {
    CHECK(parse_expression("x1") == x(1));
    CHECK(parse_expression("-1") == c(-1));
    CHECK(parse_expression("(x1 + x2)") == ExpressionTree::binary(Op::add, x(1), x(2)));
    CHECK(parse_expression("(ln -1)") == ExpressionTree::unary(Op::log, c(-1)));
    CHECK(parse_expression("(- x2)") == ExpressionTree::unary(Op::neg, x(2)));
    CHECK(parse_expression("( x1 - x2 )") == ExpressionTree::binary(Op::sub, x(1), x(2)));
    CHECK(parse_expression("((x1 ^ 1) / (abs x2))")
          == ExpressionTree::binary(Op::div, ExpressionTree::binary(Op::pow, x(1), c(1)),
                                    ExpressionTree::unary(Op::abs, x(2))));
    // parentheses need no surrounding whitespace; operator tokens do
    CHECK(parse_expression("(ln(x1 * x2))")
          == ExpressionTree::unary(Op::log, ExpressionTree::binary(Op::mul, x(1), x(2))));
}

TEST_CASE("malformed expressions are rejected") {
    for (const char* bad : {"", "(", "()", "(x1 +)", "(x1 + x2", "x1 x2", "(foo x1)",
                            "(x1 ? x2)", "x0", "(+ x1 x2)", "(x1 + x2))"}) {
        CHECK_THROWS_AS(parse_expression(bad), std::runtime_error);
    }
}

TEST_CASE("text round-trip preserves the tree exactly") {
    Rng rng(20240801);
    for (int i = 0; i < 200; ++i) {
        ExpressionTree t = random_tree(rng, 5);
        ExpressionTree back = parse_expression(t.to_text());
        CHECK(back == t);
    }
}

TEST_CASE("full-precision constant round-trip") {
    ExpressionTree t = c(0.1);
    ExpressionTree back = parse_expression(t.to_text());
    CHECK(eval_ok(back, {}) == 0.1);
    ExpressionTree big = c(12345678901234.0);
    CHECK(parse_expression(big.to_text()) == big);
}

} // TEST_SUITE
