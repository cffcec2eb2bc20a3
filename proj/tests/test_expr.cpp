#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "fracstab/expr.hpp"
#include "fracstab/mittag_leffler.hpp"

using fracstab::Expr;
using fracstab::ParseError;

namespace {

const std::vector<std::string> kX = {"x"};
const std::vector<std::string> kXtuw = {"x", "tau", "u", "w"};

double eval1(const Expr& e, double x) {
    const double v[1] = {x};
    return e.eval(v);
}

}  // namespace

TEST_CASE("basic arithmetic") {
    const Expr e = Expr::parse("x^2 + 1", kX);
    CHECK(eval1(e, 2.0) == 5.0);

    const Expr d = Expr::parse("u - w", kXtuw);
    const double v[4] = {0.0, 0.0, 3.0, 3.0};
    CHECK(d.eval(v) == 0.0);

    const Expr c = Expr::parse("exp(ln(x))", kX);
    CHECK(eval1(c, 1.7) == doctest::Approx(1.7).epsilon(1e-14));
}

TEST_CASE("operator precedence and associativity") {
    CHECK(eval1(Expr::parse("2*x + 3*x", kX), 1.0) == 5.0);
    CHECK(eval1(Expr::parse("2^3^2", kX), 0.0) == 512.0);  // right-assoc
    CHECK(eval1(Expr::parse("-x^2", kX), 3.0) == -9.0);
    CHECK(eval1(Expr::parse("(1 - x)/(1 + x)", kX), 3.0) == doctest::Approx(-0.5));
    CHECK(eval1(Expr::parse("2 - 3 - 4", kX), 0.0) == -5.0);  // left-assoc
}

TEST_CASE("builtins and constants") {
    CHECK(eval1(Expr::parse("gamma(x)", kX), 5.0) == doctest::Approx(24.0));
    CHECK(eval1(Expr::parse("min(x, 2)", kX), 7.0) == 2.0);
    CHECK(eval1(Expr::parse("max(x, 2)", kX), 7.0) == 7.0);
    CHECK(eval1(Expr::parse("abs(0 - x)", kX), 3.0) == 3.0);
    CHECK(eval1(Expr::parse("sin(pi*x)", kX), 0.5) == doctest::Approx(1.0));
    CHECK(eval1(Expr::parse("ln(e)", kX), 1.0) == doctest::Approx(1.0));
    CHECK(eval1(Expr::parse("mittag_leffler(0.5, 1, x)", kX), 0.3) ==
          doctest::Approx(fracstab::mittag_leffler(0.5, 1.0, 0.3)));
}

TEST_CASE("parameter bindings fold to constants") {
    const std::map<std::string, double> params{{"lambda", 0.5}, {"k", 3.0}};
    const Expr e = Expr::parse("lambda*x^k", kX, &params);
    CHECK(eval1(e, 2.0) == doctest::Approx(4.0));
}

TEST_CASE("errors carry positions and names") {
    CHECK_THROWS_AS((void)Expr::parse("x +", kX), ParseError);
    CHECK_THROWS_AS((void)Expr::parse("(x", kX), ParseError);
    CHECK_THROWS_AS((void)Expr::parse("x + $", kX), ParseError);

    try {
        (void)Expr::parse("x + bogus", kX);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
        CHECK(e.col == 5);
        CHECK(e.line == 1);
    }

    try {
        (void)Expr::parse("min(x)", kX);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("expects 2") != std::string::npos);
    }

    try {
        (void)Expr::parse("1 +\n nope(x)", kX);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }

    CHECK_THROWS(Expr::parse("x", std::vector<std::string>{}));
}

TEST_CASE("round-trip on a fixed corpus") {
    const std::vector<std::string> corpus = {
        "x", "1", "0.5", "x + 1", "x - 1", "1 - x", "x*x", "x/2", "2/x", "x^2",
        "x^0.5", "2^x", "-x", "-x^2", "-(x + 1)", "(x + 1)*(x - 1)", "x + x + x",
        "x - x - x", "x*(x + 1)", "x/(x + 1)", "(x^2)^3", "x^2^3", "x^-2",
        "exp(x)", "ln(x + 1)", "sin(x)", "cos(2*x)", "sqrt(x)", "gamma(x + 1)",
        "abs(x - 2)", "min(x, 1)", "max(x, 1 - x)", "mittag_leffler(0.5, 1, x)",
        "exp(-x)*sin(3*x)", "1/(1 + exp(-x))", "x^2 + 2*x + 1", "(1 + x)^0.5",
        "x*x*x", "x/x/x", "2*pi*x", "e^x", "sin(x)^2 + cos(x)^2",
        "sqrt(abs(x - 0.5))", "ln(exp(x))", "max(min(x, 1), 0)",
        "mittag_leffler(0.7, 1.3, -x)", "x^(1 + x)", "(2*x - 1)/(x + 3)",
        "0.100000000000000006*x", "exp(x)/gamma(x + 2)", "1 + 2 + 3 + x",
        "-1 + x", "x - -1",
    };
    CHECK(corpus.size() >= 50);
    for (const auto& src : corpus) {
        CAPTURE(src);
        const Expr e1 = Expr::parse(src, kX);
        const std::string printed = e1.str();
        CAPTURE(printed);
        const Expr e2 = Expr::parse(printed, kX);
        CHECK(e1 == e2);
        CHECK(e2.str() == printed);  // printing is a fixed point
    }
}

namespace {

// random tree generator for the round-trip property
std::string random_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
    std::uniform_real_distribution<double> num(-3.0, 3.0);
    switch (pick(rng)) {
        case 0: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", num(rng));
            return buf;
        }
        case 1: return "x";
        case 2: return "(" + random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1) + ")";
        case 3: return "(" + random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1) + ")";
        case 4: return "(" + random_expr(rng, depth - 1) + "*" + random_expr(rng, depth - 1) + ")";
        case 5: return "(" + random_expr(rng, depth - 1) + "/" + random_expr(rng, depth - 1) + ")";
        case 6: return "-" + random_expr(rng, depth - 1);
        default: return "sin(" + random_expr(rng, depth - 1) + ")";
    }
}

}  // namespace

TEST_CASE("round-trip on random trees") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::string src = random_expr(rng, 4);
        CAPTURE(src);
        const Expr e1 = Expr::parse(src, kX);
        const Expr e2 = Expr::parse(e1.str(), kX);
        CHECK(e1 == e2);
    }
}

TEST_CASE("evaluation is deterministic") {
    const Expr e = Expr::parse("sin(x)*exp(x) + gamma(x + 1)/(x + 2)", kX);
    for (double x : {0.1, 0.77, 2.3}) {
        const double a = eval1(e, x);
        const double b = eval1(e, x);
        CHECK(std::memcmp(&a, &b, sizeof a) == 0);
    }
}
