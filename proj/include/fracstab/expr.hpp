#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Small expression language used to define psi, sigma, delta, f and K in
// problem files. Supports +,-,*,/,^, the builtins exp, ln, sin, cos, sqrt,
// gamma, abs, min, max, mittag_leffler(a,b,z), the constants pi and e, and
// caller-supplied parameter bindings (folded to numbers at parse time).

namespace fracstab {

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, int line_, int col_)
        : std::runtime_error(what), line(line_), col(col_) {}
    int line;
    int col;
};

class Expr {
  public:
    Expr() = default;

    // vars fixes both the set of legal identifiers and the slot order that
    // eval() expects. params are optional named constants.
    static Expr parse(std::string_view src, std::span<const std::string> vars,
                      const std::map<std::string, double>* params = nullptr);

    double eval(std::span<const double> values) const;
    std::string str() const;

    bool empty() const { return nodes_.empty(); }
    const std::vector<std::string>& variables() const { return vars_; }

    friend bool operator==(const Expr& a, const Expr& b);

  private:
    enum class Kind : unsigned char { num, var, neg, add, sub, mul, div, pow, call };
    enum class Fn : unsigned char {
        exp, ln, sin, cos, sqrt, gamma, abs, min, max, mittag_leffler
    };
    struct Node {
        Kind kind;
        Fn fn;
        double num;
        int child[3];
    };

    friend class ExprParser;
    static const char* fn_name(Fn f);
    double eval_node(int idx, std::span<const double> values) const;
    void print_node(int idx, std::string& out, int parent_prec, bool rhs) const;
    static bool nodes_equal(const Expr& a, int ia, const Expr& b, int ib);

    std::vector<Node> nodes_;
    int root_ = -1;
    std::vector<std::string> vars_;
};

}  // namespace fracstab
