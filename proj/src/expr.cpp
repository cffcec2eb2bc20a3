#include "fracstab/expr.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "fracstab/mittag_leffler.hpp"

namespace fracstab {

class ExprParser {
  public:
    ExprParser(std::string_view src, std::span<const std::string> vars,
               const std::map<std::string, double>* params)
        : src_(src), vars_(vars), params_(params) {}

    Expr run() {
        Expr e;
        e.vars_.assign(vars_.begin(), vars_.end());
        out_ = &e;
        next_token();
        e.root_ = parse_expr();
        if (tok_ != Tok::end) fail("unexpected trailing input");
        return e;
    }

  private:
    enum class Tok { end, num, ident, plus, minus, star, slash, caret, lparen, rparen, comma };

    using Kind = Expr::Kind;
    using Fn = Expr::Fn;

    static constexpr struct {
        const char* name;
        Fn id;
        int arity;
    } kFns[] = {
        {"exp", Fn::exp, 1},   {"ln", Fn::ln, 1},       {"sin", Fn::sin, 1},
        {"cos", Fn::cos, 1},   {"sqrt", Fn::sqrt, 1},   {"gamma", Fn::gamma, 1},
        {"abs", Fn::abs, 1},   {"min", Fn::min, 2},     {"max", Fn::max, 2},
        {"mittag_leffler", Fn::mittag_leffler, 3},
    };

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + " at line " + std::to_string(tok_line_) + ", column " +
                             std::to_string(tok_col_),
                         tok_line_, tok_col_);
    }

    void advance_char() {
        if (pos_ < src_.size() && src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void next_token() {
        while (pos_ < src_.size() &&
               (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                src_[pos_] == '\r')) {
            advance_char();
        }
        tok_line_ = line_;
        tok_col_ = col_;
        if (pos_ >= src_.size()) {
            tok_ = Tok::end;
            return;
        }
        const char c = src_[pos_];
        if ((c >= '0' && c <= '9') || c == '.') {
            const char* begin = src_.data() + pos_;
            char* end = nullptr;
            tok_num_ = std::strtod(begin, &end);
            if (end == begin) fail("malformed number");
            while (src_.data() + pos_ != end) advance_char();
            tok_ = Tok::num;
            return;
        }
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   ((src_[pos_] >= 'a' && src_[pos_] <= 'z') ||
                    (src_[pos_] >= 'A' && src_[pos_] <= 'Z') ||
                    (src_[pos_] >= '0' && src_[pos_] <= '9') || src_[pos_] == '_')) {
                advance_char();
            }
            tok_text_ = src_.substr(start, pos_ - start);
            tok_ = Tok::ident;
            return;
        }
        advance_char();
        switch (c) {
            case '+': tok_ = Tok::plus; return;
            case '-': tok_ = Tok::minus; return;
            case '*': tok_ = Tok::star; return;
            case '/': tok_ = Tok::slash; return;
            case '^': tok_ = Tok::caret; return;
            case '(': tok_ = Tok::lparen; return;
            case ')': tok_ = Tok::rparen; return;
            case ',': tok_ = Tok::comma; return;
            default: fail(std::string("unexpected character '") + c + "'");
        }
    }

    int add_node(Kind kind, Fn fn, double num, int c0 = -1, int c1 = -1, int c2 = -1) {
        out_->nodes_.push_back({kind, fn, num, {c0, c1, c2}});
        return static_cast<int>(out_->nodes_.size()) - 1;
    }

    int parse_expr() {
        int lhs = parse_term();
        while (tok_ == Tok::plus || tok_ == Tok::minus) {
            const Kind k = tok_ == Tok::plus ? Kind::add : Kind::sub;
            next_token();
            const int rhs = parse_term();
            lhs = add_node(k, Fn::exp, 0.0, lhs, rhs);
        }
        return lhs;
    }

    int parse_term() {
        int lhs = parse_factor();
        while (tok_ == Tok::star || tok_ == Tok::slash) {
            const Kind k = tok_ == Tok::star ? Kind::mul : Kind::div;
            next_token();
            const int rhs = parse_factor();
            lhs = add_node(k, Fn::exp, 0.0, lhs, rhs);
        }
        return lhs;
    }

    int parse_factor() {
        if (tok_ == Tok::minus) {
            next_token();
            const int c = parse_factor();
            return add_node(Kind::neg, Fn::exp, 0.0, c);
        }
        if (tok_ == Tok::plus) {
            next_token();
            return parse_factor();
        }
        return parse_power();
    }

    int parse_power() {
        const int base = parse_atom();
        if (tok_ == Tok::caret) {
            next_token();
            const int expo = parse_factor();  // right-associative
            return add_node(Kind::pow, Fn::exp, 0.0, base, expo);
        }
        return base;
    }

    int parse_atom() {
        if (tok_ == Tok::num) {
            const double v = tok_num_;
            next_token();
            return add_node(Kind::num, Fn::exp, v);
        }
        if (tok_ == Tok::lparen) {
            next_token();
            const int inner = parse_expr();
            if (tok_ != Tok::rparen) fail("expected ')'");
            next_token();
            return inner;
        }
        if (tok_ != Tok::ident) fail("expected a value");

        const std::string name(tok_text_);
        const int at_line = tok_line_, at_col = tok_col_;
        next_token();

        if (tok_ == Tok::lparen) {
            for (const auto& fn : kFns) {
                if (name == fn.name) return parse_call(fn.id, fn.arity, name);
            }
            throw ParseError("unknown function '" + name + "' at line " +
                                 std::to_string(at_line) + ", column " +
                                 std::to_string(at_col),
                             at_line, at_col);
        }

        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (vars_[i] == name)
                return add_node(Kind::var, Fn::exp, 0.0, static_cast<int>(i));
        }
        if (name == "pi") return add_node(Kind::num, Fn::exp, 3.14159265358979312);
        if (name == "e") return add_node(Kind::num, Fn::exp, 2.71828182845904509);
        if (params_) {
            const auto it = params_->find(name);
            if (it != params_->end()) return add_node(Kind::num, Fn::exp, it->second);
        }
        throw ParseError("unknown identifier '" + name + "' at line " +
                             std::to_string(at_line) + ", column " + std::to_string(at_col),
                         at_line, at_col);
    }

    int parse_call(Fn id, int arity, const std::string& name) {
        next_token();  // consume '('
        int args[3] = {-1, -1, -1};
        int count = 0;
        if (tok_ != Tok::rparen) {
            while (true) {
                if (count >= 3) fail("too many arguments to '" + name + "'");
                args[count++] = parse_expr();
                if (tok_ == Tok::comma) {
                    next_token();
                    continue;
                }
                break;
            }
        }
        if (tok_ != Tok::rparen) fail("expected ')' in call to '" + name + "'");
        next_token();
        if (count != arity) {
            fail("function '" + name + "' expects " + std::to_string(arity) +
                 " argument(s), got " + std::to_string(count));
        }
        return add_node(Kind::call, id, 0.0, args[0], args[1], args[2]);
    }

    std::string_view src_;
    std::span<const std::string> vars_;
    const std::map<std::string, double>* params_;
    Expr* out_ = nullptr;

    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Tok tok_ = Tok::end;
    double tok_num_ = 0.0;
    std::string_view tok_text_;
    int tok_line_ = 1, tok_col_ = 1;
};

Expr Expr::parse(std::string_view src, std::span<const std::string> vars,
                 const std::map<std::string, double>* params) {
    if (vars.empty()) throw std::invalid_argument("Expr::parse: empty variable set");
    return ExprParser(src, vars, params).run();
}

double Expr::eval(std::span<const double> values) const {
    if (root_ < 0) throw std::logic_error("Expr::eval on empty expression");
    if (values.size() != vars_.size())
        throw std::invalid_argument("Expr::eval: value count does not match variables");
    return eval_node(root_, values);
}

double Expr::eval_node(int idx, std::span<const double> values) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    switch (n.kind) {
        case Kind::num: return n.num;
        case Kind::var: return values[static_cast<std::size_t>(n.child[0])];
        case Kind::neg: return -eval_node(n.child[0], values);
        case Kind::add: return eval_node(n.child[0], values) + eval_node(n.child[1], values);
        case Kind::sub: return eval_node(n.child[0], values) - eval_node(n.child[1], values);
        case Kind::mul: return eval_node(n.child[0], values) * eval_node(n.child[1], values);
        case Kind::div: return eval_node(n.child[0], values) / eval_node(n.child[1], values);
        case Kind::pow:
            return std::pow(eval_node(n.child[0], values), eval_node(n.child[1], values));
        case Kind::call: {
            const double a = eval_node(n.child[0], values);
            switch (n.fn) {
                case Fn::exp: return std::exp(a);
                case Fn::ln: return std::log(a);
                case Fn::sin: return std::sin(a);
                case Fn::cos: return std::cos(a);
                case Fn::sqrt: return std::sqrt(a);
                case Fn::gamma: return std::tgamma(a);
                case Fn::abs: return std::fabs(a);
                case Fn::min: return std::fmin(a, eval_node(n.child[1], values));
                case Fn::max: return std::fmax(a, eval_node(n.child[1], values));
                case Fn::mittag_leffler:
                    return mittag_leffler(a, eval_node(n.child[1], values),
                                          eval_node(n.child[2], values));
            }
            break;
        }
    }
    return 0.0;  // unreachable
}

namespace {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

const char* Expr::fn_name(Fn f) {
    switch (f) {
        case Fn::exp: return "exp";
        case Fn::ln: return "ln";
        case Fn::sin: return "sin";
        case Fn::cos: return "cos";
        case Fn::sqrt: return "sqrt";
        case Fn::gamma: return "gamma";
        case Fn::abs: return "abs";
        case Fn::min: return "min";
        case Fn::max: return "max";
        case Fn::mittag_leffler: return "mittag_leffler";
    }
    return "?";
}

// Precedence: add/sub 1, mul/div 2, neg 3, pow 4, atoms 5. Parenthesization
// is chosen so that re-parsing the printed form rebuilds the same tree.
void Expr::print_node(int idx, std::string& out, int parent_prec, bool rhs) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    int prec = 5;
    switch (n.kind) {
        case Kind::add:
        case Kind::sub: prec = 1; break;
        case Kind::mul:
        case Kind::div: prec = 2; break;
        case Kind::neg: prec = 3; break;
        case Kind::pow: prec = 4; break;
        default: prec = 5;
    }
    const bool need_paren = rhs ? prec <= parent_prec : prec < parent_prec;
    if (need_paren) out += '(';
    switch (n.kind) {
        case Kind::num: out += format_number(n.num); break;
        case Kind::var: out += vars_[static_cast<std::size_t>(n.child[0])]; break;
        case Kind::neg:
            out += '-';
            print_node(n.child[0], out, 3, true);
            break;
        case Kind::add:
        case Kind::sub:
            print_node(n.child[0], out, 1, false);
            out += n.kind == Kind::add ? " + " : " - ";
            print_node(n.child[1], out, 1, true);
            break;
        case Kind::mul:
        case Kind::div:
            print_node(n.child[0], out, 2, false);
            out += n.kind == Kind::mul ? "*" : "/";
            print_node(n.child[1], out, 2, true);
            break;
        case Kind::pow:
            print_node(n.child[0], out, 4, true);  // left operand of ^ parenthesized unless atom
            out += '^';
            print_node(n.child[1], out, 3, false);  // right-assoc; unary minus allowed bare
            break;
        case Kind::call: {
            out += fn_name(n.fn);
            out += '(';
            int arity = 1;
            if (n.fn == Fn::min || n.fn == Fn::max) arity = 2;
            if (n.fn == Fn::mittag_leffler) arity = 3;
            for (int i = 0; i < arity; ++i) {
                if (i) out += ", ";
                print_node(n.child[i], out, 0, false);
            }
            out += ')';
            break;
        }
    }
    if (need_paren) out += ')';
}

std::string Expr::str() const {
    if (root_ < 0) return "";
    std::string out;
    print_node(root_, out, 0, false);
    return out;
}

bool Expr::nodes_equal(const Expr& a, int ia, const Expr& b, int ib) {
    const Node& na = a.nodes_[static_cast<std::size_t>(ia)];
    const Node& nb = b.nodes_[static_cast<std::size_t>(ib)];
    if (na.kind != nb.kind) return false;
    switch (na.kind) {
        case Kind::num: {
            // bit-compare so -0.0 and NaN payloads count as written
            return std::memcmp(&na.num, &nb.num, sizeof(double)) == 0;
        }
        case Kind::var: return na.child[0] == nb.child[0];
        case Kind::neg: return nodes_equal(a, na.child[0], b, nb.child[0]);
        case Kind::call: {
            if (na.fn != nb.fn) return false;
            int arity = 1;
            if (na.fn == Fn::min || na.fn == Fn::max) arity = 2;
            if (na.fn == Fn::mittag_leffler) arity = 3;
            for (int i = 0; i < arity; ++i)
                if (!nodes_equal(a, na.child[i], b, nb.child[i])) return false;
            return true;
        }
        default:
            return nodes_equal(a, na.child[0], b, nb.child[0]) &&
                   nodes_equal(a, na.child[1], b, nb.child[1]);
    }
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.vars_ != b.vars_) return false;
    if ((a.root_ < 0) != (b.root_ < 0)) return false;
    if (a.root_ < 0) return true;
    return Expr::nodes_equal(a, a.root_, b, b.root_);
}

}  // namespace fracstab
