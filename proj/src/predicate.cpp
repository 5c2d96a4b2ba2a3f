#include "modernize/predicate.hpp"

#include <cctype>
#include <functional>
#include <sstream>
#include <vector>

namespace modernize::pred {

const char* tristate_name(TriState t) {
    switch (t) {
        case TriState::True: return "TRUE";
        case TriState::False: return "FALSE";
        default: return "UNKNOWN";
    }
}

TriState tri_not(TriState t) {
    if (t == TriState::True) return TriState::False;
    if (t == TriState::False) return TriState::True;
    return TriState::Unknown;
}

TriState tri_and(TriState a, TriState b) {
    if (a == TriState::False || b == TriState::False) return TriState::False;
    if (a == TriState::True && b == TriState::True) return TriState::True;
    return TriState::Unknown;
}

TriState tri_or(TriState a, TriState b) {
    if (a == TriState::True || b == TriState::True) return TriState::True;
    if (a == TriState::False && b == TriState::False) return TriState::False;
    return TriState::Unknown;
}

ExprPtr Expr::make_literal(Value v) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Literal;
    e->literal = std::move(v);
    return e;
}

ExprPtr Expr::make_ident(std::string path) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Ident;
    e->ident = std::move(path);
    return e;
}

ExprPtr Expr::make_not(ExprPtr child) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Not;
    e->lhs = std::move(child);
    return e;
}

ExprPtr Expr::make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Binary;
    e->op = op;
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    return e;
}

ExprPtr Expr::make_call(CallFn fn, ExprPtr arg) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Call;
    e->fn = fn;
    e->lhs = std::move(arg);
    return e;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Expr::Kind::Literal:
            // Structural equality: 30 and 30.0 are distinct literals.
            return a->literal.data == b->literal.data;
        case Expr::Kind::Ident:
            return a->ident == b->ident;
        case Expr::Kind::Not:
            return expr_equal(a->lhs, b->lhs);
        case Expr::Kind::Binary:
            return a->op == b->op && expr_equal(a->lhs, b->lhs) && expr_equal(a->rhs, b->rhs);
        case Expr::Kind::Call:
            return a->fn == b->fn && expr_equal(a->lhs, b->lhs);
    }
    return false;
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

enum class Tok {
    End,
    Ident,
    Int,
    Decimal,
    String,
    KwAnd,
    KwOr,
    KwNot,
    KwIn,
    KwTrue,
    KwFalse,
    KwNull,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
};

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_ws();
            Token t = next();
            out.push_back(t);
            if (t.kind == Tok::End) break;
        }
        return out;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '\n') {
                ++line_;
                col_ = 1;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++col_;
                ++pos_;
            } else {
                break;
            }
        }
    }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line_, col_); }

    Token next() {
        if (pos_ >= src_.size()) return {Tok::End, "", line_, col_};
        int line = line_;
        int col = col_;
        char c = src_[pos_];

        auto advance = [&](std::size_t n) {
            pos_ += n;
            col_ += static_cast<int>(n);
        };

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
                    src_[pos_] == '.')) {
                ++pos_;
                ++col_;
            }
            std::string word = src_.substr(start, pos_ - start);
            if (word.back() == '.') fail("identifier ends with '.'");
            Tok k = Tok::Ident;
            if (word == "and") k = Tok::KwAnd;
            else if (word == "or") k = Tok::KwOr;
            else if (word == "not") k = Tok::KwNot;
            else if (word == "in") k = Tok::KwIn;
            else if (word == "true") k = Tok::KwTrue;
            else if (word == "false") k = Tok::KwFalse;
            else if (word == "null") k = Tok::KwNull;
            return {k, word, line, col};
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            bool dot = false;
            while (pos_ < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
                    (!dot && src_[pos_] == '.' && pos_ + 1 < src_.size() &&
                     std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))))) {
                if (src_[pos_] == '.') dot = true;
                ++pos_;
                ++col_;
            }
            return {dot ? Tok::Decimal : Tok::Int, src_.substr(start, pos_ - start), line, col};
        }
        if (c == '\'' || c == '"') {
            char quote = c;
            advance(1);
            std::size_t start = pos_;
            while (pos_ < src_.size() && src_[pos_] != quote && src_[pos_] != '\n') {
                ++pos_;
                ++col_;
            }
            if (pos_ >= src_.size() || src_[pos_] != quote) fail("unterminated string");
            std::string text = src_.substr(start, pos_ - start);
            advance(1);
            return {Tok::String, text, line, col};
        }
        switch (c) {
            case '=':
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
                    advance(2);
                    return {Tok::Eq, "==", line, col};
                }
                fail("single '=' (use '==')");
            case '!':
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
                    advance(2);
                    return {Tok::Ne, "!=", line, col};
                }
                fail("unexpected '!'");
            case '<':
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
                    advance(2);
                    return {Tok::Le, "<=", line, col};
                }
                advance(1);
                return {Tok::Lt, "<", line, col};
            case '>':
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
                    advance(2);
                    return {Tok::Ge, ">=", line, col};
                }
                advance(1);
                return {Tok::Gt, ">", line, col};
            case '+': advance(1); return {Tok::Plus, "+", line, col};
            case '-': advance(1); return {Tok::Minus, "-", line, col};
            case '*': advance(1); return {Tok::Star, "*", line, col};
            case '/': advance(1); return {Tok::Slash, "/", line, col};
            case '(': advance(1); return {Tok::LParen, "(", line, col};
            case ')': advance(1); return {Tok::RParen, ")", line, col};
            case '[': advance(1); return {Tok::LBracket, "[", line, col};
            case ']': advance(1); return {Tok::RBracket, "]", line, col};
            case ',': advance(1); return {Tok::Comma, ",", line, col};
            default: fail(std::string("unexpected character '") + c + "'");
        }
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    ExprPtr run() {
        ExprPtr e = parse_or();
        expect(Tok::End, "end of input");
        return e;
    }

private:
    const Token& peek() const { return toks_[idx_]; }
    Token take() { return toks_[idx_++]; }

    bool accept(Tok k) {
        if (peek().kind == k) {
            ++idx_;
            return true;
        }
        return false;
    }

    void expect(Tok k, const std::string& what) {
        if (peek().kind != k) {
            throw ParseError("expected " + what, peek().line, peek().column);
        }
        ++idx_;
    }

    [[noreturn]] void fail_here(const std::string& msg) {
        throw ParseError(msg, peek().line, peek().column);
    }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (accept(Tok::KwOr)) {
            lhs = Expr::make_binary(BinOp::Or, lhs, parse_and());
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_not();
        while (accept(Tok::KwAnd)) {
            lhs = Expr::make_binary(BinOp::And, lhs, parse_not());
        }
        return lhs;
    }

    ExprPtr parse_not() {
        if (accept(Tok::KwNot)) return Expr::make_not(parse_not());
        return parse_cmp();
    }

    static bool is_cmp(Tok k) {
        return k == Tok::Eq || k == Tok::Ne || k == Tok::Lt || k == Tok::Le || k == Tok::Gt ||
               k == Tok::Ge || k == Tok::KwIn;
    }

    ExprPtr parse_cmp() {
        ExprPtr lhs = parse_add();
        if (!is_cmp(peek().kind)) return lhs;
        Token op = take();
        ExprPtr rhs = parse_add();
        if (is_cmp(peek().kind)) {
            fail_here("chained comparison is not allowed");
        }
        BinOp bop;
        switch (op.kind) {
            case Tok::Eq: bop = BinOp::Eq; break;
            case Tok::Ne: bop = BinOp::Ne; break;
            case Tok::Lt: bop = BinOp::Lt; break;
            case Tok::Le: bop = BinOp::Le; break;
            case Tok::Gt: bop = BinOp::Gt; break;
            case Tok::Ge: bop = BinOp::Ge; break;
            default:
                bop = BinOp::In;
                if (!(rhs->kind == Expr::Kind::Ident ||
                      (rhs->kind == Expr::Kind::Literal && rhs->literal.is_list()))) {
                    throw ParseError("right operand of 'in' must be list-valued", op.line,
                                     op.column);
                }
                break;
        }
        return Expr::make_binary(bop, lhs, rhs);
    }

    ExprPtr parse_add() {
        ExprPtr lhs = parse_mul();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            Tok k = take().kind;
            lhs = Expr::make_binary(k == Tok::Plus ? BinOp::Add : BinOp::Sub, lhs, parse_mul());
        }
        return lhs;
    }

    ExprPtr parse_mul() {
        ExprPtr lhs = parse_prim();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            Tok k = take().kind;
            lhs = Expr::make_binary(k == Tok::Star ? BinOp::Mul : BinOp::Div, lhs, parse_prim());
        }
        return lhs;
    }

    Value parse_literal_value() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Int: {
                take();
                return Value(static_cast<std::int64_t>(std::stoll(t.text)));
            }
            case Tok::Decimal: {
                take();
                auto d = Decimal::parse(t.text);
                if (!d) throw ParseError("decimal out of range (scale 4)", t.line, t.column);
                return Value(*d);
            }
            case Tok::String: take(); return Value(t.text);
            case Tok::KwTrue: take(); return Value(true);
            case Tok::KwFalse: take(); return Value(false);
            case Tok::KwNull: take(); return Value::null();
            case Tok::LBracket: return parse_list_value();
            case Tok::Minus: {
                take();
                const Token& n = peek();
                if (n.kind == Tok::Int) {
                    take();
                    return Value(-static_cast<std::int64_t>(std::stoll(n.text)));
                }
                if (n.kind == Tok::Decimal) {
                    take();
                    auto d = Decimal::parse(n.text);
                    if (!d) throw ParseError("decimal out of range (scale 4)", n.line, n.column);
                    return Value(Decimal::from_units(-d->units()));
                }
                fail_here("expected number after '-'");
            }
            default: fail_here("expected literal");
        }
    }

    Value parse_list_value() {
        expect(Tok::LBracket, "'['");
        ValueList items;
        if (peek().kind != Tok::RBracket) {
            items.push_back(parse_literal_value());
            while (accept(Tok::Comma)) items.push_back(parse_literal_value());
        }
        expect(Tok::RBracket, "']'");
        return Value(std::move(items));
    }

    ExprPtr parse_prim() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Int:
            case Tok::Decimal:
            case Tok::String:
            case Tok::KwTrue:
            case Tok::KwFalse:
            case Tok::KwNull:
            case Tok::Minus:
            case Tok::LBracket:
                return Expr::make_literal(parse_literal_value());
            case Tok::LParen: {
                take();
                ExprPtr inner = parse_or();
                expect(Tok::RParen, "')'");
                return inner;
            }
            case Tok::Ident: {
                Token id = take();
                if (peek().kind == Tok::LParen) {
                    CallFn fn;
                    if (id.text == "sum") fn = CallFn::Sum;
                    else if (id.text == "count") fn = CallFn::Count;
                    else if (id.text == "min") fn = CallFn::Min;
                    else if (id.text == "max") fn = CallFn::Max;
                    else if (id.text == "len") fn = CallFn::Len;
                    else {
                        throw ParseError("unknown function '" + id.text + "'", id.line,
                                         id.column);
                    }
                    take(); // '('
                    ExprPtr arg = parse_or();
                    if (peek().kind == Tok::Comma) {
                        fail_here("'" + id.text + "' takes exactly one argument");
                    }
                    expect(Tok::RParen, "')'");
                    return Expr::make_call(fn, arg);
                }
                return Expr::make_ident(id.text);
            }
            default: fail_here("expected expression");
        }
    }

    std::vector<Token> toks_;
    std::size_t idx_ = 0;
};

// ---------------------------------------------------------------------------
// Renderer
// ---------------------------------------------------------------------------

int level_of(const ExprPtr& e) {
    switch (e->kind) {
        case Expr::Kind::Literal:
        case Expr::Kind::Ident:
        case Expr::Kind::Call: return 7;
        case Expr::Kind::Not: return 3;
        case Expr::Kind::Binary:
            switch (e->op) {
                case BinOp::Or: return 1;
                case BinOp::And: return 2;
                case BinOp::Mul:
                case BinOp::Div: return 6;
                case BinOp::Add:
                case BinOp::Sub: return 5;
                default: return 4; // comparisons and `in`
            }
    }
    return 7;
}

const char* op_text(BinOp op) {
    switch (op) {
        case BinOp::And: return "and";
        case BinOp::Or: return "or";
        case BinOp::Eq: return "==";
        case BinOp::Ne: return "!=";
        case BinOp::Lt: return "<";
        case BinOp::Le: return "<=";
        case BinOp::Gt: return ">";
        case BinOp::Ge: return ">=";
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
        case BinOp::In: return "in";
    }
    return "?";
}

const char* fn_text(CallFn fn) {
    switch (fn) {
        case CallFn::Sum: return "sum";
        case CallFn::Count: return "count";
        case CallFn::Min: return "min";
        case CallFn::Max: return "max";
        case CallFn::Len: return "len";
    }
    return "?";
}

void render_expr(const ExprPtr& e, std::string& out) {
    switch (e->kind) {
        case Expr::Kind::Literal:
            out += e->literal.str();
            return;
        case Expr::Kind::Ident:
            out += e->ident;
            return;
        case Expr::Kind::Call:
            out += fn_text(e->fn);
            out += "(";
            render_expr(e->lhs, out);
            out += ")";
            return;
        case Expr::Kind::Not: {
            out += "not ";
            bool parens = level_of(e->lhs) < 3;
            if (parens) out += "(";
            render_expr(e->lhs, out);
            if (parens) out += ")";
            return;
        }
        case Expr::Kind::Binary: {
            int own = level_of(e);
            // Left child keeps same-level chains unparenthesized (left
            // associativity); right child re-parenthesizes at same level so
            // parse(render(t)) reproduces the tree shape. Comparisons are
            // non-chaining, so same-level children always take parens.
            bool cmp_level = own == 4;
            bool lp = level_of(e->lhs) < own || (cmp_level && level_of(e->lhs) == own);
            bool rp = level_of(e->rhs) <= own;
            if (lp) out += "(";
            render_expr(e->lhs, out);
            if (lp) out += ")";
            out += " ";
            out += op_text(e->op);
            out += " ";
            if (rp) out += "(";
            render_expr(e->rhs, out);
            if (rp) out += ")";
            return;
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluator
// ---------------------------------------------------------------------------

TriState value_truth(const std::optional<Value>& v) {
    if (!v) return TriState::Unknown;
    if (!v->is_bool()) return TriState::Unknown;
    return v->as_bool() ? TriState::True : TriState::False;
}

/// Equality with compatibility tracking: {True, False, Unknown}.
TriState value_eq(const Value& a, const Value& b) {
    if (a.is_numeric() && b.is_numeric()) {
        auto x = a.as_number();
        auto y = b.as_number();
        if (!x || !y) return TriState::Unknown;
        return *x == *y ? TriState::True : TriState::False;
    }
    if (a.is_string() && b.is_string()) {
        return a.as_string() == b.as_string() ? TriState::True : TriState::False;
    }
    if (a.is_bool() && b.is_bool()) {
        return a.as_bool() == b.as_bool() ? TriState::True : TriState::False;
    }
    if (a.is_null() && b.is_null()) return TriState::True;
    if (a.is_list() && b.is_list()) {
        const auto& la = a.as_list();
        const auto& lb = b.as_list();
        if (la.size() != lb.size()) return TriState::False;
        bool unknown = false;
        for (std::size_t i = 0; i < la.size(); ++i) {
            TriState t = value_eq(la[i], lb[i]);
            if (t == TriState::False) return TriState::False;
            if (t == TriState::Unknown) unknown = true;
        }
        return unknown ? TriState::Unknown : TriState::True;
    }
    return TriState::Unknown; // incompatible types
}

std::optional<Value> tri_to_value(TriState t) {
    if (t == TriState::Unknown) return std::nullopt;
    return Value(t == TriState::True);
}

std::optional<Value> eval_node(const ExprPtr& e, const Environment& env);

std::optional<Value> eval_arith(BinOp op, const Value& a, const Value& b) {
    if (!a.is_numeric() || !b.is_numeric()) return std::nullopt;
    // Integer arithmetic stays integral except for division, which always
    // yields a scale-4 decimal so postcondition checks are exact.
    if (a.is_int() && b.is_int() && op != BinOp::Div) {
        std::int64_t x = a.as_int();
        std::int64_t y = b.as_int();
        __int128 r;
        switch (op) {
            case BinOp::Add: r = static_cast<__int128>(x) + y; break;
            case BinOp::Sub: r = static_cast<__int128>(x) - y; break;
            default: r = static_cast<__int128>(x) * y; break;
        }
        if (r > INT64_MAX / 2 || r < INT64_MIN / 2) return std::nullopt;
        return Value(static_cast<std::int64_t>(r));
    }
    auto x = a.as_number();
    auto y = b.as_number();
    if (!x || !y) return std::nullopt;
    std::optional<Decimal> r;
    switch (op) {
        case BinOp::Add: r = x->add(*y); break;
        case BinOp::Sub: r = x->sub(*y); break;
        case BinOp::Mul: r = x->mul(*y); break;
        default: r = x->div(*y); break;
    }
    if (!r) return std::nullopt;
    return Value(*r);
}

std::optional<Value> eval_compare(BinOp op, const Value& a, const Value& b) {
    auto x = a.as_number();
    auto y = b.as_number();
    if (!x || !y) return std::nullopt; // ordering is numeric-only
    bool r;
    switch (op) {
        case BinOp::Lt: r = *x < *y; break;
        case BinOp::Le: r = *x <= *y; break;
        case BinOp::Gt: r = *x > *y; break;
        default: r = *x >= *y; break;
    }
    return Value(r);
}

std::optional<Value> eval_call(CallFn fn, const Value& arg) {
    if (fn == CallFn::Len) {
        if (arg.is_string()) return Value(static_cast<std::int64_t>(arg.as_string().size()));
        if (arg.is_list()) return Value(static_cast<std::int64_t>(arg.as_list().size()));
        return std::nullopt;
    }
    if (fn == CallFn::Count) {
        if (arg.is_list()) return Value(static_cast<std::int64_t>(arg.as_list().size()));
        return std::nullopt;
    }
    if (!arg.is_list()) return std::nullopt;
    const auto& items = arg.as_list();
    if (fn == CallFn::Sum) {
        bool all_int = true;
        for (const auto& v : items) {
            if (!v.is_numeric()) return std::nullopt;
            if (!v.is_int()) all_int = false;
        }
        if (all_int) {
            __int128 acc = 0;
            for (const auto& v : items) acc += v.as_int();
            if (acc > INT64_MAX / 2 || acc < INT64_MIN / 2) return std::nullopt;
            return Value(static_cast<std::int64_t>(acc));
        }
        Decimal acc;
        for (const auto& v : items) {
            auto n = v.as_number();
            if (!n) return std::nullopt;
            auto next = acc.add(*n);
            if (!next) return std::nullopt;
            acc = *next;
        }
        return Value(acc);
    }
    // min / max
    if (items.empty()) return std::nullopt;
    bool all_int = true;
    std::optional<Decimal> best;
    std::optional<Value> best_value;
    for (const auto& v : items) {
        auto n = v.as_number();
        if (!n) return std::nullopt;
        if (!v.is_int()) all_int = false;
        bool better = !best || (fn == CallFn::Min ? *n < *best : *n > *best);
        if (better) {
            best = n;
            best_value = v;
        }
    }
    if (all_int) return best_value;
    return Value(*best);
}

std::optional<Value> eval_node(const ExprPtr& e, const Environment& env) {
    switch (e->kind) {
        case Expr::Kind::Literal:
            return e->literal;
        case Expr::Kind::Ident: {
            const Value* v = env.lookup(e->ident);
            if (!v) return std::nullopt;
            return *v;
        }
        case Expr::Kind::Not:
            return tri_to_value(tri_not(value_truth(eval_node(e->lhs, env))));
        case Expr::Kind::Call: {
            auto arg = eval_node(e->lhs, env);
            if (!arg) return std::nullopt;
            return eval_call(e->fn, *arg);
        }
        case Expr::Kind::Binary: {
            if (e->op == BinOp::And || e->op == BinOp::Or) {
                TriState a = value_truth(eval_node(e->lhs, env));
                // Kleene short circuit: a dominating operand decides alone.
                if (e->op == BinOp::And && a == TriState::False) return Value(false);
                if (e->op == BinOp::Or && a == TriState::True) return Value(true);
                TriState b = value_truth(eval_node(e->rhs, env));
                return tri_to_value(e->op == BinOp::And ? tri_and(a, b) : tri_or(a, b));
            }
            auto a = eval_node(e->lhs, env);
            auto b = eval_node(e->rhs, env);
            if (!a || !b) return std::nullopt;
            switch (e->op) {
                case BinOp::Eq: return tri_to_value(value_eq(*a, *b));
                case BinOp::Ne: return tri_to_value(tri_not(value_eq(*a, *b)));
                case BinOp::Lt:
                case BinOp::Le:
                case BinOp::Gt:
                case BinOp::Ge: return eval_compare(e->op, *a, *b);
                case BinOp::Add:
                case BinOp::Sub:
                case BinOp::Mul:
                case BinOp::Div: return eval_arith(e->op, *a, *b);
                case BinOp::In: {
                    if (!b->is_list()) return std::nullopt;
                    bool unknown = false;
                    for (const auto& item : b->as_list()) {
                        TriState t = value_eq(*a, item);
                        if (t == TriState::True) return Value(true);
                        if (t == TriState::Unknown) unknown = true;
                    }
                    if (unknown) return std::nullopt;
                    return Value(false);
                }
                default: return std::nullopt;
            }
        }
    }
    return std::nullopt;
}

void collect_idents(const ExprPtr& e, std::set<std::string>& out) {
    if (!e) return;
    if (e->kind == Expr::Kind::Ident) out.insert(e->ident);
    collect_idents(e->lhs, out);
    collect_idents(e->rhs, out);
}

} // namespace

std::string Predicate::render() const {
    if (!root_) return "";
    std::string out;
    render_expr(root_, out);
    return out;
}

Predicate parse_predicate(const std::string& text) {
    Lexer lex(text);
    Parser parser(lex.run());
    return Predicate(parser.run());
}

std::optional<Predicate> try_parse_predicate(const std::string& text) {
    try {
        return parse_predicate(text);
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

TriState evaluate(const Predicate& pred, const Environment& env) {
    if (pred.empty()) return TriState::Unknown;
    return value_truth(eval_node(pred.root(), env));
}

std::optional<Value> evaluate_expr(const ExprPtr& expr, const Environment& env) {
    if (!expr) return std::nullopt;
    return eval_node(expr, env);
}

std::set<std::string> free_identifiers(const Predicate& pred) {
    std::set<std::string> out;
    collect_idents(pred.root(), out);
    return out;
}

} // namespace modernize::pred
