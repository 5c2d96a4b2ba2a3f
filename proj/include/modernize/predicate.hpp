#pragma once

#include "modernize/util.hpp"
#include "modernize/value.hpp"

#include <memory>
#include <optional>
#include <set>
#include <string>

namespace modernize::pred {

/// Kleene three-valued logic result. Unknown arises only from unbound
/// identifiers or type mismatches; evaluation itself never throws.
enum class TriState { True, False, Unknown };

const char* tristate_name(TriState t);
TriState tri_not(TriState t);
TriState tri_and(TriState a, TriState b);
TriState tri_or(TriState a, TriState b);

enum class BinOp {
    And,
    Or,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    In,
};

enum class CallFn { Sum, Count, Min, Max, Len };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Expression AST node. One tagged struct keeps the tree lightweight and
/// trivially shareable (nodes are immutable after construction).
struct Expr {
    enum class Kind { Literal, Ident, Not, Binary, Call } kind;

    Value literal;      // Kind::Literal
    std::string ident;  // Kind::Ident (dotted field path)
    BinOp op{};         // Kind::Binary
    CallFn fn{};        // Kind::Call
    ExprPtr lhs;        // Binary left / Not child / Call argument
    ExprPtr rhs;        // Binary right

    static ExprPtr make_literal(Value v);
    static ExprPtr make_ident(std::string path);
    static ExprPtr make_not(ExprPtr child);
    static ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs);
    static ExprPtr make_call(CallFn fn, ExprPtr arg);
};

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

/// A parsed predicate; value-semantic wrapper around the immutable AST.
class Predicate {
public:
    Predicate() = default;
    explicit Predicate(ExprPtr root) : root_(std::move(root)) {}

    const ExprPtr& root() const { return root_; }
    bool empty() const { return root_ == nullptr; }

    std::string render() const;
    bool operator==(const Predicate& other) const { return expr_equal(root_, other.root_); }

private:
    ExprPtr root_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& message, int line, int column)
        : Error("PARSE_ERROR", message + " at line " + std::to_string(line) + " column " +
                                   std::to_string(column)),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Parse predicate text. Grammar (left-assoc unless noted):
///   expr    := or_expr
///   or_expr := and_expr ("or" and_expr)*
///   and_expr:= not_expr ("and" not_expr)*
///   not_expr:= "not" not_expr | cmp
///   cmp     := add (("=="|"!="|"<"|"<="|">"|">="|"in") add)?   (non-chaining)
///   add     := mul (("+"|"-") mul)*
///   mul     := prim (("*"|"/") prim)*
///   prim    := literal | ident | call "(" expr ")" | "(" expr ")" | list
/// Strings take single or double quotes; identifiers are dotted field paths.
/// Throws ParseError (with line/column) on malformed input.
Predicate parse_predicate(const std::string& text);

/// Parse without throwing; nullopt when the text is not predicate syntax
/// (that is how prose contract clauses are recognized).
std::optional<Predicate> try_parse_predicate(const std::string& text);

/// Kleene evaluation. Total: unbound identifiers, type mismatches,
/// division by zero and overflow all fold into Unknown.
TriState evaluate(const Predicate& pred, const Environment& env);

/// Expression-level evaluation used for effects: yields a Value, or
/// nullopt where predicate evaluation would yield Unknown.
std::optional<Value> evaluate_expr(const ExprPtr& expr, const Environment& env);

/// Exactly the identifiers appearing in the AST (set semantics).
std::set<std::string> free_identifiers(const Predicate& pred);

} // namespace modernize::pred
