#include "modernize/cobol.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace modernize::cobol {

using pred::Expr;
using pred::Value;

namespace {

// ---------------------------------------------------------------------------
// Tokenizer
// ---------------------------------------------------------------------------

struct Token {
    enum class Kind {
        Word,   // data names, verbs, paragraph names (upper-cased)
        Number, // integer or decimal literal
        String, // quoted literal
        Period,
        LParen,
        RParen,
        Op, // = > < >= <= + - * /
        End,
    } kind = Kind::End;
    std::string text;
    int line = 0;
    int column = 0;
};

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
}

/// Fixed format: sequence area in columns 1-6 and an indicator in column 7.
bool looks_fixed_format(const std::vector<std::string>& lines) {
    int considered = 0;
    int fixed = 0;
    for (const auto& line : lines) {
        if (trim(line).empty()) continue;
        ++considered;
        if (line.size() >= 7) {
            bool seq = true;
            for (int i = 0; i < 6; ++i) {
                char c = line[i];
                if (!(std::isdigit(static_cast<unsigned char>(c)) || c == ' ')) seq = false;
            }
            char ind = line[6];
            if (seq && (ind == ' ' || ind == '*' || ind == '-' || ind == '/') &&
                line.substr(0, 6) != "      ") {
                ++fixed;
            }
        }
    }
    return considered > 0 && fixed * 5 >= considered * 4; // >= 80%
}

std::vector<Token> tokenize(const std::string& source, std::vector<ParseNote>& notes) {
    std::vector<std::string> lines = split(source, '\n');
    bool fixed = looks_fixed_format(lines);

    std::vector<Token> out;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        std::string line = lines[li];
        int lineno = static_cast<int>(li) + 1;
        int col_base = 0;
        if (fixed) {
            if (line.size() <= 6) continue;
            char indicator = line[6];
            if (indicator == '*' || indicator == '/') continue; // comment line
            line = line.substr(7);
            col_base = 7;
            if (line.size() > 65) line = line.substr(0, 65); // ignore cols 73+
        } else {
            std::string t = trim(line);
            if (!t.empty() && (t[0] == '*' || starts_with(t, "*>"))) continue;
        }
        std::size_t i = 0;
        while (i < line.size()) {
            char c = line[i];
            int col = col_base + static_cast<int>(i) + 1;
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
                continue;
            }
            if (c == ',' || c == ';') { // separators, insignificant
                ++i;
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c))) {
                std::size_t start = i;
                while (i < line.size() && is_word_char(line[i])) ++i;
                out.push_back({Token::Kind::Word, to_upper(line.substr(start, i - start)),
                               lineno, col});
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t start = i;
                while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
                    ++i;
                }
                if (i + 1 < line.size() && line[i] == '.' &&
                    std::isdigit(static_cast<unsigned char>(line[i + 1]))) {
                    ++i;
                    while (i < line.size() &&
                           std::isdigit(static_cast<unsigned char>(line[i]))) {
                        ++i;
                    }
                }
                // A level number like "88" may be glued to a word start; the
                // subset keeps numbers and words whitespace-separated.
                out.push_back(
                    {Token::Kind::Number, line.substr(start, i - start), lineno, col});
                continue;
            }
            if (c == '\'' || c == '"') {
                char quote = c;
                std::size_t start = ++i;
                while (i < line.size() && line[i] != quote) ++i;
                if (i >= line.size()) {
                    notes.push_back({lineno, col, "unterminated string literal"});
                    break;
                }
                out.push_back(
                    {Token::Kind::String, line.substr(start, i - start), lineno, col});
                ++i;
                continue;
            }
            switch (c) {
                case '.':
                    out.push_back({Token::Kind::Period, ".", lineno, col});
                    ++i;
                    break;
                case '(':
                    out.push_back({Token::Kind::LParen, "(", lineno, col});
                    ++i;
                    break;
                case ')':
                    out.push_back({Token::Kind::RParen, ")", lineno, col});
                    ++i;
                    break;
                case '>':
                case '<':
                    if (i + 1 < line.size() && line[i + 1] == '=') {
                        out.push_back(
                            {Token::Kind::Op, line.substr(i, 2), lineno, col});
                        i += 2;
                    } else {
                        out.push_back({Token::Kind::Op, std::string(1, c), lineno, col});
                        ++i;
                    }
                    break;
                case '=':
                case '+':
                case '-':
                case '*':
                case '/':
                    out.push_back({Token::Kind::Op, std::string(1, c), lineno, col});
                    ++i;
                    break;
                default:
                    notes.push_back(
                        {lineno, col, std::string("unexpected character '") + c + "'"});
                    ++i;
                    break;
            }
        }
    }
    out.push_back({Token::Kind::End, "", static_cast<int>(lines.size()) + 1, 1});
    return out;
}

// ---------------------------------------------------------------------------
// PIC clause -> DataType
// ---------------------------------------------------------------------------

bsg::DataType type_from_picture(const std::string& pic) {
    int int_digits = 0;
    int frac_digits = 0;
    bool alpha = false;
    bool after_v = false;
    for (std::size_t i = 0; i < pic.size(); ++i) {
        char c = static_cast<char>(std::toupper(static_cast<unsigned char>(pic[i])));
        int repeat = 1;
        if (i + 1 < pic.size() && pic[i + 1] == '(') {
            std::size_t close = pic.find(')', i + 1);
            if (close != std::string::npos) {
                repeat = std::atoi(pic.substr(i + 2, close - i - 2).c_str());
                i = close;
            }
        }
        switch (c) {
            case '9': (after_v ? frac_digits : int_digits) += repeat; break;
            case 'V': after_v = true; break;
            case 'X':
            case 'A': alpha = true; break;
            case 'S': break; // sign
            default: break;
        }
    }
    if (alpha) return bsg::DataType::string_type();
    if (frac_digits > 0) return bsg::DataType::decimal();
    return bsg::DataType::integer();
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

const std::set<std::string>& verb_set() {
    static const std::set<std::string> verbs = {
        "MOVE", "COMPUTE", "ADD",     "SUBTRACT", "IF",   "EVALUATE",
        "PERFORM", "CALL",  "DISPLAY", "STOP",     "EXIT", "WHEN",
        "ELSE", "END-IF", "END-EVALUATE",
    };
    return verbs;
}

class LegacyParser {
public:
    LegacyParser(std::vector<Token> toks, LegacyAst& ast) : toks_(std::move(toks)), ast_(ast) {}

    void run() {
        parse_identification();
        skip_to_division({"DATA", "PROCEDURE"});
        if (at_division("DATA")) parse_data_division();
        if (!at_division("PROCEDURE")) {
            skip_to_division({"PROCEDURE"});
        }
        if (!at_division("PROCEDURE")) {
            throw Error("NO_PROCEDURE_DIVISION",
                        ast_.file + ": no PROCEDURE DIVISION found");
        }
        take(); // PROCEDURE
        expect_word("DIVISION");
        accept_period();
        parse_paragraphs();
    }

private:
    const Token& peek(int ahead = 0) const {
        std::size_t i = idx_ + static_cast<std::size_t>(ahead);
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    Token take() { return toks_[std::min(idx_++, toks_.size() - 1)]; }
    bool at_end() const { return peek().kind == Token::Kind::End; }

    bool at_word(const std::string& w) const {
        return peek().kind == Token::Kind::Word && peek().text == w;
    }

    bool accept_word(const std::string& w) {
        if (at_word(w)) {
            ++idx_;
            return true;
        }
        return false;
    }

    void expect_word(const std::string& w) {
        if (!accept_word(w)) {
            note("expected " + w);
        }
    }

    bool accept_period() {
        if (peek().kind == Token::Kind::Period) {
            ++idx_;
            return true;
        }
        return false;
    }

    void note(const std::string& message) {
        ast_.notes.push_back({peek().line, peek().column, message});
    }

    bool at_division(const std::string& name) const {
        return at_word(name) && peek(1).kind == Token::Kind::Word &&
               peek(1).text == "DIVISION";
    }

    void skip_to_division(const std::vector<std::string>& names) {
        while (!at_end()) {
            for (const auto& n : names) {
                if (at_division(n)) return;
            }
            ++idx_;
        }
    }

    void parse_identification() {
        if (at_division("IDENTIFICATION") || at_division("ID")) {
            take();
            take();
            accept_period();
        }
        if (accept_word("PROGRAM-ID")) {
            accept_period();
            if (peek().kind == Token::Kind::Word) ast_.program_id = take().text;
            accept_period();
        }
    }

    // -- data division ------------------------------------------------------

    void parse_data_division() {
        take(); // DATA
        expect_word("DIVISION");
        accept_period();
        accept_word("WORKING-STORAGE");
        accept_word("SECTION");
        accept_period();
        while (!at_end() && !at_division("PROCEDURE")) {
            if (peek().kind == Token::Kind::Number) {
                parse_data_item();
            } else {
                note("unexpected token in data division: " + peek().text);
                skip_past_period();
            }
        }
    }

    std::optional<Value> parse_literal() {
        const Token& t = peek();
        if (t.kind == Token::Kind::String) {
            take();
            return Value(t.text);
        }
        if (t.kind == Token::Kind::Number) {
            take();
            if (t.text.find('.') != std::string::npos) {
                auto d = pred::Decimal::parse(t.text);
                if (!d) return std::nullopt;
                return Value(*d);
            }
            return Value(static_cast<std::int64_t>(std::stoll(t.text)));
        }
        if (t.kind == Token::Kind::Op && t.text == "-") {
            take();
            auto v = parse_literal();
            if (!v) return std::nullopt;
            if (v->is_int()) return Value(-v->as_int());
            if (v->is_decimal()) {
                return Value(pred::Decimal::from_units(-v->as_decimal().units()));
            }
            return std::nullopt;
        }
        if (t.kind == Token::Kind::Word && (t.text == "ZERO" || t.text == "ZEROS")) {
            take();
            return Value(static_cast<std::int64_t>(0));
        }
        if (t.kind == Token::Kind::Word && t.text == "SPACES") {
            take();
            return Value(std::string(""));
        }
        return std::nullopt;
    }

    void parse_data_item() {
        int level = std::atoi(take().text.c_str());
        if (peek().kind != Token::Kind::Word) {
            note("expected data name after level number");
            skip_past_period();
            return;
        }
        Token name_tok = take();

        if (level == 88) {
            Level88 cond;
            cond.name = name_tok.text;
            cond.line = name_tok.line;
            accept_word("VALUE");
            accept_word("VALUES");
            accept_word("ARE");
            std::vector<Value> values;
            while (true) {
                auto v = parse_literal();
                if (!v) break;
                if (accept_word("THRU") || accept_word("THROUGH")) {
                    auto hi = parse_literal();
                    if (hi) cond.range = std::make_pair(*v, *hi);
                } else {
                    values.push_back(*v);
                }
            }
            cond.values = std::move(values);
            accept_period();
            bool attached = false;
            for (auto it = ast_.data_items.rbegin(); it != ast_.data_items.rend(); ++it) {
                if (!it->is_group()) {
                    it->conditions.push_back(std::move(cond));
                    attached = true;
                    break;
                }
            }
            if (!attached) note("88 level without a parent item");
            return;
        }

        DataItem item;
        item.level = level;
        item.name = name_tok.text;
        item.line = name_tok.line;
        while (!at_end() && peek().kind != Token::Kind::Period) {
            if (accept_word("PIC") || accept_word("PICTURE")) {
                accept_word("IS");
                // picture text may lex as words/numbers/parens; reassemble
                std::string pic;
                while (!at_end() && peek().kind != Token::Kind::Period &&
                       !at_word("VALUE") && !at_word("OCCURS")) {
                    const Token& t = peek();
                    if (t.kind == Token::Kind::Word || t.kind == Token::Kind::Number) {
                        pic += take().text;
                    } else if (t.kind == Token::Kind::LParen) {
                        take();
                        pic += "(";
                    } else if (t.kind == Token::Kind::RParen) {
                        take();
                        pic += ")";
                    } else {
                        break;
                    }
                }
                item.picture = pic;
                item.type = type_from_picture(pic);
            } else if (accept_word("OCCURS")) {
                if (peek().kind == Token::Kind::Number) {
                    item.occurs = std::atoi(take().text.c_str());
                }
                accept_word("TIMES");
            } else if (accept_word("VALUE")) {
                accept_word("IS");
                item.initial = parse_literal();
            } else {
                note("unexpected token in data item: " + peek().text);
                take();
            }
        }
        accept_period();
        if (item.occurs > 0) {
            item.type = bsg::DataType::list_of(item.type);
        }
        ast_.data_items.push_back(std::move(item));
    }

    void skip_past_period() {
        while (!at_end() && peek().kind != Token::Kind::Period) ++idx_;
        accept_period();
    }

    // -- procedure division -------------------------------------------------

    bool at_paragraph_header() const {
        return peek().kind == Token::Kind::Word && !verb_set().count(peek().text) &&
               peek(1).kind == Token::Kind::Period;
    }

    void parse_paragraphs() {
        while (!at_end()) {
            if (!at_paragraph_header()) {
                note("expected paragraph header, got '" + peek().text + "'");
                // salvage: skip to the next paragraph
                while (!at_end() && !at_paragraph_header()) ++idx_;
                continue;
            }
            Paragraph para;
            Token name = take();
            para.name = name.text;
            para.line_start = name.line;
            accept_period();
            parse_statements(para.statements, para, {});
            para.line_end = last_line_;
            ast_.paragraphs.push_back(std::move(para));
        }
    }

    /// Parse statements until a terminator word, a new paragraph header, or
    /// the end of input. Terminators are not consumed.
    void parse_statements(StmtList& out, Paragraph& para,
                          const std::vector<std::string>& terminators) {
        while (!at_end()) {
            for (const auto& t : terminators) {
                if (at_word(t)) return;
            }
            if (at_paragraph_header()) return;
            if (accept_period()) continue;
            if (peek().kind != Token::Kind::Word) {
                note("unexpected token '" + peek().text + "'");
                salvage(para);
                return;
            }
            const std::string verb = peek().text;
            if (verb == "MOVE") out.push_back(parse_move());
            else if (verb == "COMPUTE") out.push_back(parse_compute());
            else if (verb == "ADD") out.push_back(parse_add_subtract(true));
            else if (verb == "SUBTRACT") out.push_back(parse_add_subtract(false));
            else if (verb == "IF") out.push_back(parse_if(para));
            else if (verb == "EVALUATE") out.push_back(parse_evaluate(para));
            else if (verb == "PERFORM") out.push_back(parse_perform());
            else if (verb == "CALL") out.push_back(parse_call());
            else if (verb == "DISPLAY") out.push_back(parse_display());
            else if (verb == "STOP") out.push_back(parse_stop());
            else if (verb == "EXIT") {
                take();
                accept_period();
            } else {
                note("statement outside the supported subset: " + verb);
                salvage(para);
                return;
            }
        }
    }

    /// Error recovery: drop the rest of the paragraph, record the skip.
    void salvage(Paragraph& para) {
        para.salvaged = true;
        while (!at_end() && !at_paragraph_header()) ++idx_;
    }

    Statement start_stmt(Statement::Kind kind) {
        Statement s;
        s.kind = kind;
        s.line_start = peek().line;
        return s;
    }

    void finish_stmt(Statement& s) {
        last_line_ = idx_ > 0 ? toks_[idx_ - 1].line : s.line_start;
        s.line_end = last_line_;
    }

    Statement parse_move() {
        Statement s = start_stmt(Statement::Kind::Move);
        take(); // MOVE
        s.source = parse_operand();
        expect_word("TO");
        while (peek().kind == Token::Kind::Word && !verb_set().count(peek().text)) {
            s.targets.push_back(take().text);
        }
        if (s.targets.empty()) note("MOVE without target");
        accept_period();
        finish_stmt(s);
        return s;
    }

    Statement parse_compute() {
        Statement s = start_stmt(Statement::Kind::Compute);
        take(); // COMPUTE
        if (peek().kind == Token::Kind::Word) s.target = take().text;
        if (peek().kind == Token::Kind::Op && peek().text == "=") take();
        else note("expected '=' in COMPUTE");
        s.expr = parse_arith();
        accept_period();
        finish_stmt(s);
        return s;
    }

    /// ADD X TO Y  ->  Y = Y + X;  SUBTRACT X FROM Y  ->  Y = Y - X.
    Statement parse_add_subtract(bool add) {
        Statement s = start_stmt(Statement::Kind::Compute);
        take();
        ExprPtr amount = parse_arith();
        expect_word(add ? "TO" : "FROM");
        if (peek().kind == Token::Kind::Word) s.target = take().text;
        s.expr = Expr::make_binary(add ? pred::BinOp::Add : pred::BinOp::Sub,
                                   Expr::make_ident(s.target), amount);
        accept_period();
        finish_stmt(s);
        return s;
    }

    Statement parse_if(Paragraph& para) {
        Statement s = start_stmt(Statement::Kind::If);
        take(); // IF
        s.condition = parse_condition();
        accept_word("THEN");
        parse_statements(s.then_branch, para, {"ELSE", "END-IF"});
        if (accept_word("ELSE")) {
            parse_statements(s.else_branch, para, {"END-IF"});
        }
        if (!accept_word("END-IF")) note("missing END-IF");
        accept_period();
        finish_stmt(s);
        return s;
    }

    Statement parse_evaluate(Paragraph& para) {
        Statement s = start_stmt(Statement::Kind::Evaluate);
        take(); // EVALUATE
        if (peek().kind == Token::Kind::Word) s.subject = take().text;
        while (at_word("WHEN")) {
            Token when_tok = take();
            WhenBranch branch;
            branch.line = when_tok.line;
            if (accept_word("OTHER")) {
                branch.is_other = true;
            } else {
                auto v = parse_literal();
                if (!v) {
                    note("WHEN expects a literal in the subset");
                    v = Value(std::string(""));
                }
                branch.value = *v;
            }
            parse_statements(branch.body, para, {"WHEN", "END-EVALUATE"});
            s.whens.push_back(std::move(branch));
        }
        if (!accept_word("END-EVALUATE")) note("missing END-EVALUATE");
        accept_period();
        finish_stmt(s);
        return s;
    }

    Statement parse_perform() {
        Statement s = start_stmt(Statement::Kind::Perform);
        take(); // PERFORM
        if (peek().kind == Token::Kind::Word && !verb_set().count(peek().text) &&
            peek().text != "UNTIL") {
            s.perform_target = take().text;
        }
        if (accept_word("THRU") || accept_word("THROUGH")) {
            if (peek().kind == Token::Kind::Word) s.perform_thru = take().text;
        }
        if (accept_word("UNTIL")) {
            s.until = parse_condition();
        }
        accept_period();
        finish_stmt(s);
        return s;
    }

    Statement parse_call() {
        Statement s = start_stmt(Statement::Kind::CallStmt);
        take(); // CALL
        if (peek().kind == Token::Kind::String) s.call_name = take().text;
        else if (peek().kind == Token::Kind::Word) s.call_name = take().text;
        if (accept_word("USING")) {
            while (peek().kind == Token::Kind::Word && !verb_set().count(peek().text)) {
                take();
            }
        }
        accept_period();
        finish_stmt(s);
        return s;
    }

    Statement parse_display() {
        Statement s = start_stmt(Statement::Kind::Display);
        take(); // DISPLAY
        while (!at_end() && peek().kind != Token::Kind::Period &&
               !(peek().kind == Token::Kind::Word && verb_set().count(peek().text))) {
            take();
        }
        accept_period();
        finish_stmt(s);
        return s;
    }

    Statement parse_stop() {
        Statement s = start_stmt(Statement::Kind::StopRun);
        take(); // STOP
        accept_word("RUN");
        accept_period();
        finish_stmt(s);
        return s;
    }

    // -- conditions & arithmetic --------------------------------------------

    ExprPtr parse_condition() { return parse_or_cond(); }

    ExprPtr parse_or_cond() {
        ExprPtr lhs = parse_and_cond();
        while (accept_word("OR")) {
            lhs = Expr::make_binary(pred::BinOp::Or, lhs, parse_and_cond());
        }
        return lhs;
    }

    ExprPtr parse_and_cond() {
        ExprPtr lhs = parse_not_cond();
        while (accept_word("AND")) {
            lhs = Expr::make_binary(pred::BinOp::And, lhs, parse_not_cond());
        }
        return lhs;
    }

    ExprPtr parse_not_cond() {
        if (accept_word("NOT")) {
            // NOT directly before a relation binds to the relation
            // (A NOT = B); before anything else it negates the operand.
            return Expr::make_not(parse_not_cond());
        }
        return parse_relation();
    }

    ExprPtr parse_relation() {
        if (peek().kind == Token::Kind::LParen) {
            take();
            ExprPtr inner = parse_or_cond();
            if (peek().kind == Token::Kind::RParen) take();
            else note("expected ')'");
            // a parenthesized condition may still be an operand of a relation
            return maybe_relation_rhs(inner);
        }
        ExprPtr lhs = parse_arith();
        return maybe_relation_rhs(lhs);
    }

    ExprPtr maybe_relation_rhs(ExprPtr lhs) {
        bool negate = false;
        if (at_word("NOT")) {
            const Token& n = peek(1);
            bool rel_follows = (n.kind == Token::Kind::Op &&
                                (n.text == "=" || n.text == ">" || n.text == "<" ||
                                 n.text == ">=" || n.text == "<="));
            if (rel_follows) {
                take();
                negate = true;
            }
        }
        if (peek().kind != Token::Kind::Op) return lhs;
        std::string op = peek().text;
        pred::BinOp bop;
        if (op == "=") bop = pred::BinOp::Eq;
        else if (op == ">") bop = pred::BinOp::Gt;
        else if (op == "<") bop = pred::BinOp::Lt;
        else if (op == ">=") bop = pred::BinOp::Ge;
        else if (op == "<=") bop = pred::BinOp::Le;
        else return lhs;
        take();
        ExprPtr rhs = parse_arith();
        ExprPtr rel = Expr::make_binary(bop, lhs, rhs);
        if (negate) {
            // NOT = / NOT > / NOT < normalize to the complementary relation
            switch (bop) {
                case pred::BinOp::Eq: rel = Expr::make_binary(pred::BinOp::Ne, lhs, rhs); break;
                case pred::BinOp::Gt: rel = Expr::make_binary(pred::BinOp::Le, lhs, rhs); break;
                case pred::BinOp::Lt: rel = Expr::make_binary(pred::BinOp::Ge, lhs, rhs); break;
                default: rel = Expr::make_not(rel); break;
            }
        }
        return rel;
    }

    ExprPtr parse_arith() {
        ExprPtr lhs = parse_term();
        while (peek().kind == Token::Kind::Op &&
               (peek().text == "+" || peek().text == "-")) {
            bool add = take().text == "+";
            lhs = Expr::make_binary(add ? pred::BinOp::Add : pred::BinOp::Sub, lhs,
                                    parse_term());
        }
        return lhs;
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_factor();
        while (peek().kind == Token::Kind::Op &&
               (peek().text == "*" || peek().text == "/")) {
            bool mul = take().text == "*";
            lhs = Expr::make_binary(mul ? pred::BinOp::Mul : pred::BinOp::Div, lhs,
                                    parse_factor());
        }
        return lhs;
    }

    ExprPtr parse_factor() {
        const Token& t = peek();
        if (t.kind == Token::Kind::LParen) {
            take();
            ExprPtr inner = parse_arith();
            if (peek().kind == Token::Kind::RParen) take();
            else note("expected ')'");
            return inner;
        }
        if (t.kind == Token::Kind::Word && t.text == "FUNCTION") {
            take();
            std::string fn = peek().kind == Token::Kind::Word ? take().text : "";
            if (peek().kind == Token::Kind::LParen) take();
            std::string arg = peek().kind == Token::Kind::Word ? take().text : "";
            if (peek().kind == Token::Kind::RParen) take();
            pred::CallFn call = pred::CallFn::Sum;
            if (fn == "SUM") call = pred::CallFn::Sum;
            else if (fn == "MIN") call = pred::CallFn::Min;
            else if (fn == "MAX") call = pred::CallFn::Max;
            else note("unsupported intrinsic FUNCTION " + fn);
            return Expr::make_call(call, Expr::make_ident(arg));
        }
        if (t.kind == Token::Kind::Word) {
            return Expr::make_ident(take().text);
        }
        auto v = parse_literal();
        if (v) return Expr::make_literal(*v);
        note("expected operand, got '" + t.text + "'");
        take();
        return Expr::make_literal(Value(std::string("")));
    }

    ExprPtr parse_operand() {
        // MOVE sources are literals or identifiers
        auto v = parse_literal();
        if (v) return Expr::make_literal(*v);
        if (peek().kind == Token::Kind::Word) return Expr::make_ident(take().text);
        note("expected literal or identifier");
        take();
        return Expr::make_literal(Value(std::string("")));
    }

    std::vector<Token> toks_;
    LegacyAst& ast_;
    std::size_t idx_ = 0;
    int last_line_ = 1;
};

} // namespace

const DataItem* LegacyAst::find_item(const std::string& name) const {
    for (const auto& item : data_items) {
        if (item.name == name) return &item;
    }
    return nullptr;
}

const Paragraph* LegacyAst::find_paragraph(const std::string& name) const {
    for (const auto& p : paragraphs) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

std::optional<std::pair<const DataItem*, const Level88*>> LegacyAst::find_condition(
    const std::string& name) const {
    for (const auto& item : data_items) {
        for (const auto& cond : item.conditions) {
            if (cond.name == name) return std::make_pair(&item, &cond);
        }
    }
    return std::nullopt;
}

LegacyAst parse_legacy(const std::string& source_text, const std::string& file) {
    LegacyAst ast;
    ast.file = file;
    std::vector<Token> toks = tokenize(source_text, ast.notes);
    LegacyParser parser(std::move(toks), ast);
    parser.run();

    std::set<std::string> names;
    for (const auto& p : ast.paragraphs) {
        if (!names.insert(p.name).second) {
            throw Error("DUPLICATE_PARAGRAPH", file + ": paragraph " + p.name + " redefined");
        }
    }
    return ast;
}

namespace {

void collect_performs(const StmtList& stmts, std::vector<const Statement*>& out) {
    for (const auto& s : stmts) {
        if (s.kind == Statement::Kind::Perform || s.kind == Statement::Kind::CallStmt) {
            out.push_back(&s);
        }
        if (s.kind == Statement::Kind::If) {
            collect_performs(s.then_branch, out);
            collect_performs(s.else_branch, out);
        }
        if (s.kind == Statement::Kind::Evaluate) {
            for (const auto& w : s.whens) collect_performs(w.body, out);
        }
    }
}

} // namespace

StructureMap extract_structure(const LegacyAst& ast) {
    StructureMap map;
    std::set<std::string> paragraph_names;
    for (const auto& p : ast.paragraphs) paragraph_names.insert(p.name);

    std::set<std::string> performed;
    std::set<std::string> externals;
    for (const auto& p : ast.paragraphs) {
        std::vector<const Statement*> calls;
        collect_performs(p.statements, calls);
        for (const auto* s : calls) {
            if (s->kind == Statement::Kind::Perform) {
                if (s->perform_target.empty()) continue;
                map.call_graph.push_back(
                    {p.name, s->perform_target, CallEdge::Kind::Perform});
                performed.insert(s->perform_target);
                if (!s->perform_thru.empty()) {
                    map.call_graph.push_back(
                        {p.name, s->perform_thru, CallEdge::Kind::Perform});
                    performed.insert(s->perform_thru);
                }
            } else {
                map.call_graph.push_back({p.name, s->call_name, CallEdge::Kind::Call});
                if (!paragraph_names.count(s->call_name)) externals.insert(s->call_name);
            }
        }
    }
    for (const auto& p : ast.paragraphs) {
        if (!performed.count(p.name)) map.entry_points.push_back(p.name);
    }
    map.external_deps.assign(externals.begin(), externals.end());
    return map;
}

} // namespace modernize::cobol
