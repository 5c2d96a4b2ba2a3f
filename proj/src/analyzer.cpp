#include "modernize/analyzer.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace modernize::analyzer {

using cobol::DataItem;
using cobol::LegacyAst;
using cobol::Paragraph;
using cobol::Statement;
using cobol::StmtList;
using model::BusinessRule;
using model::Confidence;
using model::ConstraintKind;
using model::ConstraintSpec;
using model::RuleCategory;
using model::RuleKind;
using pred::BinOp;
using pred::Expr;
using pred::ExprPtr;
using pred::Value;

// ---------------------------------------------------------------------------
// Context
// ---------------------------------------------------------------------------

const LegacyAst* AnalysisContext::ast_for(const std::string& file) const {
    for (const auto& p : programs) {
        if (p.file == file) return &p.ast;
    }
    return nullptr;
}

const Paragraph* AnalysisContext::find_paragraph(const std::string& name,
                                                 std::string* file_out) const {
    for (const auto& p : programs) {
        if (const auto* para = p.ast.find_paragraph(name)) {
            if (file_out) *file_out = p.file;
            return para;
        }
    }
    return nullptr;
}

AnalysisContext parse_bundle(const model::LegacyArtifactBundle& bundle) {
    AnalysisContext ctx;
    std::set<std::string> program_ids;
    for (const auto* f : bundle.of_kind(model::ArtifactKind::Source)) {
        ParsedProgram p;
        p.file = f->path;
        p.ast = cobol::parse_legacy(f->text, f->path);
        program_ids.insert(p.ast.program_id);
        ctx.programs.push_back(std::move(p));
    }
    std::set<std::string> externals;
    for (const auto& p : ctx.programs) {
        cobol::StructureMap m = cobol::extract_structure(p.ast);
        for (const auto& e : m.entry_points) ctx.structure.entry_points.push_back(e);
        for (const auto& e : m.call_graph) ctx.structure.call_graph.push_back(e);
        for (const auto& e : m.external_deps) {
            if (!program_ids.count(e)) externals.insert(e);
        }
    }
    ctx.structure.external_deps.assign(externals.begin(), externals.end());
    return ctx;
}

// ---------------------------------------------------------------------------
// Expression normalization
// ---------------------------------------------------------------------------

namespace {

ExprPtr membership_for_condition(const DataItem& item, const cobol::Level88& cond) {
    std::string field = to_field_name(item.name);
    if (cond.range) {
        return Expr::make_binary(
            BinOp::And,
            Expr::make_binary(BinOp::Ge, Expr::make_ident(field),
                              Expr::make_literal(cond.range->first)),
            Expr::make_binary(BinOp::Le, Expr::make_ident(field),
                              Expr::make_literal(cond.range->second)));
    }
    return Expr::make_binary(BinOp::In, Expr::make_ident(field),
                             Expr::make_literal(Value(pred::ValueList(
                                 cond.values.begin(), cond.values.end()))));
}

} // namespace

ExprPtr normalize_expr(const cobol::ExprPtr& raw, const LegacyAst& ast) {
    if (!raw) return raw;
    switch (raw->kind) {
        case Expr::Kind::Literal:
            return raw;
        case Expr::Kind::Ident: {
            if (auto cond = ast.find_condition(raw->ident)) {
                return membership_for_condition(*cond->first, *cond->second);
            }
            return Expr::make_ident(to_field_name(raw->ident));
        }
        case Expr::Kind::Not:
            return Expr::make_not(normalize_expr(raw->lhs, ast));
        case Expr::Kind::Call:
            return Expr::make_call(raw->fn, normalize_expr(raw->lhs, ast));
        case Expr::Kind::Binary:
            return Expr::make_binary(raw->op, normalize_expr(raw->lhs, ast),
                                     normalize_expr(raw->rhs, ast));
    }
    return raw;
}

ExprPtr simplify_not(const ExprPtr& expr) {
    if (!expr) return expr;
    if (expr->kind == Expr::Kind::Not) {
        ExprPtr inner = expr->lhs;
        if (inner->kind == Expr::Kind::Not) return simplify_not(inner->lhs);
        if (inner->kind == Expr::Kind::Binary) {
            switch (inner->op) {
                case BinOp::Eq:
                    return Expr::make_binary(BinOp::Ne, simplify_not(inner->lhs),
                                             simplify_not(inner->rhs));
                case BinOp::Ne:
                    return Expr::make_binary(BinOp::Eq, simplify_not(inner->lhs),
                                             simplify_not(inner->rhs));
                case BinOp::Lt:
                    return Expr::make_binary(BinOp::Ge, simplify_not(inner->lhs),
                                             simplify_not(inner->rhs));
                case BinOp::Le:
                    return Expr::make_binary(BinOp::Gt, simplify_not(inner->lhs),
                                             simplify_not(inner->rhs));
                case BinOp::Gt:
                    return Expr::make_binary(BinOp::Le, simplify_not(inner->lhs),
                                             simplify_not(inner->rhs));
                case BinOp::Ge:
                    return Expr::make_binary(BinOp::Lt, simplify_not(inner->lhs),
                                             simplify_not(inner->rhs));
                case BinOp::And:
                    return Expr::make_binary(
                        BinOp::Or, simplify_not(Expr::make_not(inner->lhs)),
                        simplify_not(Expr::make_not(inner->rhs)));
                case BinOp::Or:
                    return Expr::make_binary(
                        BinOp::And, simplify_not(Expr::make_not(inner->lhs)),
                        simplify_not(Expr::make_not(inner->rhs)));
                default:
                    return Expr::make_not(simplify_not(inner));
            }
        }
        return Expr::make_not(simplify_not(inner));
    }
    if (expr->kind == Expr::Kind::Binary) {
        return Expr::make_binary(expr->op, simplify_not(expr->lhs), simplify_not(expr->rhs));
    }
    if (expr->kind == Expr::Kind::Call) {
        return Expr::make_call(expr->fn, simplify_not(expr->lhs));
    }
    return expr;
}

// ---------------------------------------------------------------------------
// Field access helpers
// ---------------------------------------------------------------------------

namespace {

void expr_fields(const cobol::ExprPtr& e, const LegacyAst& ast, std::set<std::string>& out) {
    if (!e) return;
    if (e->kind == Expr::Kind::Ident) {
        if (auto cond = ast.find_condition(e->ident)) {
            out.insert(to_field_name(cond->first->name));
        } else {
            out.insert(to_field_name(e->ident));
        }
        return;
    }
    expr_fields(e->lhs, ast, out);
    expr_fields(e->rhs, ast, out);
}

void stmt_reads(const Statement& s, const LegacyAst& ast, std::set<std::string>& out);

void list_reads(const StmtList& stmts, const LegacyAst& ast, std::set<std::string>& out) {
    for (const auto& s : stmts) stmt_reads(s, ast, out);
}

void stmt_reads(const Statement& s, const LegacyAst& ast, std::set<std::string>& out) {
    switch (s.kind) {
        case Statement::Kind::Move:
            expr_fields(s.source, ast, out);
            break;
        case Statement::Kind::Compute:
            expr_fields(s.expr, ast, out);
            break;
        case Statement::Kind::If:
            expr_fields(s.condition, ast, out);
            list_reads(s.then_branch, ast, out);
            list_reads(s.else_branch, ast, out);
            break;
        case Statement::Kind::Evaluate:
            if (!s.subject.empty()) out.insert(to_field_name(s.subject));
            for (const auto& w : s.whens) list_reads(w.body, ast, out);
            break;
        case Statement::Kind::Perform:
            expr_fields(s.until, ast, out);
            break;
        default:
            break;
    }
}

void stmt_writes(const Statement& s, const LegacyAst& ast, std::set<std::string>& out);

void list_writes(const StmtList& stmts, const LegacyAst& ast, std::set<std::string>& out) {
    for (const auto& s : stmts) stmt_writes(s, ast, out);
}

void stmt_writes(const Statement& s, const LegacyAst& ast, std::set<std::string>& out) {
    switch (s.kind) {
        case Statement::Kind::Move:
            for (const auto& t : s.targets) out.insert(to_field_name(t));
            break;
        case Statement::Kind::Compute:
            out.insert(to_field_name(s.target));
            break;
        case Statement::Kind::If:
            list_writes(s.then_branch, ast, out);
            list_writes(s.else_branch, ast, out);
            break;
        case Statement::Kind::Evaluate:
            for (const auto& w : s.whens) list_writes(w.body, ast, out);
            break;
        default:
            break;
    }
}

} // namespace

void collect_reads(const StmtList& stmts, const LegacyAst& ast, std::set<std::string>& reads) {
    list_reads(stmts, ast, reads);
}

void collect_writes(const StmtList& stmts, const LegacyAst& ast,
                    std::set<std::string>& writes) {
    list_writes(stmts, ast, writes);
}

// ---------------------------------------------------------------------------
// Rejection patterns
// ---------------------------------------------------------------------------

namespace {

bool is_rejection_move(const Statement& s, std::string* klass, std::string* status_field) {
    if (s.kind != Statement::Kind::Move || !s.source) return false;
    if (s.source->kind != Expr::Kind::Literal || !s.source->literal.is_string()) return false;
    const std::string& lit = s.source->literal.as_string();
    if (!starts_with(lit, "REJECT")) return false;
    if (klass) *klass = lit;
    if (status_field && !s.targets.empty()) *status_field = to_field_name(s.targets[0]);
    return true;
}

bool is_rejection_perform(const Statement& s, std::string* klass, std::string* handler) {
    if (s.kind != Statement::Kind::Perform || s.perform_target.empty()) return false;
    if (!starts_with(s.perform_target, "REJECT")) return false;
    if (klass) *klass = s.perform_target;
    if (handler) *handler = s.perform_target;
    return true;
}

/// First rejection effect directly inside a statement list (not nested
/// under further conditionals).
const Statement* find_rejection(const StmtList& stmts, std::string* klass,
                                std::string* status_field, std::string* handler) {
    for (const auto& s : stmts) {
        if (is_rejection_move(s, klass, status_field)) return &s;
        if (is_rejection_perform(s, klass, handler)) return &s;
    }
    return nullptr;
}

std::string render(const ExprPtr& e) { return pred::Predicate(e).render(); }

std::vector<std::string> sorted_fields(const ExprPtr& e, const LegacyAst& ast) {
    std::set<std::string> out;
    expr_fields(e, ast, out);
    return {out.begin(), out.end()};
}

/// Flatten a top-level AND chain.
void and_conjuncts(const ExprPtr& e, std::vector<ExprPtr>& out) {
    if (e && e->kind == Expr::Kind::Binary && e->op == BinOp::And) {
        and_conjuncts(e->lhs, out);
        and_conjuncts(e->rhs, out);
    } else if (e) {
        out.push_back(e);
    }
}

struct LinearStmt {
    const Statement* stmt;
    const Paragraph* paragraph;
    const LegacyAst* ast;
    int cond_depth;
};

void linearize_stmts(const StmtList& stmts, const Paragraph& para, const LegacyAst& ast,
                     int depth, const AnalysisContext& ctx, std::set<std::string>& visiting,
                     std::vector<LinearStmt>& out);

void linearize_paragraph(const std::string& name, const AnalysisContext& ctx,
                         std::set<std::string>& visiting, std::vector<LinearStmt>& out,
                         int depth) {
    if (visiting.count(name)) return;
    std::string file;
    const Paragraph* para = ctx.find_paragraph(name, &file);
    if (!para) return;
    const LegacyAst* ast = ctx.ast_for(file);
    visiting.insert(name);
    linearize_stmts(para->statements, *para, *ast, depth, ctx, visiting, out);
    visiting.erase(name);
}

void linearize_stmts(const StmtList& stmts, const Paragraph& para, const LegacyAst& ast,
                     int depth, const AnalysisContext& ctx, std::set<std::string>& visiting,
                     std::vector<LinearStmt>& out) {
    for (const auto& s : stmts) {
        out.push_back({&s, &para, &ast, depth});
        switch (s.kind) {
            case Statement::Kind::If:
                linearize_stmts(s.then_branch, para, ast, depth + 1, ctx, visiting, out);
                linearize_stmts(s.else_branch, para, ast, depth + 1, ctx, visiting, out);
                break;
            case Statement::Kind::Evaluate:
                for (const auto& w : s.whens) {
                    linearize_stmts(w.body, para, ast, depth + 1, ctx, visiting, out);
                }
                break;
            case Statement::Kind::Perform:
                linearize_paragraph(s.perform_target, ctx, visiting, out,
                                    depth + (s.until ? 1 : 0));
                break;
            default:
                break;
        }
    }
}

/// Execution-order statement stream from the entry points, performs
/// expanded depth-first. Approximates dominance for default detection.
std::vector<LinearStmt> linearize(const AnalysisContext& ctx) {
    std::vector<LinearStmt> out;
    std::set<std::string> visiting;
    for (const auto& entry : ctx.structure.entry_points) {
        linearize_paragraph(entry, ctx, visiting, out, 0);
    }
    return out;
}

/// Fields read by a single statement shallowly (conditions and sources,
/// not nested bodies) — used for first-read ordering.
void shallow_reads(const Statement& s, const LegacyAst& ast, std::set<std::string>& out) {
    switch (s.kind) {
        case Statement::Kind::Move: expr_fields(s.source, ast, out); break;
        case Statement::Kind::Compute: expr_fields(s.expr, ast, out); break;
        case Statement::Kind::If: expr_fields(s.condition, ast, out); break;
        case Statement::Kind::Evaluate:
            if (!s.subject.empty()) out.insert(to_field_name(s.subject));
            break;
        case Statement::Kind::Perform: expr_fields(s.until, ast, out); break;
        default: break;
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Phase 1b: rule extraction
// ---------------------------------------------------------------------------

namespace {

class RuleExtractor {
public:
    RuleExtractor(const LegacyAst& ast, std::set<std::string> default_targets)
        : ast_(ast), default_targets_(std::move(default_targets)) {}

    std::vector<DetailedRule> run() {
        for (const auto& para : ast_.paragraphs) {
            para_ = &para;
            walk(para.statements, nullptr);
        }
        int seq = 0;
        for (auto& r : rules_) {
            char buf[16];
            std::snprintf(buf, sizeof buf, "BR-%03d", ++seq);
            r.rule.id = buf;
        }
        return std::move(rules_);
    }

private:
    DetailedRule base_rule(const Statement& s, RuleRole role) {
        DetailedRule r;
        r.role = role;
        r.file = ast_.file;
        r.paragraph = para_->name;
        r.rule.location = {ast_.file, s.line_start, std::max(s.line_start, s.line_end)};
        r.rule.confidence = para_->salvaged ? Confidence::Low : Confidence::High;
        return r;
    }

    void add(DetailedRule r) { rules_.push_back(std::move(r)); }

    ExprPtr guard_with(const ExprPtr* path_guard, ExprPtr cond) {
        if (!path_guard || !*path_guard) return cond;
        if (!cond) return *path_guard;
        return Expr::make_binary(BinOp::And, *path_guard, cond);
    }

    void walk(const StmtList& stmts, const ExprPtr* path_guard) {
        for (const auto& s : stmts) {
            switch (s.kind) {
                case Statement::Kind::If: on_if(s, path_guard); break;
                case Statement::Kind::Compute: on_compute(s, path_guard); break;
                case Statement::Kind::Move: on_move(s, path_guard); break;
                case Statement::Kind::Evaluate: on_evaluate(s, path_guard); break;
                case Statement::Kind::Perform: on_perform(s, path_guard); break;
                default: break;
            }
        }
    }

    void on_if(const Statement& s, const ExprPtr* path_guard) {
        std::string klass, status_field, handler;
        const Statement* rejection =
            find_rejection(s.then_branch, &klass, &status_field, &handler);
        ExprPtr cond_norm = normalize_expr(s.condition, ast_);

        if (rejection) {
            DetailedRule r = base_rule(s, RuleRole::RejectionGuard);
            r.guard = pred::Predicate(guard_with(path_guard, cond_norm));
            r.error_class = klass;
            r.handler = handler;
            r.rule.kind = RuleKind::Validation;
            r.rule.category = RuleCategory::Explicit;
            r.rule.description =
                "Reject with " + klass + " when " + render(cond_norm);
            r.rule.input_fields = sorted_fields(s.condition, ast_);
            r.rule.output_effects = status_field.empty()
                                        ? std::vector<std::string>{"reject:" + klass}
                                        : std::vector<std::string>{status_field};
            add(std::move(r));
            detect_exemption(s, cond_norm, klass);
            // remaining non-rejection statements in the branch still walk
            ExprPtr then_guard = guard_with(path_guard, cond_norm);
            walk_excluding(s.then_branch, rejection, &then_guard);
        } else {
            std::string xklass, xhandler;
            if (const Statement* hook = find_exception_hook(s.then_branch, &xhandler)) {
                DetailedRule r = base_rule(s, RuleRole::ExceptionHook);
                r.guard = pred::Predicate(guard_with(path_guard, cond_norm));
                r.handler = xhandler;
                r.rule.kind = RuleKind::Exception;
                r.rule.category = RuleCategory::Implicit;
                r.rule.confidence =
                    para_->salvaged ? Confidence::Low : Confidence::Medium;
                r.rule.description =
                    "On " + render(cond_norm) + ", invoke " + xhandler;
                r.rule.input_fields = sorted_fields(s.condition, ast_);
                r.rule.output_effects = {"invoke:" + xhandler};
                add(std::move(r));
                (void)hook;
            }
            ExprPtr then_guard = guard_with(path_guard, cond_norm);
            walk(s.then_branch, &then_guard);
        }
        if (!s.else_branch.empty()) {
            ExprPtr neg = simplify_not(Expr::make_not(cond_norm));
            ExprPtr else_guard = guard_with(path_guard, neg);
            walk(s.else_branch, &else_guard);
        }
    }

    void walk_excluding(const StmtList& stmts, const Statement* skip, const ExprPtr* guard) {
        for (const auto& s : stmts) {
            if (&s == skip) continue;
            StmtList one{s};
            walk(one, guard);
        }
    }

    const Statement* find_exception_hook(const StmtList& stmts, std::string* handler) {
        for (const auto& s : stmts) {
            if (s.kind == Statement::Kind::Perform && !s.perform_target.empty() &&
                !starts_with(s.perform_target, "REJECT") &&
                (s.perform_target.find("ERROR") != std::string::npos ||
                 s.perform_target.find("HANDLER") != std::string::npos)) {
                *handler = s.perform_target;
                return &s;
            }
            if (s.kind == Statement::Kind::CallStmt) {
                *handler = s.call_name;
                return &s;
            }
        }
        return nullptr;
    }

    /// Compound rejection guard with a positive equality plus a negated
    /// equality: the negated value is an implicit exemption.
    void detect_exemption(const Statement& s, const ExprPtr& cond_norm,
                          const std::string& klass) {
        std::vector<ExprPtr> conjuncts;
        and_conjuncts(cond_norm, conjuncts);
        const Expr* positive = nullptr;
        const Expr* negative = nullptr;
        for (const auto& c : conjuncts) {
            if (c->kind != Expr::Kind::Binary) continue;
            if (c->op == BinOp::Eq && c->lhs->kind == Expr::Kind::Ident &&
                c->rhs->kind == Expr::Kind::Literal && !positive) {
                positive = c.get();
            }
            if (c->op == BinOp::Ne && c->lhs->kind == Expr::Kind::Ident &&
                c->rhs->kind == Expr::Kind::Literal && !negative) {
                negative = c.get();
            }
        }
        if (!positive || !negative) return;
        DetailedRule r = base_rule(s, RuleRole::Exemption);
        r.error_class = klass;
        r.rule.kind = RuleKind::Validation;
        r.rule.category = RuleCategory::Implicit;
        r.rule.confidence = para_->salvaged ? Confidence::Low : Confidence::Medium;
        r.rule.description = "Implicit exemption: " + negative->lhs->ident + " == " +
                             negative->rhs->literal.str() + " allows " +
                             positive->lhs->ident + " == " + positive->rhs->literal.str() +
                             " to proceed (no " + klass + ")";
        r.rule.input_fields = {negative->lhs->ident, positive->lhs->ident};
        std::sort(r.rule.input_fields.begin(), r.rule.input_fields.end());
        r.rule.output_effects = {"waive:" + klass};
        add(std::move(r));
    }

    void on_compute(const Statement& s, const ExprPtr* path_guard) {
        DetailedRule r = base_rule(s, RuleRole::Computation);
        ExprPtr expr_norm = normalize_expr(s.expr, ast_);
        r.target_field = to_field_name(s.target);
        r.value_expr = expr_norm;
        if (path_guard && *path_guard) r.guard = pred::Predicate(*path_guard);
        r.rule.kind = RuleKind::Computation;
        r.rule.category = RuleCategory::Explicit;
        r.rule.description = "Compute " + r.target_field + " = " + render(expr_norm);
        if (path_guard && *path_guard) {
            r.rule.description += " when " + render(*path_guard);
        }
        r.rule.input_fields = sorted_fields(s.expr, ast_);
        r.rule.output_effects = {r.target_field};
        add(std::move(r));
    }

    void on_move(const Statement& s, const ExprPtr* path_guard) {
        // Rejection moves belong to their guarding IF (handled there);
        // a bare rejection move (unguarded) is still a transition record.
        std::string klass;
        if (is_rejection_move(s, &klass, nullptr) && path_guard) return;
        if (!s.source || s.source->kind != Expr::Kind::Literal) {
            // MOVE A TO B copies a field: treat as a computation effect
            for (const auto& target : s.targets) {
                DetailedRule r = base_rule(s, RuleRole::Computation);
                r.target_field = to_field_name(target);
                r.value_expr = normalize_expr(s.source, ast_);
                if (path_guard && *path_guard) r.guard = pred::Predicate(*path_guard);
                r.rule.kind = RuleKind::Computation;
                r.rule.category = RuleCategory::Explicit;
                r.rule.description =
                    "Compute " + r.target_field + " = " + render(r.value_expr);
                if (path_guard && *path_guard) {
                    r.rule.description += " when " + render(*path_guard);
                }
                r.rule.input_fields = sorted_fields(s.source, ast_);
                r.rule.output_effects = {r.target_field};
                add(std::move(r));
            }
            return;
        }
        for (const auto& target : s.targets) {
            std::string field = to_field_name(target);
            bool is_default = !path_guard && default_targets_.count(field) &&
                              default_targets_defaulted_.insert(field).second;
            DetailedRule r = base_rule(
                s, is_default ? RuleRole::DefaultValue : RuleRole::Transition);
            r.target_field = field;
            r.value_expr = s.source;
            if (path_guard && *path_guard) r.guard = pred::Predicate(*path_guard);
            if (is_default) {
                r.rule.kind = RuleKind::Computation;
                r.rule.category = RuleCategory::Implicit;
                r.rule.confidence =
                    para_->salvaged ? Confidence::Low : Confidence::Medium;
                r.rule.description =
                    "Default " + field + " = " + s.source->literal.str();
            } else {
                r.rule.kind = RuleKind::StateTransition;
                r.rule.category = RuleCategory::Explicit;
                r.rule.description = "Set " + field + " = " + s.source->literal.str();
                if (path_guard && *path_guard) {
                    r.rule.description += " when " + render(*path_guard);
                }
            }
            r.rule.input_fields =
                path_guard && *path_guard ? sorted_fields(*path_guard, ast_)
                                          : std::vector<std::string>{};
            r.rule.output_effects = {field};
            add(std::move(r));
        }
    }

    void on_evaluate(const Statement& s, const ExprPtr* path_guard) {
        std::string subject = to_field_name(s.subject);
        std::vector<Value> listed;
        for (const auto& w : s.whens) {
            if (!w.is_other) listed.push_back(w.value);
        }
        for (const auto& w : s.whens) {
            ExprPtr branch_guard;
            if (w.is_other) {
                for (const auto& v : listed) {
                    ExprPtr ne = Expr::make_binary(BinOp::Ne, Expr::make_ident(subject),
                                                   Expr::make_literal(v));
                    branch_guard = branch_guard
                                       ? Expr::make_binary(BinOp::And, branch_guard, ne)
                                       : ne;
                }
            } else {
                branch_guard = Expr::make_binary(BinOp::Eq, Expr::make_ident(subject),
                                                 Expr::make_literal(w.value));
            }
            ExprPtr combined = guard_with(path_guard, branch_guard);
            walk(w.body, &combined);
        }
    }

    void on_perform(const Statement& s, const ExprPtr* path_guard) {
        (void)path_guard;
        if (!s.until) return;
        // PERFORM <target> UNTIL <cond>: the loop collapses into the
        // target's node; on exit the condition holds.
        DetailedRule r = base_rule(s, RuleRole::Transition);
        ExprPtr cond_norm = normalize_expr(s.until, ast_);
        r.until_post = pred::Predicate(cond_norm);
        r.paragraph = s.perform_target;
        r.rule.kind = RuleKind::StateTransition;
        r.rule.category = RuleCategory::Explicit;
        r.rule.description = "Repeat " + to_operation_name(s.perform_target) + " until " +
                             render(cond_norm);
        r.rule.input_fields = sorted_fields(s.until, ast_);
        r.rule.output_effects = {};
        add(std::move(r));
    }

    const LegacyAst& ast_;
    const Paragraph* para_ = nullptr;
    std::set<std::string> default_targets_;
    std::set<std::string> default_targets_defaulted_;
    std::vector<DetailedRule> rules_;
};

/// Targets of unconditional literal moves that dominate every other access
/// in the execution linearization: the "default value" fields.
std::set<std::string> find_default_targets(const LegacyAst& ast,
                                           const cobol::StructureMap& structure) {
    AnalysisContext ctx;
    ctx.programs.push_back({ast.file, ast});
    ctx.structure = structure;
    std::vector<LinearStmt> linear = linearize(ctx);

    std::set<std::string> touched;
    std::set<std::string> defaults;
    for (const auto& ls : linear) {
        const Statement& s = *ls.stmt;
        std::set<std::string> reads;
        shallow_reads(s, *ls.ast, reads);
        std::set<std::string> writes;
        if (s.kind == Statement::Kind::Move) {
            for (const auto& t : s.targets) writes.insert(to_field_name(t));
        } else if (s.kind == Statement::Kind::Compute) {
            writes.insert(to_field_name(s.target));
        }
        bool literal_move = s.kind == Statement::Kind::Move && s.source &&
                            s.source->kind == Expr::Kind::Literal;
        for (const auto& w : writes) {
            if (literal_move && ls.cond_depth == 0 && !touched.count(w)) {
                defaults.insert(w);
            }
        }
        touched.insert(reads.begin(), reads.end());
        touched.insert(writes.begin(), writes.end());
    }
    return defaults;
}

} // namespace

std::vector<DetailedRule> extract_rules(const LegacyAst& ast,
                                        const cobol::StructureMap& structure) {
    RuleExtractor extractor(ast, find_default_targets(ast, structure));
    return extractor.run();
}

// ---------------------------------------------------------------------------
// Phase 1c: constraints
// ---------------------------------------------------------------------------

namespace {

std::string max_literal_for(const DataItem& item) {
    // Derived from PIC digit counts: 9(5) -> 99999, 9(3)V99 -> 999.99.
    int int_digits = 0;
    int frac_digits = 0;
    bool after_v = false;
    const std::string& pic = item.picture;
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
        if (c == '9') (after_v ? frac_digits : int_digits) += repeat;
        if (c == 'V') after_v = true;
    }
    std::string out(static_cast<std::size_t>(std::max(int_digits, 1)), '9');
    if (frac_digits > 0) out += "." + std::string(static_cast<std::size_t>(frac_digits), '9');
    return out;
}

int pic_width(const std::string& pic) {
    int width = 0;
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
        if (c == 'X' || c == 'A' || c == '9') width += repeat;
    }
    return width;
}

DetailedRule constraint_rule(const std::string& file, int line, ConstraintKind kind,
                             std::vector<std::string> subjects, std::string expression,
                             std::string description, Confidence conf = Confidence::High) {
    DetailedRule r;
    r.role = RuleRole::ConstraintRule;
    r.file = file;
    r.rule.location = {file, std::max(line, 1), std::max(line, 1)};
    r.rule.kind = RuleKind::Constraint;
    r.rule.category = RuleCategory::Implicit;
    r.rule.confidence = conf;
    r.rule.description = std::move(description);
    ConstraintSpec spec;
    spec.kind = kind;
    spec.subject_fields = std::move(subjects);
    spec.expression = std::move(expression);
    r.rule.input_fields = spec.subject_fields;
    r.rule.output_effects = {};
    r.rule.constraint_payload = std::move(spec);
    return r;
}

std::string value_literal_text(const Value& v) { return v.str(); }

// -- DDL subset --------------------------------------------------------------

struct DdlColumn {
    std::string name;
    std::string type;
    bool not_null = false;
    std::optional<std::pair<long long, long long>> check_between;
    int line = 1;
};

struct DdlForeignKey {
    std::string column;
    std::string ref_table;
    std::string ref_column;
    int line = 1;
};

struct DdlTable {
    std::string name;
    std::vector<DdlColumn> columns;
    std::vector<DdlForeignKey> foreign_keys;
    int line = 1;
};

/// Tiny tokenizer for CREATE TABLE statements in the DDL subset.
struct DdlToken {
    std::string text; // upper-cased word, number, or punctuation
    int line;
};

std::vector<DdlToken> ddl_tokenize(const std::string& text) {
    std::vector<DdlToken> out;
    int line = 1;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '-' && i + 1 < text.size() && text[i + 1] == '-') {
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i;
            while (i < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) {
                ++i;
            }
            out.push_back({to_upper(text.substr(start, i - start)), line});
            continue;
        }
        out.push_back({std::string(1, c), line});
        ++i;
    }
    return out;
}

std::vector<DdlTable> parse_ddl(const std::string& text, std::vector<std::string>* errors) {
    std::vector<DdlTable> tables;
    std::vector<DdlToken> toks = ddl_tokenize(text);
    std::size_t i = 0;
    auto at = [&](std::size_t k) -> const DdlToken& {
        static DdlToken end{"", 0};
        return k < toks.size() ? toks[k] : end;
    };
    while (i < toks.size()) {
        if (at(i).text != "CREATE" || at(i + 1).text != "TABLE") {
            ++i;
            continue;
        }
        DdlTable table;
        table.line = at(i).line;
        i += 2;
        table.name = at(i).text;
        ++i;
        if (at(i).text != "(") {
            if (errors) errors->push_back("expected ( after table name " + table.name);
            continue;
        }
        ++i;
        int depth = 1;
        std::vector<DdlToken> entry;
        auto flush_entry = [&]() {
            if (entry.empty()) return;
            std::size_t k = 0;
            auto e = [&](std::size_t n) -> const DdlToken& {
                static DdlToken end{"", 0};
                return n < entry.size() ? entry[n] : end;
            };
            if (e(0).text == "FOREIGN" && e(1).text == "KEY") {
                DdlForeignKey fk;
                fk.line = e(0).line;
                k = 2;
                if (e(k).text == "(") ++k;
                fk.column = e(k).text;
                ++k;
                if (e(k).text == ")") ++k;
                if (e(k).text == "REFERENCES") ++k;
                fk.ref_table = e(k).text;
                ++k;
                if (e(k).text == "(") {
                    ++k;
                    fk.ref_column = e(k).text;
                }
                table.foreign_keys.push_back(fk);
                entry.clear();
                return;
            }
            if (e(0).text == "CHECK" || e(0).text == "PRIMARY" || e(0).text == "UNIQUE" ||
                e(0).text == "CONSTRAINT") {
                // standalone CHECK (X BETWEEN a AND b); other constraints skipped
                for (std::size_t n = 0; n + 4 < entry.size(); ++n) {
                    if (entry[n + 1].text == "BETWEEN") {
                        DdlColumn pseudo;
                        pseudo.name = entry[n].text;
                        pseudo.type = "";
                        pseudo.line = e(0).line;
                        pseudo.check_between = {std::atoll(entry[n + 2].text.c_str()),
                                                std::atoll(entry[n + 4].text.c_str())};
                        table.columns.push_back(pseudo);
                        break;
                    }
                }
                entry.clear();
                return;
            }
            DdlColumn col;
            col.name = e(0).text;
            col.line = e(0).line;
            k = 1;
            col.type = e(k).text;
            ++k;
            if (e(k).text == "(") {
                col.type += "(";
                ++k;
                while (k < entry.size() && e(k).text != ")") {
                    col.type += e(k).text;
                    ++k;
                }
                col.type += ")";
                ++k;
            }
            while (k < entry.size()) {
                if (e(k).text == "NOT" && e(k + 1).text == "NULL") {
                    col.not_null = true;
                    k += 2;
                } else if (e(k).text == "CHECK") {
                    for (std::size_t n = k; n + 4 < entry.size(); ++n) {
                        if (entry[n + 1].text == "BETWEEN") {
                            col.check_between = {std::atoll(entry[n + 2].text.c_str()),
                                                 std::atoll(entry[n + 4].text.c_str())};
                            break;
                        }
                    }
                    break;
                } else {
                    ++k;
                }
            }
            table.columns.push_back(col);
            entry.clear();
        };
        while (i < toks.size() && depth > 0) {
            if (at(i).text == "(") ++depth;
            if (at(i).text == ")") {
                --depth;
                if (depth == 0) {
                    flush_entry();
                    ++i;
                    break;
                }
            }
            if (at(i).text == "," && depth == 1) {
                flush_entry();
                ++i;
                continue;
            }
            entry.push_back(at(i));
            ++i;
        }
        tables.push_back(std::move(table));
    }
    return tables;
}

} // namespace

std::vector<DetailedRule> discover_constraints(const LegacyAst& ast,
                                               const std::vector<std::string>& schema_texts) {
    std::vector<DetailedRule> out;

    // PIC clauses -> type restrictions; 88 levels -> enums / ranges
    for (const auto& item : ast.data_items) {
        if (!item.is_group()) {
            std::string field = to_field_name(item.name);
            std::string expr;
            std::string desc;
            if (item.type == bsg::DataType::string_type()) {
                expr = "len(" + field + ") <= " + std::to_string(pic_width(item.picture));
                desc = "Field " + field + " is text of width " +
                       std::to_string(pic_width(item.picture));
            } else if (item.occurs > 0) {
                expr = "count(" + field + ") <= " + std::to_string(item.occurs);
                desc = "Field " + field + " holds up to " + std::to_string(item.occurs) +
                       " entries";
            } else {
                expr = field + " <= " + max_literal_for(item);
                desc = "Field " + field + " is numeric with at most " +
                       max_literal_for(item) + " magnitude";
            }
            out.push_back(constraint_rule(ast.file, item.line,
                                          ConstraintKind::TypeRestriction, {field}, expr,
                                          desc));
        }
        for (const auto& cond : item.conditions) {
            std::string field = to_field_name(item.name);
            if (cond.range) {
                auto rule = constraint_rule(
                    ast.file, cond.line, ConstraintKind::ValueRange, {field},
                    field + " >= " + value_literal_text(cond.range->first) + " and " + field +
                        " <= " + value_literal_text(cond.range->second),
                    "Value range on " + field + ": " +
                        value_literal_text(cond.range->first) + " through " +
                        value_literal_text(cond.range->second));
                if (cond.range->first.is_int()) {
                    rule.rule.constraint_payload->lower = cond.range->first.as_int();
                }
                if (cond.range->second.is_int()) {
                    rule.rule.constraint_payload->upper = cond.range->second.as_int();
                }
                out.push_back(std::move(rule));
            } else if (!cond.values.empty()) {
                std::string values;
                for (std::size_t i = 0; i < cond.values.size(); ++i) {
                    if (i) values += ", ";
                    values += value_literal_text(cond.values[i]);
                }
                out.push_back(constraint_rule(
                    ast.file, cond.line, ConstraintKind::TypeRestriction, {field},
                    field + " in [" + values + "]",
                    "Allowed values of " + field + ": [" + values + "]"));
            }
        }
    }

    // DDL schemas
    for (const auto& schema : schema_texts) {
        std::vector<std::string> errors;
        for (const auto& table : parse_ddl(schema, &errors)) {
            for (const auto& col : table.columns) {
                std::string field = to_field_name(col.name);
                if (col.check_between) {
                    auto rule = constraint_rule(
                        "schema", col.line, ConstraintKind::ValueRange, {field},
                        field + " >= " + std::to_string(col.check_between->first) + " and " +
                            field + " <= " + std::to_string(col.check_between->second),
                        "Check constraint on " + field + ": between " +
                            std::to_string(col.check_between->first) + " and " +
                            std::to_string(col.check_between->second));
                    rule.rule.constraint_payload->lower = col.check_between->first;
                    rule.rule.constraint_payload->upper = col.check_between->second;
                    out.push_back(std::move(rule));
                }
            }
            for (const auto& fk : table.foreign_keys) {
                std::string field = to_field_name(fk.column);
                std::string target =
                    to_field_name(fk.ref_table) + "." + to_field_name(fk.ref_column);
                out.push_back(constraint_rule(
                    "schema", fk.line, ConstraintKind::ReferentialIntegrity, {field},
                    field + " in " + target,
                    "Referential integrity: " + field + " references " + target));
            }
        }
    }

    // Paired COMPUTE/IF cross-field equality -> business invariant
    for (const auto& para : ast.paragraphs) {
        for (const auto& s : para.statements) {
            if (s.kind != Statement::Kind::If) continue;
            std::string klass;
            if (!find_rejection(s.then_branch, &klass, nullptr, nullptr)) continue;
            ExprPtr cond = normalize_expr(s.condition, ast);
            std::vector<ExprPtr> conjuncts;
            and_conjuncts(cond, conjuncts);
            for (const auto& c : conjuncts) {
                if (c->kind != Expr::Kind::Binary || c->op != BinOp::Ne) continue;
                if (c->lhs->kind != Expr::Kind::Ident) continue;
                bool rhs_structural = c->rhs->kind == Expr::Kind::Call ||
                                      (c->rhs->kind == Expr::Kind::Binary);
                if (!rhs_structural) continue;
                std::string expr = c->lhs->ident + " == " + render(c->rhs);
                std::set<std::string> subjects;
                subjects.insert(c->lhs->ident);
                expr_fields(c->rhs, ast, subjects);
                out.push_back(constraint_rule(
                    ast.file, s.line_start, ConstraintKind::BusinessInvariant,
                    {subjects.begin(), subjects.end()}, expr,
                    "Business invariant: " + expr, Confidence::Medium));
            }
        }
    }

    // Explicit PERFORM sequencing of rule-bearing paragraphs
    auto rule_bearing = [&](const std::string& name) {
        const Paragraph* p = ast.find_paragraph(name);
        if (!p) return false;
        for (const auto& s : p->statements) {
            if (s.kind == Statement::Kind::If || s.kind == Statement::Kind::Compute ||
                s.kind == Statement::Kind::Evaluate ||
                (s.kind == Statement::Kind::Move && s.source &&
                 s.source->kind == Expr::Kind::Literal)) {
                return true;
            }
        }
        return false;
    };
    cobol::StructureMap structure = cobol::extract_structure(ast);
    std::set<std::string> entries(structure.entry_points.begin(),
                                  structure.entry_points.end());
    for (const auto& para : ast.paragraphs) {
        if (!entries.count(para.name)) continue;
        std::string prev;
        int prev_line = 0;
        for (const auto& s : para.statements) {
            if (s.kind != Statement::Kind::Perform || s.perform_target.empty()) continue;
            if (!rule_bearing(s.perform_target)) continue;
            if (!prev.empty()) {
                std::string a = to_field_name(prev);
                std::string b = to_field_name(s.perform_target);
                auto rule = constraint_rule(
                    ast.file, prev_line, ConstraintKind::TemporalOrdering,
                    {"step." + a, "step." + b}, "step." + a + " < step." + b,
                    "Ordering: " + to_operation_name(prev) + " precedes " +
                        to_operation_name(s.perform_target),
                    Confidence::Medium);
                rule.after_paragraph = prev;
                rule.paragraph = s.perform_target;
                out.push_back(std::move(rule));
            }
            prev = s.perform_target;
            prev_line = s.line_start;
        }
    }

    return out;
}

// ---------------------------------------------------------------------------
// Bundle-level analysis
// ---------------------------------------------------------------------------

namespace {

std::vector<DetailedRule> config_rules(const model::LegacyArtifactBundle& bundle) {
    std::vector<DetailedRule> out;
    for (const auto* f : bundle.of_kind(model::ArtifactKind::Config)) {
        int lineno = 0;
        for (const auto& raw : split(f->text, '\n')) {
            ++lineno;
            std::string line = trim(raw);
            if (line.empty() || line[0] == '#' || line[0] == '*') continue;
            auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = to_field_name(trim(line.substr(0, eq)));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty() || value.empty()) continue;
            bool numeric = !value.empty() &&
                           value.find_first_not_of("0123456789.-") == std::string::npos;
            if (numeric && value.find('.') == std::string::npos) {
                long long v = std::atoll(value.c_str());
                auto rule = constraint_rule(
                    f->path, lineno, ConstraintKind::ValueRange, {key},
                    key + " == " + std::to_string(v),
                    "Configured value: " + key + " = " + std::to_string(v));
                rule.rule.constraint_payload->lower = v;
                rule.rule.constraint_payload->upper = v;
                out.push_back(std::move(rule));
            } else {
                out.push_back(constraint_rule(
                    f->path, lineno, ConstraintKind::TypeRestriction, {key},
                    key + " == '" + value + "'",
                    "Configured value: " + key + " = '" + value + "'"));
            }
        }
    }
    return out;
}

} // namespace

AnalysisResult analyze_bundle(const model::LegacyArtifactBundle& bundle,
                              const model::ExtractionMeta& meta) {
    AnalysisResult result;
    result.context = parse_bundle(bundle);

    std::vector<std::string> schema_texts;
    for (const auto* f : bundle.of_kind(model::ArtifactKind::Schema)) {
        schema_texts.push_back(f->text);
    }

    std::vector<DetailedRule> all;
    for (const auto& program : result.context.programs) {
        cobol::StructureMap structure = cobol::extract_structure(program.ast);
        for (auto& r : extract_rules(program.ast, structure)) all.push_back(std::move(r));
        for (auto& r : discover_constraints(program.ast, schema_texts)) {
            all.push_back(std::move(r));
        }
        schema_texts.clear(); // schemas contribute once, with the first program
    }
    for (auto& r : config_rules(bundle)) all.push_back(std::move(r));

    // Stable document order across files, then renumber.
    std::stable_sort(all.begin(), all.end(), [](const DetailedRule& a, const DetailedRule& b) {
        return std::tie(a.rule.location.file, a.rule.location.line_start) <
               std::tie(b.rule.location.file, b.rule.location.line_start);
    });
    int seq = 0;
    for (auto& r : all) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "BR-%03d", ++seq);
        r.rule.id = buf;
        result.bri.rules.push_back(r.rule);
    }
    result.detailed = std::move(all);
    result.bri.bundle_digest = model::bundle_digest(bundle);
    result.bri.extraction_meta = meta;
    result.bri.check();
    return result;
}

} // namespace modernize::analyzer
