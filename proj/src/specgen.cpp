#include "modernize/specgen.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace modernize::specgen {

using analyzer::AnalysisContext;
using analyzer::AnalysisResult;
using analyzer::DetailedRule;
using analyzer::RuleRole;
using bsg::Bsg;
using bsg::BsgEdge;
using bsg::ContractClause;
using bsg::DataType;
using bsg::EdgeLabel;
using bsg::OperationNode;
using model::Confidence;
using model::ConstraintKind;
using pred::BinOp;
using pred::Expr;
using pred::ExprPtr;

namespace {

ContractClause clause_from_expr(const ExprPtr& e) {
    return ContractClause::from_text(pred::Predicate(e).render());
}

/// Rename identifier occurrences per `renames` (written-field -> new name).
ExprPtr rename_idents(const ExprPtr& e, const std::map<std::string, std::string>& renames) {
    if (!e) return e;
    switch (e->kind) {
        case Expr::Kind::Ident: {
            auto it = renames.find(e->ident);
            return it == renames.end() ? e : Expr::make_ident(it->second);
        }
        case Expr::Kind::Not:
            return Expr::make_not(rename_idents(e->lhs, renames));
        case Expr::Kind::Call:
            return Expr::make_call(e->fn, rename_idents(e->lhs, renames));
        case Expr::Kind::Binary:
            return Expr::make_binary(e->op, rename_idents(e->lhs, renames),
                                     rename_idents(e->rhs, renames));
        default:
            return e;
    }
}

Confidence worst(Confidence a, Confidence b) {
    return static_cast<int>(a) >= static_cast<int>(b) ? a : b;
}

struct NodeBuild {
    OperationNode node;
    std::string paragraph;
    std::string file;
    std::set<std::string> reads;
    std::set<std::string> writes;
    std::map<std::string, std::string> renames;
    std::vector<const DetailedRule*> rules;
};

/// Field type map from every program's data division plus config values.
std::map<std::string, DataType> field_types(const AnalysisContext& ctx) {
    std::map<std::string, DataType> types;
    for (const auto& prog : ctx.programs) {
        for (const auto& item : prog.ast.data_items) {
            if (item.is_group()) continue;
            types[to_field_name(item.name)] = item.type;
        }
    }
    return types;
}

DataType type_of(const std::map<std::string, DataType>& types, const std::string& field) {
    auto it = types.find(field);
    if (it != types.end()) return it->second;
    if (starts_with(field, "new_")) {
        auto base = types.find(field.substr(4));
        if (base != types.end()) return base->second;
    }
    return DataType::string_type();
}

/// Single-field value constraints attach as preconditions; everything else
/// is represented structurally (types, edges) or as prose invariants.
bool precondition_eligible(const DetailedRule& r) {
    const auto& spec = *r.rule.constraint_payload;
    if (spec.kind == ConstraintKind::ReferentialIntegrity ||
        spec.kind == ConstraintKind::TemporalOrdering) {
        return false;
    }
    auto parsed = pred::try_parse_predicate(spec.expression);
    if (!parsed) return false;
    auto ids = pred::free_identifiers(*parsed);
    if (spec.subject_fields.size() != 1 || ids != std::set<std::string>{spec.subject_fields[0]}) {
        return false;
    }
    if (spec.kind == ConstraintKind::ValueRange) return true;
    const ExprPtr& root = parsed->root();
    bool membership_shape =
        root->kind == Expr::Kind::Binary &&
        (root->op == BinOp::In || root->op == BinOp::Eq) &&
        root->lhs->kind == Expr::Kind::Ident;
    return spec.kind == ConstraintKind::TypeRestriction && membership_shape;
}

} // namespace

Bsg generate_bsg(const AnalysisResult& analysis, const model::LegacyArtifactBundle& bundle) {
    const model::BusinessRuleInventory& bri = analysis.bri;
    if (bri.bundle_digest != model::bundle_digest(bundle)) {
        throw Error("DIGEST_MISMATCH",
                    "inventory was not derived from this bundle (digest mismatch)");
    }
    if (bri.rules.empty()) {
        throw Error("EMPTY_BRI", "inventory carries no rules; refusing to emit an empty graph");
    }

    // Field-name normalization must be injective per bundle.
    std::map<std::string, std::set<std::string>> normalization;
    for (const auto& prog : analysis.context.programs) {
        for (const auto& item : prog.ast.data_items) {
            if (!item.is_group()) normalization[to_field_name(item.name)].insert(item.name);
        }
    }
    for (const auto& [norm, originals] : normalization) {
        if (originals.size() > 1) {
            std::string all;
            for (const auto& o : originals) all += o + " ";
            throw Error("NAME_COLLISION",
                        "distinct data names normalize to '" + norm + "': " + all);
        }
    }

    std::map<std::string, DataType> types = field_types(analysis.context);

    // ---- nodes: one per paragraph owning code rules ------------------------
    std::vector<NodeBuild> builds;
    std::map<std::string, std::size_t> by_paragraph;
    std::set<std::string> used_ids;
    auto node_for = [&](const DetailedRule& r) -> NodeBuild& {
        auto it = by_paragraph.find(r.paragraph);
        if (it != by_paragraph.end()) return builds[it->second];
        NodeBuild b;
        b.paragraph = r.paragraph;
        b.file = r.file;
        b.node.name = to_operation_name(r.paragraph);
        std::string base = bundle.scenario_id + "/" + b.node.name;
        std::string id = base;
        int suffix = 1;
        while (used_ids.count(id)) id = base + "-" + std::to_string(++suffix);
        used_ids.insert(id);
        b.node.id = id;
        std::string file;
        if (const auto* para = analysis.context.find_paragraph(r.paragraph, &file)) {
            b.node.source_location = {file, para->line_start,
                                      std::max(para->line_start, para->line_end)};
        } else {
            b.node.source_location = r.rule.location;
        }
        by_paragraph.emplace(r.paragraph, builds.size());
        builds.push_back(std::move(b));
        return builds.back();
    };

    auto is_code_rule = [](const DetailedRule& r) {
        return r.role == RuleRole::RejectionGuard || r.role == RuleRole::Exemption ||
               r.role == RuleRole::Computation || r.role == RuleRole::DefaultValue ||
               (r.role == RuleRole::Transition) || r.role == RuleRole::ExceptionHook;
    };

    for (const auto& r : analysis.detailed) {
        if (!is_code_rule(r) || r.paragraph.empty()) continue;
        NodeBuild& b = node_for(r);
        b.rules.push_back(&r);
        b.node.rule_ids.push_back(r.rule.id);
        b.node.confidence = b.rules.size() == 1
                                ? r.rule.confidence
                                : worst(b.node.confidence, r.rule.confidence);
        if (!r.guard.empty()) {
            for (const auto& f : pred::free_identifiers(r.guard)) b.reads.insert(f);
        }
        if (r.value_expr) {
            for (const auto& f : pred::free_identifiers(pred::Predicate(r.value_expr))) {
                b.reads.insert(f);
            }
        }
        if (!r.until_post.empty()) {
            for (const auto& f : pred::free_identifiers(r.until_post)) b.reads.insert(f);
        }
        if (r.role == RuleRole::Exemption) {
            for (const auto& f : r.rule.input_fields) b.reads.insert(f);
        }
        if (!r.target_field.empty() &&
            (r.role == RuleRole::Computation || r.role == RuleRole::DefaultValue ||
             r.role == RuleRole::Transition)) {
            b.writes.insert(r.target_field);
        }
    }
    if (builds.empty()) {
        throw Error("EMPTY_BRI", "no rule-bearing paragraphs; nothing to specify");
    }

    // ---- clauses ------------------------------------------------------------
    for (auto& b : builds) {
        for (const auto& f : b.writes) {
            if (b.reads.count(f)) b.renames[f] = "new_" + f;
        }

        for (const DetailedRule* r : b.rules) {
            switch (r->role) {
                case RuleRole::RejectionGuard: {
                    ExprPtr pre =
                        analyzer::simplify_not(Expr::make_not(r->guard.root()));
                    ContractClause clause = clause_from_expr(pre);
                    clause.error_class = r->error_class;
                    b.node.preconditions.push_back(std::move(clause));
                    if (!b.node.error_behavior) {
                        bsg::ErrorBehavior eb;
                        eb.error_class = r->error_class;
                        eb.trigger_text = r->guard.render();
                        eb.trigger = r->guard;
                        eb.description =
                            "reject with " + r->error_class + " when " + eb.trigger_text;
                        b.node.error_behavior = std::move(eb);
                    }
                    break;
                }
                case RuleRole::Computation:
                case RuleRole::DefaultValue:
                case RuleRole::Transition: {
                    if (!r->until_post.empty()) {
                        ExprPtr post = rename_idents(r->until_post.root(), b.renames);
                        b.node.postconditions.push_back(clause_from_expr(post));
                        break;
                    }
                    if (r->target_field.empty() || !r->value_expr) break;
                    std::string out_name = r->target_field;
                    auto rn = b.renames.find(out_name);
                    if (rn != b.renames.end()) out_name = rn->second;
                    ExprPtr eq = Expr::make_binary(BinOp::Eq, Expr::make_ident(out_name),
                                                   r->value_expr);
                    ExprPtr post =
                        r->guard.empty()
                            ? eq
                            : Expr::make_binary(
                                  BinOp::Or,
                                  analyzer::simplify_not(Expr::make_not(r->guard.root())),
                                  eq);
                    b.node.postconditions.push_back(clause_from_expr(post));
                    break;
                }
                case RuleRole::Exemption:
                case RuleRole::ExceptionHook:
                    break; // represented via edges / the guarding precondition
                default:
                    break;
            }
        }
    }

    // ---- constraint attachment ----------------------------------------------
    Bsg graph;
    std::vector<ContractClause> global;
    for (const auto& r : analysis.detailed) {
        if (r.role == RuleRole::Temporal) {
            bool attached = false;
            auto it = by_paragraph.find(r.paragraph);
            if (it != by_paragraph.end()) {
                builds[it->second].node.rule_ids.push_back(r.rule.id);
                attached = true;
            }
            if (!attached) {
                ContractClause c = ContractClause::from_text(r.rule.description);
                c.rule_id = r.rule.id;
                global.push_back(std::move(c));
            }
            continue;
        }
        if (r.role != RuleRole::ConstraintRule) continue;
        const auto& spec = *r.rule.constraint_payload;

        if (spec.kind == ConstraintKind::BusinessInvariant) {
            ContractClause c = ContractClause::from_text(spec.expression);
            c.rule_id = r.rule.id;
            global.push_back(std::move(c));
            continue;
        }
        bool attached = false;
        if (precondition_eligible(r)) {
            const std::string& field = spec.subject_fields[0];
            for (auto& b : builds) {
                if (!b.reads.count(field)) continue;
                attached = true;
                bool duplicate = false;
                for (auto& existing : b.node.preconditions) {
                    if (existing.text == spec.expression) duplicate = true;
                }
                if (!duplicate) {
                    b.node.preconditions.push_back(ContractClause::from_text(spec.expression));
                }
                b.node.rule_ids.push_back(r.rule.id);
            }
        } else if (spec.kind == ConstraintKind::TypeRestriction && !spec.subject_fields.empty()) {
            // realized as the input/output DataType; tag the touching nodes
            const std::string& field = spec.subject_fields[0];
            for (auto& b : builds) {
                if (b.reads.count(field) || b.writes.count(field)) {
                    b.node.rule_ids.push_back(r.rule.id);
                    attached = true;
                }
            }
        }
        if (!attached) {
            // kept as a non-checkable global clause so the transfer stays
            // lossless (prose by construction: descriptions never parse)
            ContractClause c = ContractClause::from_text(r.rule.description);
            c.rule_id = r.rule.id;
            global.push_back(std::move(c));
        }
    }

    // ---- inputs / outputs ----------------------------------------------------
    for (auto& b : builds) {
        for (const auto& f : b.reads) {
            if (starts_with(f, "step.")) continue;
            b.node.inputs[f] = type_of(types, f);
        }
        for (const auto& f : b.writes) {
            std::string out_name = f;
            auto rn = b.renames.find(f);
            if (rn != b.renames.end()) out_name = rn->second;
            b.node.outputs[out_name] = type_of(types, f);
        }
    }

    // ---- edges ----------------------------------------------------------------
    struct Pending {
        std::string node_id;
        ExprPtr guard;
    };
    std::vector<BsgEdge> edges;
    auto add_edge = [&](const Pending& from, const std::string& to, EdgeLabel base) {
        BsgEdge e;
        e.from = from.node_id;
        e.to = to;
        if (from.guard) {
            e.label = base == EdgeLabel::ErrorEdge ? base : EdgeLabel::Conditional;
            e.guard = pred::Predicate(from.guard);
            e.guard_text = e.guard->render();
        } else {
            e.label = base;
        }
        for (const auto& existing : edges) {
            if (existing.from == e.from && existing.to == e.to &&
                existing.label == e.label && existing.guard_text == e.guard_text) {
                return;
            }
        }
        edges.push_back(std::move(e));
    };

    auto node_id_of = [&](const std::string& paragraph) -> std::optional<std::string> {
        auto it = by_paragraph.find(paragraph);
        if (it == by_paragraph.end()) return std::nullopt;
        return builds[it->second].node.id;
    };

    std::function<std::vector<Pending>(const cobol::StmtList&, std::vector<Pending>,
                                       const cobol::LegacyAst&, ExprPtr,
                                       std::set<std::string>&)>
        walk_chain = [&](const cobol::StmtList& stmts, std::vector<Pending> frontier,
                         const cobol::LegacyAst& ast, ExprPtr pending_guard,
                         std::set<std::string>& visiting) -> std::vector<Pending> {
        for (const auto& s : stmts) {
            if (s.kind == cobol::Statement::Kind::Perform && !s.perform_target.empty()) {
                auto target = node_id_of(s.perform_target);
                if (target) {
                    for (const auto& p : frontier) add_edge(p, *target, EdgeLabel::Sequence);
                    frontier.assign(1, {*target, nullptr});
                    pending_guard = nullptr;
                } else if (!visiting.count(s.perform_target)) {
                    std::string file;
                    const auto* para =
                        analysis.context.find_paragraph(s.perform_target, &file);
                    if (para) {
                        visiting.insert(s.perform_target);
                        frontier = walk_chain(para->statements, std::move(frontier), ast,
                                              pending_guard, visiting);
                        visiting.erase(s.perform_target);
                    }
                }
            } else if (s.kind == cobol::Statement::Kind::If) {
                ExprPtr cond = analyzer::normalize_expr(s.condition, ast);
                std::vector<Pending> then_start;
                std::vector<Pending> else_start;
                for (const auto& p : frontier) {
                    ExprPtr g = p.guard ? Expr::make_binary(BinOp::And, p.guard, cond) : cond;
                    then_start.push_back({p.node_id, g});
                    ExprPtr neg = analyzer::simplify_not(Expr::make_not(cond));
                    ExprPtr ge =
                        p.guard ? Expr::make_binary(BinOp::And, p.guard, neg) : neg;
                    else_start.push_back({p.node_id, ge});
                }
                std::vector<Pending> then_end =
                    walk_chain(s.then_branch, then_start, ast, nullptr, visiting);
                std::vector<Pending> else_end =
                    s.else_branch.empty()
                        ? else_start
                        : walk_chain(s.else_branch, else_start, ast, nullptr, visiting);
                frontier = then_end;
                for (auto& p : else_end) frontier.push_back(std::move(p));
            }
        }
        return frontier;
    };

    for (const auto& entry : analysis.context.structure.entry_points) {
        std::string file;
        const auto* para = analysis.context.find_paragraph(entry, &file);
        if (!para) continue;
        const auto* ast = analysis.context.ast_for(file);
        std::vector<Pending> frontier;
        if (auto self = node_id_of(entry)) frontier.push_back({*self, nullptr});
        std::set<std::string> visiting{entry};
        walk_chain(para->statements, std::move(frontier), *ast, nullptr, visiting);
    }

    // rejection handlers and exception hooks become error/conditional edges
    for (const auto& b : builds) {
        for (const DetailedRule* r : b.rules) {
            if (r->handler.empty()) continue;
            auto target = node_id_of(r->handler);
            if (!target || *target == b.node.id) continue;
            BsgEdge e;
            e.from = b.node.id;
            e.to = *target;
            e.label = r->role == RuleRole::RejectionGuard ? EdgeLabel::ErrorEdge
                                                          : EdgeLabel::Conditional;
            if (!r->guard.empty()) {
                e.guard = r->guard;
                e.guard_text = r->guard.render();
            }
            bool dup = false;
            for (const auto& existing : edges) {
                if (existing.from == e.from && existing.to == e.to &&
                    existing.label == e.label) {
                    dup = true;
                }
            }
            if (!dup) edges.push_back(std::move(e));
        }
    }

    for (auto& b : builds) {
        std::sort(b.node.rule_ids.begin(), b.node.rule_ids.end());
        b.node.rule_ids.erase(
            std::unique(b.node.rule_ids.begin(), b.node.rule_ids.end()),
            b.node.rule_ids.end());
        graph.nodes.push_back(std::move(b.node));
    }
    graph.edges = std::move(edges);
    graph.global_invariants = std::move(global);
    graph.metadata.scenario_id = bundle.scenario_id;
    graph.metadata.bri_digest = model::bri_digest(bri);
    graph.metadata.generator = "deterministic";

    bsg::ValidationReport report = bsg::validate_bsg(graph, bri);
    if (!report.empty()) {
        std::string detail;
        for (const auto& v : report) detail += v.code + "@" + v.location + " ";
        throw Error("GENERATOR_INVALID", "generated graph fails validation: " + detail);
    }
    return graph;
}

LosslessReport check_lossless(const model::BusinessRuleInventory& bri, const Bsg& graph) {
    std::set<std::string> referenced;
    for (const auto& id : bsg::referenced_rule_ids(graph)) referenced.insert(id);
    LosslessReport report;
    for (const auto& r : bri.rules) {
        if (!referenced.count(r.id)) report.missing_rule_ids.push_back(r.id);
    }
    return report;
}

} // namespace modernize::specgen
