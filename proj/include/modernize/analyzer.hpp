#pragma once

#include "modernize/artifact.hpp"
#include "modernize/cobol.hpp"

#include <optional>
#include <string>
#include <vector>

namespace modernize::analyzer {

struct ParsedProgram {
    std::string file;
    cobol::LegacyAst ast;
};

/// Parsed view of a whole bundle: one AST per source file plus the merged
/// structure map. CALL targets naming another bundled program resolve;
/// the rest are external dependencies.
struct AnalysisContext {
    std::vector<ParsedProgram> programs;
    cobol::StructureMap structure;

    const cobol::LegacyAst* ast_for(const std::string& file) const;
    const cobol::Paragraph* find_paragraph(const std::string& name,
                                           std::string* file_out = nullptr) const;
};

AnalysisContext parse_bundle(const model::LegacyArtifactBundle& bundle);

/// How a rule participates in specification generation. The analyzer keeps
/// this semantic payload alongside the plain inventory entry so the
/// generator does not have to re-derive patterns from source.
enum class RuleRole {
    RejectionGuard, // IF <cond> -> reject
    Exemption,      // implicit waiver inside a compound rejection guard
    Computation,    // COMPUTE/ADD/SUBTRACT, possibly guarded
    DefaultValue,   // unconditional MOVE literal dominating first read
    Transition,     // guarded or re-assigning MOVE literal
    ExceptionHook,  // IF -> PERFORM handler / CALL
    ConstraintRule, // schema/config/invariant constraint
    Temporal,       // paragraph ordering constraint
};

struct DetailedRule {
    model::BusinessRule rule;
    RuleRole role = RuleRole::ConstraintRule;
    std::string file;
    std::string paragraph; // empty for schema/config rules

    // Normalized (modern field names, 88-conditions expanded) payload:
    pred::Predicate guard;       // rejection condition / transition guard
    std::string error_class;     // rejection class
    std::string target_field;    // write target of computation/default/transition
    pred::ExprPtr value_expr;    // RHS of computation / literal of move
    std::string handler;         // performed reject/exception paragraph, if any
    pred::Predicate until_post;  // exit condition of a collapsed PERFORM UNTIL
    std::string after_paragraph; // Temporal: paragraph that must precede `paragraph`
};

/// Normalize a raw COBOL expression: hyphenated data names become
/// snake_case field names and level-88 condition names expand to
/// membership/range predicates over their parent field.
pred::ExprPtr normalize_expr(const cobol::ExprPtr& raw, const cobol::LegacyAst& ast);

/// Push negations inward (De Morgan, comparison flips, double-not
/// elimination) so negated rejection guards read as natural preconditions.
pred::ExprPtr simplify_not(const pred::ExprPtr& expr);

/// Phase 1b: pattern-table extraction over one program. Ids are assigned
/// BR-001.. in document order within this call; analyze_bundle renumbers
/// across files.
std::vector<DetailedRule> extract_rules(const cobol::LegacyAst& ast,
                                        const cobol::StructureMap& structure);

/// Phase 1c: constraints from the data division, DDL schemas, config
/// key=value pairs, paired COMPUTE/IF invariants, and PERFORM ordering.
std::vector<DetailedRule> discover_constraints(const cobol::LegacyAst& ast,
                                               const std::vector<std::string>& schema_texts);

/// Full Agent-1 run over a bundle: parse, extract, discover, merge in
/// (file, line) order, assign BR-### ids, stamp the bundle digest.
struct AnalysisResult {
    model::BusinessRuleInventory bri;
    std::vector<DetailedRule> detailed; // same order as bri.rules
    AnalysisContext context;
};

AnalysisResult analyze_bundle(const model::LegacyArtifactBundle& bundle,
                              const model::ExtractionMeta& meta);

/// Field accesses of a statement subtree, normalized names.
void collect_reads(const cobol::StmtList& stmts, const cobol::LegacyAst& ast,
                   std::set<std::string>& reads);
void collect_writes(const cobol::StmtList& stmts, const cobol::LegacyAst& ast,
                    std::set<std::string>& writes);

} // namespace modernize::analyzer
