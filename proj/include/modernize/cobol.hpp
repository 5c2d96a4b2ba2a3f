#pragma once

#include "modernize/bsg.hpp"
#include "modernize/predicate.hpp"
#include "modernize/util.hpp"

#include <optional>
#include <string>
#include <vector>

namespace modernize::cobol {

/// Expressions and conditions reuse the predicate AST; identifiers hold
/// raw COBOL data names (hyphenated, upper case) until the generator
/// normalizes them. Level-88 condition names appear as bare identifiers
/// and are resolved against the data division by consumers.
using pred::ExprPtr;

struct Level88 {
    std::string name;
    std::vector<pred::Value> values;                          // VALUE 'A' 'B' ...
    std::optional<std::pair<pred::Value, pred::Value>> range; // VALUE a THRU b
    int line = 0;
};

struct DataItem {
    int level = 1;
    std::string name;
    std::string picture; // raw PIC text, empty for group items
    bsg::DataType type = bsg::DataType::string_type();
    std::optional<pred::Value> initial;
    std::vector<Level88> conditions;
    int occurs = 0;
    int line = 0;

    bool is_group() const { return picture.empty(); }
};

struct Statement;
using StmtList = std::vector<Statement>;

struct WhenBranch {
    bool is_other = false;
    pred::Value value; // literal matched against the subject
    StmtList body;
    int line = 0;
};

struct Statement {
    enum class Kind {
        Move,
        Compute, // covers COMPUTE / ADD ... TO / SUBTRACT ... FROM
        If,
        Evaluate,
        Perform,
        CallStmt,
        Display,
        StopRun,
    } kind = Kind::Display;

    int line_start = 0;
    int line_end = 0;

    // Move
    ExprPtr source;
    std::vector<std::string> targets;
    // Compute
    std::string target;
    ExprPtr expr;
    // If
    ExprPtr condition;
    StmtList then_branch;
    StmtList else_branch;
    // Evaluate
    std::string subject;
    std::vector<WhenBranch> whens;
    // Perform
    std::string perform_target;
    std::string perform_thru;
    ExprPtr until;
    // Call
    std::string call_name;
};

struct Paragraph {
    std::string name;
    StmtList statements;
    int line_start = 0;
    int line_end = 0;
    bool salvaged = false; // some statements were skipped by error recovery
};

struct ParseNote {
    int line = 0;
    int column = 0;
    std::string message;
};

struct LegacyAst {
    std::string program_id;
    std::string file; // source path used in locations
    std::vector<DataItem> data_items;
    std::vector<Paragraph> paragraphs;
    std::vector<ParseNote> notes;

    const DataItem* find_item(const std::string& name) const;
    const Paragraph* find_paragraph(const std::string& name) const;
    /// Resolve an 88-level condition name to (parent item, condition).
    std::optional<std::pair<const DataItem*, const Level88*>> find_condition(
        const std::string& name) const;
};

/// Parse the mini-COBOL subset (see docs/legacy-subset.md). Fixed-format
/// sources (sequence numbers in columns 1-6) are detected and stripped.
/// Unknown statements are skipped to the next paragraph and recorded in
/// `notes`; the only fatal error is a missing PROCEDURE DIVISION.
LegacyAst parse_legacy(const std::string& source_text, const std::string& file = "source");

struct CallEdge {
    std::string from;
    std::string to;
    enum class Kind { Perform, Call } kind = Kind::Perform;
};

struct StructureMap {
    std::vector<std::string> entry_points; // no incoming perform edges, source order
    std::vector<CallEdge> call_graph;
    std::vector<std::string> external_deps; // unresolved CALL targets
};

StructureMap extract_structure(const LegacyAst& ast);

} // namespace modernize::cobol
