#pragma once

#include "modernize/artifact.hpp"
#include "modernize/predicate.hpp"

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace modernize::bsg {

using model::Confidence;
using model::SourceLocation;

/// Field type attached to operation node inputs/outputs.
struct DataType {
    enum class Kind { Integer, Decimal, String, Boolean, Date, EnumOf, ListOf } kind =
        Kind::String;
    std::vector<std::string> enum_values; // EnumOf
    std::shared_ptr<DataType> element;    // ListOf

    static DataType integer();
    static DataType decimal();
    static DataType string_type();
    static DataType boolean();
    static DataType date();
    static DataType enum_of(std::vector<std::string> values);
    static DataType list_of(DataType element);

    bool operator==(const DataType& other) const;
    std::string str() const;
};

/// One pre/post/invariant clause. Prose-only clauses (text that is not
/// predicate syntax) are retained but flagged non-checkable and are never
/// executed. `error_class` is carried on preconditions derived from
/// rejection branches; `rule_id` tags global-invariant clauses.
struct ContractClause {
    std::string text;
    std::optional<pred::Predicate> predicate; // present iff text parses
    std::optional<std::string> error_class;
    std::optional<std::string> rule_id;

    static ContractClause from_text(const std::string& text);
    bool checkable() const { return predicate.has_value(); }

    bool operator==(const ContractClause& other) const {
        return text == other.text && error_class == other.error_class &&
               rule_id == other.rule_id;
    }
};

struct ErrorBehavior {
    std::string description;
    std::optional<pred::Predicate> trigger;
    std::string trigger_text;
    std::string error_class;

    bool operator==(const ErrorBehavior& other) const {
        return description == other.description && trigger_text == other.trigger_text &&
               error_class == other.error_class;
    }
};

struct OperationNode {
    std::string id;   // "<scenario>/<OperationName>"
    std::string name; // "ValidateDisconnectOrder"
    std::map<std::string, DataType> inputs;
    std::map<std::string, DataType> outputs;
    std::vector<ContractClause> preconditions;
    std::vector<ContractClause> postconditions;
    std::vector<std::string> rule_ids;
    std::optional<ErrorBehavior> error_behavior;
    Confidence confidence = Confidence::High;
    SourceLocation source_location;

    bool operator==(const OperationNode&) const = default;
};

enum class EdgeLabel { Sequence, Conditional, Parallel, ErrorEdge };

const char* edge_label_name(EdgeLabel l);
EdgeLabel edge_label_from(const std::string& name);

struct BsgEdge {
    std::string from;
    std::string to;
    EdgeLabel label = EdgeLabel::Sequence;
    std::optional<pred::Predicate> guard; // conditional / error only
    std::string guard_text;

    bool operator==(const BsgEdge& other) const {
        return from == other.from && to == other.to && label == other.label &&
               guard_text == other.guard_text;
    }
};

struct BsgMetadata {
    std::string scenario_id;
    std::string bri_digest;
    std::string generator;

    bool operator==(const BsgMetadata&) const = default;
};

/// Behavioral specification graph: a DAG of operation nodes with contract
/// clauses, labeled edges, and graph-level invariants.
struct Bsg {
    std::vector<OperationNode> nodes;
    std::vector<BsgEdge> edges;
    std::vector<ContractClause> global_invariants;
    BsgMetadata metadata;

    const OperationNode* find_node(const std::string& id) const;

    bool operator==(const Bsg&) const = default;
};

struct Violation {
    std::string code; // CYCLE, DANGLING_RULE, ...
    std::string location;
    std::string message;

    bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

/// Structural validation. Violations are data, not faults; the report is
/// empty iff all graph invariants hold. Cycle violations name a witness.
ValidationReport validate_bsg(const Bsg& graph, const model::BusinessRuleInventory& bri);

/// Deterministic topological order (lexicographic tie-break). Throws
/// Error("CYCLE", ...) naming a witness cycle when the graph is cyclic.
std::vector<std::string> topo_order(const Bsg& graph);

struct CoverageResult {
    double precision = 0.0;
    double recall = 0.0;
    int gold_total = 0;
    int extracted_total = 0;
    int matched = 0;
    std::vector<std::string> matched_keys;
    std::vector<std::string> missed_gold_keys;
    std::vector<std::string> extra_rule_keys; // extracted rule ids with no gold match
};

struct GoldRuleRef {
    std::string key;
    std::string description;
    model::RuleCategory category = model::RuleCategory::Explicit;
    SourceLocation span;
    std::optional<std::string> match_predicate;
};

/// Table-style precision/recall of extracted rules against gold rules.
/// With a BRI, matching is source-span overlap between the gold span and
/// the extracted rule's location; without one (or when spans are absent)
/// it falls back to exact normalized-description match. matched counts
/// gold rules; precision = matched/extracted, recall = matched/gold, both
/// rounded half-up to one decimal. Empty extraction yields precision 0.0.
CoverageResult rule_coverage(const Bsg& graph, const std::vector<GoldRuleRef>& gold,
                             const model::BusinessRuleInventory* bri = nullptr);

/// Rule ids referenced anywhere in the graph (node rule_ids plus global
/// invariant tags), sorted.
std::vector<std::string> referenced_rule_ids(const Bsg& graph);

nlohmann::json bsg_to_json(const Bsg& graph);
std::string serialize_bsg(const Bsg& graph);
/// Accepts both the canonical graph document and the single-node shorthand
/// ({"operation": ..., "source_rule": ..., "invariants": [...]}).
Bsg deserialize_bsg(const std::string& document);
Bsg bsg_from_json(const nlohmann::json& j);

enum class DiffKind {
    AddedNode,
    RemovedNode,
    ChangedNode,
    AddedEdge,
    RemovedEdge,
    ChangedEdge,
    AddedInvariant,
    RemovedInvariant,
    ChangedMetadata,
};

struct DiffEntry {
    DiffKind kind;
    std::string key;    // node id, "from->to", or invariant text
    std::string detail; // e.g. which clause changed

    bool operator==(const DiffEntry&) const = default;
};

/// Structural diff; empty iff the graphs are value-equal.
std::vector<DiffEntry> diff_bsg(const Bsg& a, const Bsg& b);
std::string render_diff(const std::vector<DiffEntry>& diff);

/// Human-readable rendering and DOT export for inspection.
std::string render_bsg_text(const Bsg& graph);
std::string render_bsg_dot(const Bsg& graph);

/// One planned execution flow through the graph: conditional branches
/// split flows apart, parallel fan-outs stay inside a single flow as an
/// unordered group that joins before its successors.
struct FlowStep {
    std::string node_id;
    EdgeLabel entering_label = EdgeLabel::Sequence; // label of the edge taken
    std::optional<pred::Predicate> guard;
    std::string guard_text;
    int parallel_group = -1; // >= 0 groups order-independent steps
};

struct FlowPlan {
    std::string id; // "flow-001", deterministic
    std::vector<FlowStep> steps;
    std::set<std::pair<std::string, std::string>> covered_edges;
};

/// Enumerate flows from entry nodes to sinks, lexicographic by node-id
/// sequence, at most `bound` flows but always enough to cover every edge
/// (coverage overrides the bound). Shared by the transformer (service
/// flows) and the validator (trace scripts) so ids line up.
std::vector<FlowPlan> enumerate_flows(const Bsg& graph, int bound = 16);

} // namespace modernize::bsg
