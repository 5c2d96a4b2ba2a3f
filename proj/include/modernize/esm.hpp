#pragma once

#include "modernize/bsg.hpp"
#include "modernize/predicate.hpp"

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace modernize::esm {

struct ValidationCheck {
    std::string text;
    pred::Predicate predicate;
    std::string error_class;

    bool operator==(const ValidationCheck& o) const {
        return text == o.text && error_class == o.error_class;
    }
};

/// One endpoint effect. Either a (possibly guarded) single assignment, or
/// a bounded loop re-running its body until a condition holds — the
/// executable form of a collapsed legacy loop.
struct Effect {
    std::string target;
    std::string guard_text;
    pred::Predicate guard;
    std::string expression_text;
    pred::ExprPtr expression;

    bool is_loop = false;
    std::string until_text;
    pred::Predicate until;
    std::vector<Effect> body; // simple effects only

    bool operator==(const Effect& o) const {
        return target == o.target && guard_text == o.guard_text &&
               expression_text == o.expression_text && is_loop == o.is_loop &&
               until_text == o.until_text && body == o.body;
    }
};

struct Assertion {
    std::string text;
    pred::Predicate predicate;

    bool operator==(const Assertion& o) const { return text == o.text; }
};

struct ErrorResponse {
    int code = 422;
    std::string message_template;

    bool operator==(const ErrorResponse&) const = default;
};

struct Endpoint {
    std::string id; // equals the BSG node id
    std::string input_model;
    std::map<std::string, bsg::DataType> inputs;
    std::map<std::string, bsg::DataType> outputs;
    std::vector<ValidationCheck> validations;
    std::vector<Effect> effects;
    std::vector<Assertion> assertions;
    std::map<std::string, ErrorResponse> error_responses;
    std::vector<std::string> unenforced; // prose clauses surfaced, never run

    bool operator==(const Endpoint&) const = default;
};

struct DataModel {
    std::string name;
    std::map<std::string, bsg::DataType> fields;

    bool operator==(const DataModel&) const = default;
};

struct Flow {
    std::string id;
    std::vector<bsg::FlowStep> steps;
};

struct ExecutableServiceModel {
    std::vector<Endpoint> endpoints;
    std::vector<DataModel> data_models;
    std::vector<Flow> flows;

    const Endpoint* find(const std::string& id) const;
    const Flow* find_flow(const std::string& id) const;
};

struct RunManifest {
    std::string mode = "stdio"; // "stdio" | "port"
    std::vector<std::string> command;
    int port = 0;
};

struct ModernizedServicePackage {
    enum class Variant { Esm, ExternalSources } variant = Variant::Esm;
    std::optional<ExecutableServiceModel> esm;
    std::vector<std::pair<std::string, std::string>> source_files;
    std::optional<RunManifest> run_manifest;
    std::map<std::string, std::string> endpoint_map; // node id -> locator
    int iteration_tag = 0;
    std::string correction_prompt; // provider-path feedback artifact
};

// ---------------------------------------------------------------------------
// Interpreter surface
// ---------------------------------------------------------------------------

enum class Status { Ok, Rejected, ContractViolation };
enum class RejectReason { None, TypeMismatch, PredicateFalse, PredicateUnknown };

const char* status_name(Status s);
const char* reject_reason_name(RejectReason r);

struct TraceEntry {
    std::string phase; // "type", "validation", "effect", "assertion"
    std::string text;
    pred::TriState result = pred::TriState::Unknown;
};

struct Response {
    Status status = Status::Ok;
    std::string error_class;
    RejectReason reason = RejectReason::None;
    std::string violated_clause;
    pred::Environment outputs;
    std::vector<TraceEntry> trace;
};

inline constexpr const char* kTypeMismatchClass = "TYPE_MISMATCH";
inline constexpr const char* kFallbackErrorClass = "PRECONDITION";

/// Validation checks a node implies, in clause order, with error classes
/// resolved (clause class, then node error class, then the fallback).
/// Shared between the transformer and the test generator so expected and
/// implemented behavior both derive from the specification graph.
std::vector<ValidationCheck> node_validation_checks(const bsg::OperationNode& node);

/// Does a value conform to a declared field type? Null never conforms
/// (required typed fields), integers conform to decimal fields.
bool value_conforms(const pred::Value& v, const bsg::DataType& t);

/// Principle 1-4 realization: endpoint per node, contracts as validations
/// and assertions, shared data models, flows mirroring the edge structure.
ModernizedServicePackage transform(const bsg::Bsg& graph);

/// Pure single-endpoint execution: type gate, validations (first FALSE or
/// UNKNOWN rejects, UNKNOWN distinguished), effects in order, assertions
/// last. Throws UNKNOWN_ENDPOINT for unknown ids.
Response interpret(const ExecutableServiceModel& model, const std::string& endpoint_id,
                   const pred::Environment& request);

/// Execute a flow end to end, threading outputs into the environment.
/// Steps entered via an error edge run only after a rejection; other steps
/// run while the chain is OK. `reverse_parallel` flips the execution order
/// inside parallel groups (the result must not change).
struct FlowResult {
    pred::Environment final_env;
    std::vector<std::pair<std::string, Status>> step_status;
};
FlowResult execute_flow(const ExecutableServiceModel& model, const Flow& flow,
                        const pred::Environment& initial, bool reverse_parallel = false);

// ---------------------------------------------------------------------------
// Fault injection & feedback
// ---------------------------------------------------------------------------

struct FaultSpec {
    enum class Kind {
        PointConstant,
        PointConditionDrop,
        StructuralDropEndpoint,
        StructuralUnwireFlow,
    } kind = Kind::PointConstant;
    std::string target;      // node/endpoint id
    std::int64_t delta = 1;  // PointConstant
    int occurrence = 0;      // which numeric literal (0-based)
    int index = 0;           // which validation to drop
};

/// Apply one fault. PointConstant perturbs the occurrence-th numeric
/// literal across the endpoint's validations then effects; faults on
/// missing targets throw FAULT_TARGET.
ExecutableServiceModel inject_fault(const ExecutableServiceModel& model,
                                    const FaultSpec& fault);

/// Node-scoped regeneration: endpoints named in `targeted_nodes` that are
/// still present are re-derived from the graph; endpoints that are absent
/// (structurally dropped) are left absent — targeted feedback repairs
/// point divergences, it does not rebuild missing structure. Flows are
/// not rewired. The external variant only records a correction prompt.
ModernizedServicePackage apply_feedback(const bsg::Bsg& graph,
                                        const ModernizedServicePackage& package,
                                        const std::set<std::string>& targeted_nodes,
                                        const std::string& correction_text = "");

nlohmann::json package_to_json(const ModernizedServicePackage& package);
ModernizedServicePackage package_from_json(const nlohmann::json& j);
std::string serialize_package(const ModernizedServicePackage& package);
ModernizedServicePackage deserialize_package(const std::string& document);

} // namespace modernize::esm
