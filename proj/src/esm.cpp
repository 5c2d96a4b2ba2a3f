#include "modernize/esm.hpp"

#include "modernize/artifact.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <functional>

namespace modernize::esm {

using bsg::Bsg;
using bsg::ContractClause;
using bsg::DataType;
using bsg::OperationNode;
using pred::BinOp;
using pred::Environment;
using pred::Expr;
using pred::ExprPtr;
using pred::TriState;
using pred::Value;

const char* status_name(Status s) {
    switch (s) {
        case Status::Ok: return "OK";
        case Status::Rejected: return "REJECTED";
        case Status::ContractViolation: return "CONTRACT_VIOLATION";
    }
    return "?";
}

const char* reject_reason_name(RejectReason r) {
    switch (r) {
        case RejectReason::None: return "none";
        case RejectReason::TypeMismatch: return "type_mismatch";
        case RejectReason::PredicateFalse: return "predicate_false";
        case RejectReason::PredicateUnknown: return "predicate_unknown";
    }
    return "?";
}

const Endpoint* ExecutableServiceModel::find(const std::string& id) const {
    for (const auto& e : endpoints) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

const Flow* ExecutableServiceModel::find_flow(const std::string& id) const {
    for (const auto& f : flows) {
        if (f.id == id) return &f;
    }
    return nullptr;
}

std::vector<ValidationCheck> node_validation_checks(const OperationNode& node) {
    std::vector<ValidationCheck> checks;
    for (const auto& clause : node.preconditions) {
        if (!clause.checkable()) continue;
        ValidationCheck check;
        check.text = clause.text;
        check.predicate = *clause.predicate;
        if (clause.error_class) {
            check.error_class = *clause.error_class;
        } else if (node.error_behavior) {
            check.error_class = node.error_behavior->error_class;
        } else {
            check.error_class = kFallbackErrorClass;
        }
        checks.push_back(std::move(check));
    }
    return checks;
}

bool value_conforms(const Value& v, const DataType& t) {
    if (v.is_null()) return false;
    switch (t.kind) {
        case DataType::Kind::Integer: return v.is_int();
        case DataType::Kind::Decimal: return v.is_numeric();
        case DataType::Kind::String: return v.is_string();
        case DataType::Kind::Boolean: return v.is_bool();
        case DataType::Kind::Date: return v.is_string();
        case DataType::Kind::EnumOf: {
            if (!v.is_string()) return false;
            return std::find(t.enum_values.begin(), t.enum_values.end(), v.as_string()) !=
                   t.enum_values.end();
        }
        case DataType::Kind::ListOf: {
            if (!v.is_list()) return false;
            if (!t.element) return true;
            for (const auto& e : v.as_list()) {
                if (!value_conforms(e, *t.element)) return false;
            }
            return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// transform
// ---------------------------------------------------------------------------

namespace {

void flatten_or(const ExprPtr& e, std::vector<ExprPtr>& out) {
    if (e && e->kind == Expr::Kind::Binary && e->op == BinOp::Or) {
        flatten_or(e->lhs, out);
        flatten_or(e->rhs, out);
    } else if (e) {
        out.push_back(e);
    }
}

ExprPtr negate_simplified(const ExprPtr& e);

ExprPtr or_chain(const std::vector<ExprPtr>& parts) {
    ExprPtr out;
    for (const auto& p : parts) {
        out = out ? Expr::make_binary(BinOp::Or, out, p) : p;
    }
    return out;
}

ExprPtr negate_simplified(const ExprPtr& e) {
    // local negation pushdown (mirror of the analyzer's simplifier)
    if (!e) return e;
    if (e->kind == Expr::Kind::Not) return e->lhs;
    if (e->kind == Expr::Kind::Binary) {
        switch (e->op) {
            case BinOp::Eq: return Expr::make_binary(BinOp::Ne, e->lhs, e->rhs);
            case BinOp::Ne: return Expr::make_binary(BinOp::Eq, e->lhs, e->rhs);
            case BinOp::Lt: return Expr::make_binary(BinOp::Ge, e->lhs, e->rhs);
            case BinOp::Le: return Expr::make_binary(BinOp::Gt, e->lhs, e->rhs);
            case BinOp::Gt: return Expr::make_binary(BinOp::Le, e->lhs, e->rhs);
            case BinOp::Ge: return Expr::make_binary(BinOp::Lt, e->lhs, e->rhs);
            case BinOp::And:
                return Expr::make_binary(BinOp::Or, negate_simplified(e->lhs),
                                         negate_simplified(e->rhs));
            case BinOp::Or:
                return Expr::make_binary(BinOp::And, negate_simplified(e->lhs),
                                         negate_simplified(e->rhs));
            default: break;
        }
    }
    return Expr::make_not(e);
}

/// Decompose a postcondition clause into an effect when it has the shape
/// `out == expr` or `g1 or ... or out == expr` with `out` a node output.
std::optional<Effect> effect_from_clause(const ContractClause& clause,
                                         const OperationNode& node) {
    if (!clause.checkable()) return std::nullopt;
    std::vector<ExprPtr> disjuncts;
    flatten_or(clause.predicate->root(), disjuncts);
    if (disjuncts.empty()) return std::nullopt;
    const ExprPtr last = disjuncts.back();
    if (last->kind != Expr::Kind::Binary || last->op != BinOp::Eq) return std::nullopt;
    if (last->lhs->kind != Expr::Kind::Ident) return std::nullopt;
    const std::string& target = last->lhs->ident;
    if (!node.outputs.count(target)) return std::nullopt;

    Effect effect;
    effect.target = target;
    effect.expression = last->rhs;
    effect.expression_text = pred::Predicate(last->rhs).render();
    if (disjuncts.size() > 1) {
        disjuncts.pop_back();
        ExprPtr guard = negate_simplified(or_chain(disjuncts));
        effect.guard = pred::Predicate(guard);
        effect.guard_text = effect.guard.render();
    }
    return effect;
}

/// Base field of a renamed output: new_balance -> balance (when the node
/// reads `balance`); used for loop write-back.
std::optional<std::string> writeback_base(const std::string& target,
                                          const OperationNode& node) {
    if (!starts_with(target, "new_")) return std::nullopt;
    std::string base = target.substr(4);
    if (node.inputs.count(base)) return base;
    return std::nullopt;
}

Endpoint endpoint_for_node(const OperationNode& node) {
    Endpoint ep;
    ep.id = node.id;
    ep.inputs = node.inputs;
    ep.outputs = node.outputs;
    ep.validations = node_validation_checks(node);
    for (const auto& clause : node.preconditions) {
        if (!clause.checkable()) ep.unenforced.push_back(clause.text);
    }

    // First pass: assertion-only checkable clauses (loop exit conditions).
    std::vector<const ContractClause*> loop_clauses;
    for (const auto& clause : node.postconditions) {
        if (!clause.checkable()) {
            ep.unenforced.push_back(clause.text);
            continue;
        }
        Assertion a;
        a.text = clause.text;
        a.predicate = *clause.predicate;
        ep.assertions.push_back(std::move(a));
        if (!effect_from_clause(clause, node)) loop_clauses.push_back(&clause);
    }

    std::vector<Effect> simple;
    for (const auto& clause : node.postconditions) {
        if (auto effect = effect_from_clause(clause, node)) simple.push_back(*effect);
    }

    if (!loop_clauses.empty()) {
        // A checkable postcondition that is not an assignment shape marks a
        // collapsed loop: effects writing its fields repeat until it holds.
        const ContractClause& until = *loop_clauses.front();
        auto fields = pred::free_identifiers(*until.predicate);
        Effect loop;
        loop.is_loop = true;
        loop.until = *until.predicate;
        loop.until_text = until.text;
        std::vector<Effect> rest;
        for (auto& e : simple) {
            if (fields.count(e.target)) loop.body.push_back(std::move(e));
            else rest.push_back(std::move(e));
        }
        if (!loop.body.empty()) {
            rest.push_back(std::move(loop));
            simple = std::move(rest);
        }
    }
    ep.effects = std::move(simple);

    for (const auto& check : ep.validations) {
        if (!ep.error_responses.count(check.error_class)) {
            ep.error_responses[check.error_class] = {
                422, "reject with " + check.error_class + " when not (" + check.text + ")"};
        }
    }
    ep.error_responses[kTypeMismatchClass] = {
        422, "request fields do not conform to " + node.name + "'s input model"};
    return ep;
}

} // namespace

ModernizedServicePackage transform(const Bsg& graph) {
    ModernizedServicePackage package;
    package.variant = ModernizedServicePackage::Variant::Esm;
    ExecutableServiceModel model;

    // Principle 1: endpoint-per-node bijection (sorted for determinism).
    std::vector<const OperationNode*> nodes;
    for (const auto& n : graph.nodes) nodes.push_back(&n);
    std::sort(nodes.begin(), nodes.end(),
              [](const OperationNode* a, const OperationNode* b) { return a->id < b->id; });

    // Principle 3: aggregate field types; conflicts are a transform error.
    std::map<std::string, DataType> merged;
    for (const auto* n : nodes) {
        for (const auto& [f, t] : n->inputs) {
            auto it = merged.find(f);
            if (it != merged.end() && !(it->second == t)) {
                throw Error("TYPE_CONFLICT", "field " + f +
                                                 " carries conflicting types across nodes: " +
                                                 it->second.str() + " vs " + t.str());
            }
            merged.emplace(f, t);
        }
    }

    std::map<std::string, std::string> signature_to_model;
    for (const auto* n : nodes) {
        Endpoint ep = endpoint_for_node(*n);
        std::string signature;
        for (const auto& [f, t] : ep.inputs) signature += f + ":" + t.str() + ";";
        auto it = signature_to_model.find(signature);
        if (it == signature_to_model.end()) {
            DataModel dm;
            dm.name = n->name + "Request";
            dm.fields = ep.inputs;
            model.data_models.push_back(dm);
            it = signature_to_model.emplace(signature, dm.name).first;
        }
        ep.input_model = it->second;
        package.endpoint_map[n->id] = "esm:" + n->id;
        model.endpoints.push_back(std::move(ep));
    }

    // Principle 4: flows mirror the edge structure.
    for (const auto& plan : bsg::enumerate_flows(graph)) {
        model.flows.push_back({plan.id, plan.steps});
    }

    package.esm = std::move(model);
    return package;
}

// ---------------------------------------------------------------------------
// interpret
// ---------------------------------------------------------------------------

namespace {

void apply_simple_effect(const Effect& e, Environment& env, std::vector<TraceEntry>& trace) {
    if (!e.guard_text.empty()) {
        TriState g = pred::evaluate(e.guard, env);
        trace.push_back({"effect", "guard " + e.guard_text, g});
        if (g != TriState::True) return;
    }
    auto value = pred::evaluate_expr(e.expression, env);
    if (value) {
        env.bind(e.target, *value);
        trace.push_back({"effect", e.target + " := " + e.expression_text, TriState::True});
    } else {
        trace.push_back({"effect", e.target + " := " + e.expression_text + " (unbound)",
                         TriState::Unknown});
    }
}

} // namespace

Response interpret(const ExecutableServiceModel& model, const std::string& endpoint_id,
                   const Environment& request) {
    const Endpoint* ep = model.find(endpoint_id);
    if (!ep) {
        throw Error("UNKNOWN_ENDPOINT", "no endpoint " + endpoint_id);
    }
    Response resp;

    // input-model gate: required, typed, non-null
    for (const auto& [field, type] : ep->inputs) {
        const Value* v = request.lookup(field);
        bool ok = v && value_conforms(*v, type);
        resp.trace.push_back({"type", field + " : " + type.str(),
                              ok ? TriState::True : TriState::False});
        if (!ok) {
            resp.status = Status::Rejected;
            resp.error_class = kTypeMismatchClass;
            resp.reason = RejectReason::TypeMismatch;
            resp.violated_clause = field;
            return resp;
        }
    }

    Environment env = request;
    for (const auto& check : ep->validations) {
        TriState t = pred::evaluate(check.predicate, env);
        resp.trace.push_back({"validation", check.text, t});
        if (t != TriState::True) {
            resp.status = Status::Rejected;
            resp.error_class = check.error_class;
            resp.reason = t == TriState::False ? RejectReason::PredicateFalse
                                               : RejectReason::PredicateUnknown;
            resp.violated_clause = check.text;
            return resp;
        }
    }

    for (const auto& e : ep->effects) {
        if (!e.is_loop) {
            apply_simple_effect(e, env, resp.trace);
            continue;
        }
        constexpr int kLoopCap = 10000;
        int iterations = 0;
        while (iterations < kLoopCap) {
            ++iterations;
            for (const auto& body : e.body) apply_simple_effect(body, env, resp.trace);
            TriState done = pred::evaluate(e.until, env);
            if (done == TriState::True) break;
            if (done == TriState::Unknown) break; // assertion will surface it
            // write renamed results back so the next iteration advances
            bool advanced = false;
            for (const auto& body : e.body) {
                if (starts_with(body.target, "new_")) {
                    std::string base = body.target.substr(4);
                    const Value* v = env.lookup(body.target);
                    if (v) {
                        env.bind(base, *v);
                        advanced = true;
                    }
                }
            }
            if (!advanced) break; // nothing feeds back; retrying cannot change
        }
        resp.trace.push_back({"effect",
                              "loop until " + e.until_text + " (" +
                                  std::to_string(iterations) + " iterations)",
                              TriState::True});
    }

    for (const auto& a : ep->assertions) {
        TriState t = pred::evaluate(a.predicate, env);
        resp.trace.push_back({"assertion", a.text, t});
        if (t != TriState::True) {
            resp.status = Status::ContractViolation;
            resp.violated_clause = a.text;
            return resp;
        }
    }

    for (const auto& e : ep->effects) {
        auto copy_target = [&](const Effect& eff) {
            const Value* v = env.lookup(eff.target);
            if (v) resp.outputs.bind(eff.target, *v);
        };
        if (e.is_loop) {
            for (const auto& b : e.body) copy_target(b);
        } else {
            copy_target(e);
        }
    }
    resp.status = Status::Ok;
    return resp;
}

FlowResult execute_flow(const ExecutableServiceModel& model, const Flow& flow,
                        const Environment& initial, bool reverse_parallel) {
    FlowResult result;
    Environment env = initial;
    Status last = Status::Ok;

    std::size_t i = 0;
    while (i < flow.steps.size()) {
        // group consecutive steps of one parallel group
        std::size_t j = i;
        int group = flow.steps[i].parallel_group;
        if (group >= 0) {
            while (j < flow.steps.size() && flow.steps[j].parallel_group == group) ++j;
        } else {
            j = i + 1;
        }
        std::vector<std::size_t> order;
        for (std::size_t k = i; k < j; ++k) order.push_back(k);
        if (reverse_parallel && group >= 0) std::reverse(order.begin(), order.end());

        Environment merged_outputs;
        for (std::size_t k : order) {
            const bsg::FlowStep& step = flow.steps[k];
            bool error_entry = step.entering_label == bsg::EdgeLabel::ErrorEdge;
            bool runnable = error_entry ? last == Status::Rejected : last == Status::Ok;
            if (!runnable) {
                result.step_status.push_back({step.node_id, last});
                continue;
            }
            if (step.guard && !error_entry) {
                if (pred::evaluate(*step.guard, env) != pred::TriState::True) {
                    result.step_status.push_back({step.node_id, Status::Ok});
                    continue; // guard not taken; skip the branch step
                }
            }
            Response r = interpret(model, step.node_id, env);
            result.step_status.push_back({step.node_id, r.status});
            if (r.status == Status::Ok) {
                if (group >= 0) {
                    // parallel semantics: fan-out reads the same snapshot,
                    // outputs join afterwards
                    merged_outputs = merged_outputs.merged(r.outputs);
                } else {
                    env = env.merged(r.outputs);
                }
                if (error_entry) last = Status::Ok; // handler recovers the chain
            } else {
                last = r.status;
            }
        }
        if (group >= 0) env = env.merged(merged_outputs);
        i = j;
    }
    result.final_env = env;
    return result;
}

// ---------------------------------------------------------------------------
// fault injection
// ---------------------------------------------------------------------------

namespace {

ExprPtr perturb_literal(const ExprPtr& e, int& remaining, std::int64_t delta, bool& done) {
    if (!e || done) return e;
    if (e->kind == Expr::Kind::Literal) {
        const Value& v = e->literal;
        if (v.is_int() || v.is_decimal()) {
            if (remaining == 0) {
                done = true;
                if (v.is_int()) return Expr::make_literal(Value(v.as_int() + delta));
                return Expr::make_literal(Value(pred::Decimal::from_units(
                    v.as_decimal().units() + delta * pred::Decimal::kScale)));
            }
            --remaining;
        }
        return e;
    }
    if (e->kind == Expr::Kind::Ident) return e;
    ExprPtr lhs = perturb_literal(e->lhs, remaining, delta, done);
    ExprPtr rhs = e->rhs ? perturb_literal(e->rhs, remaining, delta, done) : nullptr;
    if (lhs == e->lhs && rhs == e->rhs) return e;
    switch (e->kind) {
        case Expr::Kind::Not: return Expr::make_not(lhs);
        case Expr::Kind::Call: return Expr::make_call(e->fn, lhs);
        case Expr::Kind::Binary: return Expr::make_binary(e->op, lhs, rhs);
        default: return e;
    }
}

} // namespace

ExecutableServiceModel inject_fault(const ExecutableServiceModel& model,
                                    const FaultSpec& fault) {
    ExecutableServiceModel out = model;
    if (fault.kind == FaultSpec::Kind::StructuralUnwireFlow) {
        std::vector<Flow> flows;
        for (const auto& f : out.flows) {
            bool touches = fault.target.empty();
            for (const auto& s : f.steps) {
                if (s.node_id == fault.target) touches = true;
            }
            if (!touches || f.steps.size() <= 1) {
                flows.push_back(f);
                continue;
            }
            int n = 0;
            for (const auto& s : f.steps) {
                Flow single;
                single.id = f.id + "-u" + std::to_string(++n);
                bsg::FlowStep step = s;
                step.entering_label = bsg::EdgeLabel::Sequence;
                step.guard.reset();
                step.guard_text.clear();
                step.parallel_group = -1;
                single.steps.push_back(step);
                flows.push_back(std::move(single));
            }
        }
        out.flows = std::move(flows);
        return out;
    }

    if (fault.kind == FaultSpec::Kind::StructuralDropEndpoint) {
        bool found = false;
        std::vector<Endpoint> endpoints;
        for (auto& e : out.endpoints) {
            if (e.id == fault.target) {
                found = true;
                continue;
            }
            endpoints.push_back(std::move(e));
        }
        if (!found) throw Error("FAULT_TARGET", "no endpoint " + fault.target);
        out.endpoints = std::move(endpoints);
        for (auto& f : out.flows) {
            std::vector<bsg::FlowStep> steps;
            for (auto& s : f.steps) {
                if (s.node_id != fault.target) steps.push_back(s);
            }
            f.steps = std::move(steps);
        }
        return out;
    }

    Endpoint* target = nullptr;
    for (auto& e : out.endpoints) {
        if (e.id == fault.target) target = &e;
    }
    if (!target) throw Error("FAULT_TARGET", "no endpoint " + fault.target);

    if (fault.kind == FaultSpec::Kind::PointConditionDrop) {
        if (target->validations.empty()) {
            throw Error("FAULT_TARGET", "endpoint " + fault.target + " has no validations");
        }
        std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(fault.index),
                                                target->validations.size() - 1);
        target->validations.erase(target->validations.begin() +
                                  static_cast<std::ptrdiff_t>(idx));
        return out;
    }

    // PointConstant: occurrence-th numeric literal over validations then effects
    int remaining = fault.occurrence;
    bool done = false;
    for (auto& check : target->validations) {
        ExprPtr mutated = perturb_literal(check.predicate.root(), remaining, fault.delta, done);
        if (done) {
            check.predicate = pred::Predicate(mutated);
            check.text = check.predicate.render();
            return out;
        }
    }
    std::function<bool(Effect&)> mutate_effect = [&](Effect& e) -> bool {
        if (e.is_loop) {
            for (auto& b : e.body) {
                if (mutate_effect(b)) return true;
            }
            ExprPtr mutated = perturb_literal(e.until.root(), remaining, fault.delta, done);
            if (done) {
                e.until = pred::Predicate(mutated);
                e.until_text = e.until.render();
                return true;
            }
            return false;
        }
        if (!e.guard_text.empty()) {
            ExprPtr mutated = perturb_literal(e.guard.root(), remaining, fault.delta, done);
            if (done) {
                e.guard = pred::Predicate(mutated);
                e.guard_text = e.guard.render();
                return true;
            }
        }
        ExprPtr mutated = perturb_literal(e.expression, remaining, fault.delta, done);
        if (done) {
            e.expression = mutated;
            e.expression_text = pred::Predicate(mutated).render();
            return true;
        }
        return false;
    };
    for (auto& e : target->effects) {
        if (mutate_effect(e)) return out;
    }
    throw Error("FAULT_TARGET", "endpoint " + fault.target + " has no numeric literal to perturb");
}

ModernizedServicePackage apply_feedback(const Bsg& graph,
                                        const ModernizedServicePackage& package,
                                        const std::set<std::string>& targeted_nodes,
                                        const std::string& correction_text) {
    for (const auto& id : targeted_nodes) {
        bool known = graph.find_node(id) != nullptr;
        bool is_flow = starts_with(id, "flow-");
        if (!known && !is_flow) {
            throw Error("UNKNOWN_FEEDBACK_TARGET", "feedback names unknown endpoint " + id);
        }
    }
    ModernizedServicePackage out = package;
    out.iteration_tag = package.iteration_tag + 1;
    if (out.variant == ModernizedServicePackage::Variant::ExternalSources) {
        out.correction_prompt = correction_text;
        return out;
    }
    if (!out.esm) return out;

    for (auto& ep : out.esm->endpoints) {
        if (!targeted_nodes.count(ep.id)) continue;
        const OperationNode* node = graph.find_node(ep.id);
        if (!node) continue;
        std::string model_name = ep.input_model;
        ep = endpoint_for_node(*node);
        ep.input_model = model_name;
    }
    return out;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

json datatype_json(const DataType& t);

json type_map_json(const std::map<std::string, DataType>& fields) {
    json out = json::object();
    for (const auto& [f, t] : fields) out[f] = datatype_json(t);
    return out;
}

json datatype_json(const DataType& t) {
    switch (t.kind) {
        case DataType::Kind::Integer: return "integer";
        case DataType::Kind::Decimal: return "decimal";
        case DataType::Kind::String: return "string";
        case DataType::Kind::Boolean: return "boolean";
        case DataType::Kind::Date: return "date";
        case DataType::Kind::EnumOf: return json{{"enum", t.enum_values}};
        case DataType::Kind::ListOf:
            return json{{"list", t.element ? datatype_json(*t.element) : json("string")}};
    }
    return "string";
}

DataType datatype_from(const json& j) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "integer") return DataType::integer();
        if (s == "decimal") return DataType::decimal();
        if (s == "boolean") return DataType::boolean();
        if (s == "date") return DataType::date();
        return DataType::string_type();
    }
    if (j.contains("enum")) return DataType::enum_of(j.at("enum").get<std::vector<std::string>>());
    if (j.contains("list")) return DataType::list_of(datatype_from(j.at("list")));
    return DataType::string_type();
}

std::map<std::string, DataType> type_map_from(const json& j) {
    std::map<std::string, DataType> out;
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = datatype_from(it.value());
    return out;
}

json effect_json(const Effect& e) {
    if (e.is_loop) {
        json body = json::array();
        for (const auto& b : e.body) body.push_back(effect_json(b));
        return {{"body", body}, {"loop_until", e.until_text}};
    }
    json out{{"expression", e.expression_text}, {"target", e.target}};
    if (!e.guard_text.empty()) out["guard"] = e.guard_text;
    return out;
}

Effect effect_from(const json& j) {
    Effect e;
    if (j.contains("loop_until")) {
        e.is_loop = true;
        e.until_text = j.at("loop_until").get<std::string>();
        e.until = pred::parse_predicate(e.until_text);
        for (const auto& b : j.at("body")) e.body.push_back(effect_from(b));
        return e;
    }
    e.target = j.at("target").get<std::string>();
    e.expression_text = j.at("expression").get<std::string>();
    e.expression = pred::parse_predicate(e.expression_text).root();
    if (j.contains("guard")) {
        e.guard_text = j.at("guard").get<std::string>();
        e.guard = pred::parse_predicate(e.guard_text);
    }
    return e;
}

json flow_step_json(const bsg::FlowStep& s) {
    json out{{"endpoint", s.node_id}, {"label", bsg::edge_label_name(s.entering_label)}};
    if (!s.guard_text.empty()) out["guard"] = s.guard_text;
    if (s.parallel_group >= 0) out["parallel_group"] = s.parallel_group;
    return out;
}

bsg::FlowStep flow_step_from(const json& j) {
    bsg::FlowStep s;
    s.node_id = j.at("endpoint").get<std::string>();
    s.entering_label = bsg::edge_label_from(j.at("label").get<std::string>());
    if (j.contains("guard")) {
        s.guard_text = j.at("guard").get<std::string>();
        s.guard = pred::try_parse_predicate(s.guard_text);
    }
    s.parallel_group = j.value("parallel_group", -1);
    return s;
}

} // namespace

nlohmann::json package_to_json(const ModernizedServicePackage& package) {
    json out;
    out["iteration_tag"] = package.iteration_tag;
    json epmap = json::object();
    for (const auto& [k, v] : package.endpoint_map) epmap[k] = v;
    out["endpoint_map"] = epmap;

    if (package.variant == ModernizedServicePackage::Variant::Esm) {
        out["variant"] = "esm";
        const auto& model = *package.esm;
        json endpoints = json::array();
        for (const auto& ep : model.endpoints) {
            json vals = json::array();
            for (const auto& v : ep.validations) {
                vals.push_back({{"error_class", v.error_class}, {"text", v.text}});
            }
            json effects = json::array();
            for (const auto& e : ep.effects) effects.push_back(effect_json(e));
            json asserts = json::array();
            for (const auto& a : ep.assertions) asserts.push_back(a.text);
            json errors = json::object();
            for (const auto& [klass, r] : ep.error_responses) {
                errors[klass] = {{"code", r.code}, {"message", r.message_template}};
            }
            json ej{{"assertions", asserts},
                    {"effects", effects},
                    {"error_responses", errors},
                    {"id", ep.id},
                    {"input_model", ep.input_model},
                    {"inputs", type_map_json(ep.inputs)},
                    {"outputs", type_map_json(ep.outputs)},
                    {"validations", vals}};
            if (!ep.unenforced.empty()) ej["unenforced"] = ep.unenforced;
            endpoints.push_back(std::move(ej));
        }
        json models = json::array();
        for (const auto& m : model.data_models) {
            models.push_back({{"fields", type_map_json(m.fields)}, {"name", m.name}});
        }
        json flows = json::array();
        for (const auto& f : model.flows) {
            json steps = json::array();
            for (const auto& s : f.steps) steps.push_back(flow_step_json(s));
            flows.push_back({{"id", f.id}, {"steps", steps}});
        }
        out["esm"] = {{"data_models", models}, {"endpoints", endpoints}, {"flows", flows}};
    } else {
        out["variant"] = "external_sources";
        json files = json::array();
        for (const auto& [path, text] : package.source_files) {
            files.push_back({{"path", path}, {"text", text}});
        }
        out["source_files"] = files;
        if (package.run_manifest) {
            json m{{"command", package.run_manifest->command},
                   {"mode", package.run_manifest->mode}};
            if (package.run_manifest->port > 0) m["port"] = package.run_manifest->port;
            out["run_manifest"] = m;
        }
        if (!package.correction_prompt.empty()) {
            out["correction_prompt"] = package.correction_prompt;
        }
    }
    return out;
}

ModernizedServicePackage package_from_json(const nlohmann::json& j) {
    ModernizedServicePackage package;
    package.iteration_tag = j.value("iteration_tag", 0);
    if (j.contains("endpoint_map")) {
        for (auto it = j.at("endpoint_map").begin(); it != j.at("endpoint_map").end(); ++it) {
            package.endpoint_map[it.key()] = it.value().get<std::string>();
        }
    }
    std::string variant = j.value("variant", "esm");
    if (variant == "external_sources") {
        package.variant = ModernizedServicePackage::Variant::ExternalSources;
        for (const auto& f : j.value("source_files", json::array())) {
            package.source_files.emplace_back(f.at("path").get<std::string>(),
                                              f.at("text").get<std::string>());
        }
        if (j.contains("run_manifest")) {
            RunManifest m;
            const auto& mj = j.at("run_manifest");
            m.mode = mj.value("mode", "stdio");
            m.command = mj.value("command", std::vector<std::string>{});
            m.port = mj.value("port", 0);
            package.run_manifest = std::move(m);
        }
        package.correction_prompt = j.value("correction_prompt", "");
        return package;
    }

    package.variant = ModernizedServicePackage::Variant::Esm;
    ExecutableServiceModel model;
    const auto& ej = j.at("esm");
    for (const auto& epj : ej.value("endpoints", json::array())) {
        Endpoint ep;
        ep.id = epj.at("id").get<std::string>();
        ep.input_model = epj.value("input_model", "");
        ep.inputs = type_map_from(epj.value("inputs", json::object()));
        ep.outputs = type_map_from(epj.value("outputs", json::object()));
        for (const auto& vj : epj.value("validations", json::array())) {
            ValidationCheck v;
            v.text = vj.at("text").get<std::string>();
            v.error_class = vj.at("error_class").get<std::string>();
            v.predicate = pred::parse_predicate(v.text);
            ep.validations.push_back(std::move(v));
        }
        for (const auto& fj : epj.value("effects", json::array())) {
            ep.effects.push_back(effect_from(fj));
        }
        for (const auto& aj : epj.value("assertions", json::array())) {
            Assertion a;
            a.text = aj.get<std::string>();
            a.predicate = pred::parse_predicate(a.text);
            ep.assertions.push_back(std::move(a));
        }
        if (epj.contains("error_responses")) {
            for (auto it = epj.at("error_responses").begin();
                 it != epj.at("error_responses").end(); ++it) {
                ep.error_responses[it.key()] = {it.value().at("code").get<int>(),
                                                it.value().at("message").get<std::string>()};
            }
        }
        ep.unenforced = epj.value("unenforced", std::vector<std::string>{});
        model.endpoints.push_back(std::move(ep));
    }
    for (const auto& mj : ej.value("data_models", json::array())) {
        DataModel m;
        m.name = mj.at("name").get<std::string>();
        m.fields = type_map_from(mj.value("fields", json::object()));
        model.data_models.push_back(std::move(m));
    }
    for (const auto& fj : ej.value("flows", json::array())) {
        Flow f;
        f.id = fj.at("id").get<std::string>();
        for (const auto& sj : fj.value("steps", json::array())) {
            f.steps.push_back(flow_step_from(sj));
        }
        model.flows.push_back(std::move(f));
    }
    package.esm = std::move(model);
    return package;
}

std::string serialize_package(const ModernizedServicePackage& package) {
    return model::canonical_dump(package_to_json(package));
}

ModernizedServicePackage deserialize_package(const std::string& document) {
    return package_from_json(nlohmann::json::parse(document));
}

} // namespace modernize::esm
