#include "modernize/bsg.hpp"

#include "modernize/digest.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

namespace modernize::bsg {

using nlohmann::json;

// ---------------------------------------------------------------------------
// DataType
// ---------------------------------------------------------------------------

DataType DataType::integer() { return DataType{Kind::Integer, {}, nullptr}; }
DataType DataType::decimal() { return DataType{Kind::Decimal, {}, nullptr}; }
DataType DataType::string_type() { return DataType{Kind::String, {}, nullptr}; }
DataType DataType::boolean() { return DataType{Kind::Boolean, {}, nullptr}; }
DataType DataType::date() { return DataType{Kind::Date, {}, nullptr}; }

DataType DataType::enum_of(std::vector<std::string> values) {
    DataType t;
    t.kind = Kind::EnumOf;
    t.enum_values = std::move(values);
    return t;
}

DataType DataType::list_of(DataType element) {
    DataType t;
    t.kind = Kind::ListOf;
    t.element = std::make_shared<DataType>(std::move(element));
    return t;
}

bool DataType::operator==(const DataType& other) const {
    if (kind != other.kind) return false;
    if (kind == Kind::EnumOf) return enum_values == other.enum_values;
    if (kind == Kind::ListOf) {
        if (!element || !other.element) return element == other.element;
        return *element == *other.element;
    }
    return true;
}

std::string DataType::str() const {
    switch (kind) {
        case Kind::Integer: return "integer";
        case Kind::Decimal: return "decimal";
        case Kind::String: return "string";
        case Kind::Boolean: return "boolean";
        case Kind::Date: return "date";
        case Kind::EnumOf: {
            std::string out = "enum[";
            for (std::size_t i = 0; i < enum_values.size(); ++i) {
                if (i) out += "|";
                out += enum_values[i];
            }
            return out + "]";
        }
        case Kind::ListOf: return "list[" + (element ? element->str() : "?") + "]";
    }
    return "?";
}

namespace {

json datatype_to_json(const DataType& t) {
    switch (t.kind) {
        case DataType::Kind::Integer: return "integer";
        case DataType::Kind::Decimal: return "decimal";
        case DataType::Kind::String: return "string";
        case DataType::Kind::Boolean: return "boolean";
        case DataType::Kind::Date: return "date";
        case DataType::Kind::EnumOf: return json{{"enum", t.enum_values}};
        case DataType::Kind::ListOf:
            return json{{"list", t.element ? datatype_to_json(*t.element) : json("string")}};
    }
    return "string";
}

DataType datatype_from_json(const json& j, const std::string& path) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "integer") return DataType::integer();
        if (s == "decimal") return DataType::decimal();
        if (s == "string") return DataType::string_type();
        if (s == "boolean") return DataType::boolean();
        if (s == "date") return DataType::date();
        throw Error("SCHEMA_VIOLATION", "unknown type '" + s + "' at " + path);
    }
    if (j.is_object()) {
        if (j.contains("enum")) {
            return DataType::enum_of(j.at("enum").get<std::vector<std::string>>());
        }
        if (j.contains("list")) {
            return DataType::list_of(datatype_from_json(j.at("list"), path + ".list"));
        }
    }
    throw Error("SCHEMA_VIOLATION", "malformed type at " + path);
}

} // namespace

ContractClause ContractClause::from_text(const std::string& text) {
    ContractClause c;
    c.text = text;
    c.predicate = pred::try_parse_predicate(text);
    return c;
}

const char* edge_label_name(EdgeLabel l) {
    switch (l) {
        case EdgeLabel::Sequence: return "sequence";
        case EdgeLabel::Conditional: return "conditional";
        case EdgeLabel::Parallel: return "parallel";
        case EdgeLabel::ErrorEdge: return "error";
    }
    return "?";
}

EdgeLabel edge_label_from(const std::string& name) {
    if (name == "sequence") return EdgeLabel::Sequence;
    if (name == "conditional") return EdgeLabel::Conditional;
    if (name == "parallel") return EdgeLabel::Parallel;
    if (name == "error") return EdgeLabel::ErrorEdge;
    throw Error("SCHEMA_VIOLATION", "unknown edge label '" + name + "'");
}

const OperationNode* Bsg::find_node(const std::string& id) const {
    for (const auto& n : nodes) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

/// DFS cycle search returning one witness cycle [a, b, ..., a] if any.
std::optional<std::vector<std::string>> find_cycle(
    const std::vector<std::string>& ids,
    const std::map<std::string, std::vector<std::string>>& adj) {
    enum class Mark { White, Grey, Black };
    std::map<std::string, Mark> mark;
    for (const auto& id : ids) mark[id] = Mark::White;
    std::vector<std::string> stack;
    std::optional<std::vector<std::string>> witness;

    std::function<bool(const std::string&)> dfs = [&](const std::string& u) {
        mark[u] = Mark::Grey;
        stack.push_back(u);
        auto it = adj.find(u);
        if (it != adj.end()) {
            for (const auto& v : it->second) {
                if (!mark.count(v)) continue; // dangling endpoint reported separately
                if (mark[v] == Mark::Grey) {
                    auto pos = std::find(stack.begin(), stack.end(), v);
                    std::vector<std::string> cyc(pos, stack.end());
                    cyc.push_back(v);
                    witness = cyc;
                    return true;
                }
                if (mark[v] == Mark::White && dfs(v)) return true;
            }
        }
        stack.pop_back();
        mark[u] = Mark::Black;
        return false;
    };

    for (const auto& id : ids) {
        if (mark[id] == Mark::White && dfs(id)) return witness;
    }
    return std::nullopt;
}

void check_type(const DataType& t, const std::string& where, ValidationReport& report) {
    if (t.kind == DataType::Kind::EnumOf && t.enum_values.empty()) {
        report.push_back({"EMPTY_ENUM", where, "enum type carries no values"});
    }
    if (t.kind == DataType::Kind::ListOf && t.element) {
        check_type(*t.element, where, report);
    }
}

std::string join_ids(const std::vector<std::string>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ",";
        out += ids[i];
    }
    return out;
}

} // namespace

ValidationReport validate_bsg(const Bsg& graph, const model::BusinessRuleInventory& bri) {
    ValidationReport report;

    std::set<std::string> ids;
    for (const auto& n : graph.nodes) {
        if (!ids.insert(n.id).second) {
            report.push_back({"DUP_NODE_ID", n.id, "node id appears more than once"});
        }
        if (n.name.empty()) {
            report.push_back({"EMPTY_NAME", n.id, "node name is empty"});
        }
        if (n.source_location.line_start < 1 ||
            n.source_location.line_end < n.source_location.line_start) {
            report.push_back({"BAD_LOCATION", n.id, "invalid source line range"});
        }
        for (const auto& [f, t] : n.inputs) check_type(t, n.id + ".inputs." + f, report);
        for (const auto& [f, t] : n.outputs) check_type(t, n.id + ".outputs." + f, report);
        for (const auto& rid : n.rule_ids) {
            if (!bri.find(rid)) {
                report.push_back({"DANGLING_RULE", n.id,
                                  "rule id " + rid + " not present in the inventory"});
            }
        }
    }
    for (const auto& inv : graph.global_invariants) {
        if (inv.rule_id && !bri.find(*inv.rule_id)) {
            report.push_back({"DANGLING_RULE", "global_invariants",
                              "rule id " + *inv.rule_id + " not present in the inventory"});
        }
    }

    std::map<std::string, std::vector<std::string>> adj;
    std::map<std::string, bool> parallel_out, other_out;
    std::set<std::string> has_forward_in;
    for (const auto& e : graph.edges) {
        if (!ids.count(e.from)) {
            report.push_back({"MISSING_ENDPOINT", e.from + "->" + e.to,
                              "edge source does not exist"});
        }
        if (!ids.count(e.to)) {
            report.push_back({"MISSING_ENDPOINT", e.from + "->" + e.to,
                              "edge target does not exist"});
        }
        bool guard_allowed =
            e.label == EdgeLabel::Conditional || e.label == EdgeLabel::ErrorEdge;
        if (!e.guard_text.empty() && !guard_allowed) {
            report.push_back({"BAD_GUARD", e.from + "->" + e.to,
                              "guard permitted only on conditional or error edges"});
        }
        adj[e.from].push_back(e.to);
        if (e.label == EdgeLabel::Parallel) parallel_out[e.from] = true;
        else other_out[e.from] = true;
        if (e.label == EdgeLabel::Sequence || e.label == EdgeLabel::Conditional) {
            has_forward_in.insert(e.to);
        }
    }
    for (const auto& [node_id, has_par] : parallel_out) {
        if (has_par && other_out.count(node_id)) {
            report.push_back({"PARALLEL_MIX", node_id,
                              "parallel edges may not mix with other labels on one node"});
        }
    }

    std::vector<std::string> id_list(ids.begin(), ids.end());
    for (auto& [k, v] : adj) std::sort(v.begin(), v.end());
    if (auto cycle = find_cycle(id_list, adj)) {
        report.push_back({"CYCLE", join_ids(*cycle), "edge relation is cyclic"});
    }

    if (!graph.nodes.empty()) {
        bool any_entry = false;
        for (const auto& n : graph.nodes) {
            if (!has_forward_in.count(n.id)) {
                any_entry = true;
                break;
            }
        }
        if (!any_entry) {
            report.push_back({"NO_ENTRY", "",
                              "no node without incoming sequence/conditional edges"});
        }
    }
    return report;
}

std::vector<std::string> topo_order(const Bsg& graph) {
    std::map<std::string, int> indegree;
    std::map<std::string, std::vector<std::string>> adj;
    std::vector<std::string> ids;
    for (const auto& n : graph.nodes) {
        indegree[n.id];
        ids.push_back(n.id);
    }
    for (const auto& e : graph.edges) {
        if (!indegree.count(e.from) || !indegree.count(e.to)) continue;
        adj[e.from].push_back(e.to);
        ++indegree[e.to];
    }
    std::set<std::string> ready;
    for (const auto& [id, deg] : indegree) {
        if (deg == 0) ready.insert(id);
    }
    std::vector<std::string> order;
    while (!ready.empty()) {
        std::string u = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(u);
        for (const auto& v : adj[u]) {
            if (--indegree[v] == 0) ready.insert(v);
        }
    }
    if (order.size() != ids.size()) {
        for (auto& [k, v] : adj) std::sort(v.begin(), v.end());
        auto cycle = find_cycle(ids, adj);
        throw Error("CYCLE", "graph is cyclic: " + (cycle ? join_ids(*cycle) : ""));
    }
    return order;
}

// ---------------------------------------------------------------------------
// Gold-rule coverage
// ---------------------------------------------------------------------------

std::vector<std::string> referenced_rule_ids(const Bsg& graph) {
    std::set<std::string> ids;
    for (const auto& n : graph.nodes) ids.insert(n.rule_ids.begin(), n.rule_ids.end());
    for (const auto& inv : graph.global_invariants) {
        if (inv.rule_id) ids.insert(*inv.rule_id);
    }
    return {ids.begin(), ids.end()};
}

CoverageResult rule_coverage(const Bsg& graph, const std::vector<GoldRuleRef>& gold,
                             const model::BusinessRuleInventory* bri) {
    std::set<std::string> keys;
    for (const auto& g : gold) {
        if (!keys.insert(g.key).second) {
            throw Error("DUPLICATE_GOLD_KEY", "gold key " + g.key + " appears twice");
        }
    }

    CoverageResult result;
    std::vector<std::string> extracted = referenced_rule_ids(graph);
    result.extracted_total = static_cast<int>(extracted.size());
    result.gold_total = static_cast<int>(gold.size());

    std::set<std::string> clause_texts;
    for (const auto& n : graph.nodes) {
        for (const auto& c : n.preconditions) clause_texts.insert(normalize_text(c.text));
        for (const auto& c : n.postconditions) clause_texts.insert(normalize_text(c.text));
    }
    for (const auto& c : graph.global_invariants) clause_texts.insert(normalize_text(c.text));

    std::set<std::string> matched_extracted;
    for (const auto& g : gold) {
        bool matched = false;
        for (const auto& id : extracted) {
            const model::BusinessRule* rule = bri ? bri->find(id) : nullptr;
            if (rule && rule->location.overlaps(g.span)) {
                matched = true;
                matched_extracted.insert(id);
            } else if (rule &&
                       normalize_text(rule->description) == normalize_text(g.description)) {
                matched = true;
                matched_extracted.insert(id);
            }
        }
        if (!matched && g.match_predicate &&
            clause_texts.count(normalize_text(*g.match_predicate))) {
            matched = true;
        }
        if (matched) {
            ++result.matched;
            result.matched_keys.push_back(g.key);
        } else {
            result.missed_gold_keys.push_back(g.key);
        }
    }
    for (const auto& id : extracted) {
        if (!matched_extracted.count(id)) result.extra_rule_keys.push_back(id);
    }

    result.precision = result.extracted_total == 0
                           ? 0.0
                           : round1(100.0 * result.matched / result.extracted_total);
    result.recall =
        result.gold_total == 0 ? 0.0 : round1(100.0 * result.matched / result.gold_total);
    return result;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

json clause_to_json(const ContractClause& c) {
    json j{{"text", c.text}};
    if (c.error_class) j["error_class"] = *c.error_class;
    if (c.rule_id) j["rule_id"] = *c.rule_id;
    return j;
}

ContractClause clause_from_json(const json& j, const std::string& path) {
    if (j.is_string()) return ContractClause::from_text(j.get<std::string>());
    if (!j.is_object() || !j.contains("text")) {
        throw Error("SCHEMA_VIOLATION", "malformed clause at " + path);
    }
    ContractClause c = ContractClause::from_text(j.at("text").get<std::string>());
    if (j.contains("error_class")) c.error_class = j.at("error_class").get<std::string>();
    if (j.contains("rule_id")) c.rule_id = j.at("rule_id").get<std::string>();
    return c;
}

const json& require(const json& j, const char* field, const std::string& path) {
    if (!j.contains(field)) {
        throw Error("SCHEMA_VIOLATION", "missing field at " + path + "." + field);
    }
    return j.at(field);
}

json node_to_json(const OperationNode& n) {
    json inputs = json::object();
    for (const auto& [f, t] : n.inputs) inputs[f] = datatype_to_json(t);
    json outputs = json::object();
    for (const auto& [f, t] : n.outputs) outputs[f] = datatype_to_json(t);
    json pres = json::array();
    for (const auto& c : n.preconditions) pres.push_back(clause_to_json(c));
    json posts = json::array();
    for (const auto& c : n.postconditions) posts.push_back(clause_to_json(c));
    std::vector<std::string> rule_ids = n.rule_ids;
    std::sort(rule_ids.begin(), rule_ids.end());

    json j{{"confidence", model::confidence_name(n.confidence)},
           {"id", n.id},
           {"inputs", inputs},
           {"operation", n.name},
           {"outputs", outputs},
           {"postconditions", posts},
           {"preconditions", pres},
           {"rule_ids", rule_ids},
           {"source_location", n.source_location.str()}};
    if (n.error_behavior) {
        json eb{{"description", n.error_behavior->description},
                {"error_class", n.error_behavior->error_class}};
        if (!n.error_behavior->trigger_text.empty()) {
            eb["trigger"] = n.error_behavior->trigger_text;
        }
        j["error_behavior"] = eb;
    }
    return j;
}

OperationNode node_from_json(const json& j, const std::string& path) {
    OperationNode n;
    n.name = require(j, "operation", path).get<std::string>();
    n.id = j.contains("id") ? j.at("id").get<std::string>() : n.name;
    n.confidence =
        model::confidence_from(require(j, "confidence", path).get<std::string>());
    if (j.contains("source_location")) {
        n.source_location =
            model::SourceLocation::parse(j.at("source_location").get<std::string>());
    } else {
        n.source_location = {"unknown", 1, 1};
    }
    if (j.contains("inputs")) {
        for (auto it = j.at("inputs").begin(); it != j.at("inputs").end(); ++it) {
            n.inputs[it.key()] =
                datatype_from_json(it.value(), path + ".inputs." + it.key());
        }
    }
    if (j.contains("outputs")) {
        for (auto it = j.at("outputs").begin(); it != j.at("outputs").end(); ++it) {
            n.outputs[it.key()] =
                datatype_from_json(it.value(), path + ".outputs." + it.key());
        }
    }
    int i = 0;
    for (const auto& cj : j.value("preconditions", json::array())) {
        n.preconditions.push_back(
            clause_from_json(cj, path + ".preconditions[" + std::to_string(i++) + "]"));
    }
    i = 0;
    for (const auto& cj : j.value("postconditions", json::array())) {
        n.postconditions.push_back(
            clause_from_json(cj, path + ".postconditions[" + std::to_string(i++) + "]"));
    }
    if (j.contains("rule_ids")) {
        n.rule_ids = j.at("rule_ids").get<std::vector<std::string>>();
    } else if (j.contains("source_rule")) {
        n.rule_ids.push_back(j.at("source_rule").get<std::string>());
    }
    if (j.contains("error_behavior")) {
        const auto& eb = j.at("error_behavior");
        ErrorBehavior b;
        b.description = require(eb, "description", path + ".error_behavior").get<std::string>();
        b.error_class = require(eb, "error_class", path + ".error_behavior").get<std::string>();
        if (eb.contains("trigger")) {
            b.trigger_text = eb.at("trigger").get<std::string>();
            b.trigger = pred::try_parse_predicate(b.trigger_text);
        }
        n.error_behavior = std::move(b);
    }
    return n;
}

} // namespace

json bsg_to_json(const Bsg& graph) {
    std::vector<const OperationNode*> nodes;
    for (const auto& n : graph.nodes) nodes.push_back(&n);
    std::sort(nodes.begin(), nodes.end(),
              [](const OperationNode* a, const OperationNode* b) { return a->id < b->id; });
    json nodes_json = json::array();
    for (const auto* n : nodes) nodes_json.push_back(node_to_json(*n));

    std::vector<const BsgEdge*> edges;
    for (const auto& e : graph.edges) edges.push_back(&e);
    std::sort(edges.begin(), edges.end(), [](const BsgEdge* a, const BsgEdge* b) {
        return std::tie(a->from, a->to, a->label, a->guard_text) <
               std::tie(b->from, b->to, b->label, b->guard_text);
    });
    json edges_json = json::array();
    for (const auto* e : edges) {
        json ej{{"from", e->from}, {"label", edge_label_name(e->label)}, {"to", e->to}};
        if (!e->guard_text.empty()) ej["guard"] = e->guard_text;
        edges_json.push_back(ej);
    }

    json invariants = json::array();
    for (const auto& c : graph.global_invariants) invariants.push_back(clause_to_json(c));

    return {{"edges", edges_json},
            {"global_invariants", invariants},
            {"metadata",
             {{"bri_digest", graph.metadata.bri_digest},
              {"generator", graph.metadata.generator},
              {"scenario_id", graph.metadata.scenario_id}}},
            {"nodes", nodes_json}};
}

std::string serialize_bsg(const Bsg& graph) {
    return model::canonical_dump(bsg_to_json(graph));
}

Bsg bsg_from_json(const json& j) {
    Bsg graph;
    if (!j.contains("nodes") && j.contains("operation")) {
        // Single-node shorthand: node fields at top level, node-level
        // "invariants" promoted to global invariants.
        graph.nodes.push_back(node_from_json(j, ""));
        for (const auto& inv : j.value("invariants", json::array())) {
            graph.global_invariants.push_back(clause_from_json(inv, ".invariants"));
        }
        return graph;
    }
    int i = 0;
    for (const auto& nj : require(j, "nodes", "")) {
        graph.nodes.push_back(node_from_json(nj, ".nodes[" + std::to_string(i++) + "]"));
    }
    i = 0;
    for (const auto& ej : j.value("edges", json::array())) {
        std::string path = ".edges[" + std::to_string(i++) + "]";
        BsgEdge e;
        e.from = require(ej, "from", path).get<std::string>();
        e.to = require(ej, "to", path).get<std::string>();
        e.label = edge_label_from(require(ej, "label", path).get<std::string>());
        if (ej.contains("guard")) {
            e.guard_text = ej.at("guard").get<std::string>();
            e.guard = pred::try_parse_predicate(e.guard_text);
        }
        graph.edges.push_back(std::move(e));
    }
    i = 0;
    for (const auto& cj : j.value("global_invariants", json::array())) {
        graph.global_invariants.push_back(
            clause_from_json(cj, ".global_invariants[" + std::to_string(i++) + "]"));
    }
    if (j.contains("metadata")) {
        const auto& m = j.at("metadata");
        graph.metadata.scenario_id = m.value("scenario_id", "");
        graph.metadata.bri_digest = m.value("bri_digest", "");
        graph.metadata.generator = m.value("generator", "");
    }
    return graph;
}

Bsg deserialize_bsg(const std::string& document) {
    json j = json::parse(document, nullptr, true, true);
    return bsg_from_json(j);
}

// ---------------------------------------------------------------------------
// Diff
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> clause_texts(const std::vector<ContractClause>& cs) {
    std::vector<std::string> out;
    for (const auto& c : cs) out.push_back(c.text);
    return out;
}

void diff_nodes(const Bsg& a, const Bsg& b, std::vector<DiffEntry>& out) {
    std::map<std::string, const OperationNode*> an, bn;
    for (const auto& n : a.nodes) an[n.id] = &n;
    for (const auto& n : b.nodes) bn[n.id] = &n;
    for (const auto& [id, node] : an) {
        if (!bn.count(id)) {
            out.push_back({DiffKind::RemovedNode, id, ""});
            continue;
        }
        const OperationNode& x = *node;
        const OperationNode& y = *bn[id];
        std::vector<std::string> changed;
        if (x.name != y.name) changed.push_back("operation");
        if (x.inputs != y.inputs) changed.push_back("inputs");
        if (x.outputs != y.outputs) changed.push_back("outputs");
        if (clause_texts(x.preconditions) != clause_texts(y.preconditions)) {
            changed.push_back("preconditions");
        }
        if (clause_texts(x.postconditions) != clause_texts(y.postconditions)) {
            changed.push_back("postconditions");
        }
        auto rx = x.rule_ids;
        auto ry = y.rule_ids;
        std::sort(rx.begin(), rx.end());
        std::sort(ry.begin(), ry.end());
        if (rx != ry) changed.push_back("rule_ids");
        if (x.error_behavior != y.error_behavior) changed.push_back("error_behavior");
        if (x.confidence != y.confidence) changed.push_back("confidence");
        if (x.source_location != y.source_location) changed.push_back("source_location");
        if (!changed.empty()) {
            std::string detail;
            for (std::size_t i = 0; i < changed.size(); ++i) {
                if (i) detail += ",";
                detail += changed[i];
            }
            out.push_back({DiffKind::ChangedNode, id, detail});
        }
    }
    for (const auto& [id, node] : bn) {
        if (!an.count(id)) out.push_back({DiffKind::AddedNode, id, ""});
    }
}

} // namespace

std::vector<DiffEntry> diff_bsg(const Bsg& a, const Bsg& b) {
    std::vector<DiffEntry> out;
    diff_nodes(a, b, out);

    auto edge_key = [](const BsgEdge& e) {
        return e.from + "->" + e.to + "[" + edge_label_name(e.label) + "]";
    };
    std::map<std::string, const BsgEdge*> ae, be;
    for (const auto& e : a.edges) ae[edge_key(e)] = &e;
    for (const auto& e : b.edges) be[edge_key(e)] = &e;
    for (const auto& [k, e] : ae) {
        if (!be.count(k)) {
            out.push_back({DiffKind::RemovedEdge, k, ""});
        } else if (e->guard_text != be[k]->guard_text) {
            out.push_back({DiffKind::ChangedEdge, k, "guard"});
        }
    }
    for (const auto& [k, e] : be) {
        if (!ae.count(k)) out.push_back({DiffKind::AddedEdge, k, ""});
    }

    std::set<std::string> ai, bi;
    for (const auto& c : a.global_invariants) ai.insert(c.text);
    for (const auto& c : b.global_invariants) bi.insert(c.text);
    for (const auto& t : ai) {
        if (!bi.count(t)) out.push_back({DiffKind::RemovedInvariant, t, ""});
    }
    for (const auto& t : bi) {
        if (!ai.count(t)) out.push_back({DiffKind::AddedInvariant, t, ""});
    }

    if (!(a.metadata == b.metadata)) {
        out.push_back({DiffKind::ChangedMetadata, "metadata", ""});
    }
    return out;
}

namespace {

const char* diff_kind_name(DiffKind k) {
    switch (k) {
        case DiffKind::AddedNode: return "added node";
        case DiffKind::RemovedNode: return "removed node";
        case DiffKind::ChangedNode: return "changed node";
        case DiffKind::AddedEdge: return "added edge";
        case DiffKind::RemovedEdge: return "removed edge";
        case DiffKind::ChangedEdge: return "changed edge";
        case DiffKind::AddedInvariant: return "added invariant";
        case DiffKind::RemovedInvariant: return "removed invariant";
        case DiffKind::ChangedMetadata: return "changed metadata";
    }
    return "?";
}

} // namespace

std::string render_diff(const std::vector<DiffEntry>& diff) {
    if (diff.empty()) return "no differences\n";
    std::ostringstream out;
    for (const auto& d : diff) {
        out << diff_kind_name(d.kind) << ": " << d.key;
        if (!d.detail.empty()) out << " (" << d.detail << ")";
        out << "\n";
    }
    return out.str();
}

std::string render_bsg_text(const Bsg& graph) {
    std::ostringstream out;
    out << "BSG scenario=" << graph.metadata.scenario_id << " nodes=" << graph.nodes.size()
        << " edges=" << graph.edges.size() << "\n";
    std::vector<const OperationNode*> nodes;
    for (const auto& n : graph.nodes) nodes.push_back(&n);
    std::sort(nodes.begin(), nodes.end(),
              [](const OperationNode* a, const OperationNode* b) { return a->id < b->id; });
    for (const auto* n : nodes) {
        out << "\nnode " << n->id << " (" << n->name << ")\n";
        out << "  at " << n->source_location.str() << " confidence "
            << model::confidence_name(n->confidence) << "\n";
        if (!n->inputs.empty()) {
            out << "  inputs:";
            for (const auto& [f, t] : n->inputs) out << " " << f << ":" << t.str();
            out << "\n";
        }
        if (!n->outputs.empty()) {
            out << "  outputs:";
            for (const auto& [f, t] : n->outputs) out << " " << f << ":" << t.str();
            out << "\n";
        }
        for (const auto& c : n->preconditions) {
            out << "  pre:  " << c.text << (c.checkable() ? "" : "  [prose]") << "\n";
        }
        for (const auto& c : n->postconditions) {
            out << "  post: " << c.text << (c.checkable() ? "" : "  [prose]") << "\n";
        }
        if (!n->rule_ids.empty()) {
            out << "  rules:";
            for (const auto& r : n->rule_ids) out << " " << r;
            out << "\n";
        }
        if (n->error_behavior) {
            out << "  error: " << n->error_behavior->error_class << " — "
                << n->error_behavior->description << "\n";
        }
    }
    if (!graph.edges.empty()) out << "\n";
    for (const auto& e : graph.edges) {
        out << "edge " << e.from << " -> " << e.to << " [" << edge_label_name(e.label) << "]";
        if (!e.guard_text.empty()) out << " when " << e.guard_text;
        out << "\n";
    }
    for (const auto& c : graph.global_invariants) {
        out << "invariant: " << c.text << (c.checkable() ? "" : "  [prose]") << "\n";
    }
    return out.str();
}

std::string render_bsg_dot(const Bsg& graph) {
    std::ostringstream out;
    out << "digraph bsg {\n  rankdir=TB;\n  node [shape=box];\n";
    for (const auto& n : graph.nodes) {
        out << "  \"" << n.id << "\" [label=\"" << n.name << "\"];\n";
    }
    for (const auto& e : graph.edges) {
        out << "  \"" << e.from << "\" -> \"" << e.to << "\" [label=\""
            << edge_label_name(e.label);
        if (!e.guard_text.empty()) out << ": " << e.guard_text;
        out << "\"";
        if (e.label == EdgeLabel::ErrorEdge) out << ", style=dashed, color=red";
        if (e.label == EdgeLabel::Parallel) out << ", style=bold";
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Flow enumeration
// ---------------------------------------------------------------------------

namespace {

struct FlowWalker {
    const Bsg& graph;
    std::map<std::string, std::vector<const BsgEdge*>> out;
    std::vector<FlowPlan> flows;
    std::vector<FlowStep> steps;
    std::set<std::pair<std::string, std::string>> covered;
    int next_group = 0;
    static constexpr std::size_t kHardCap = 4096;

    explicit FlowWalker(const Bsg& g) : graph(g) {
        for (const auto& e : g.edges) out[e.from].push_back(&e);
        for (auto& [k, v] : out) {
            std::sort(v.begin(), v.end(),
                      [](const BsgEdge* a, const BsgEdge* b) { return a->to < b->to; });
        }
    }

    void emit() {
        if (flows.size() >= kHardCap) return;
        FlowPlan plan;
        plan.steps = steps;
        plan.covered_edges = covered;
        flows.push_back(std::move(plan));
    }

    void walk(const std::string& node) {
        if (flows.size() >= kHardCap) return;
        auto it = out.find(node);
        if (it == out.end() || it->second.empty()) {
            emit();
            return;
        }
        const auto& edges = it->second;
        bool all_parallel = std::all_of(edges.begin(), edges.end(), [](const BsgEdge* e) {
            return e->label == EdgeLabel::Parallel;
        });
        if (all_parallel && edges.size() >= 1 &&
            edges.front()->label == EdgeLabel::Parallel) {
            // Order-independent fan-out: all branches join before successors.
            int group = next_group++;
            std::size_t base = steps.size();
            std::set<std::string> joins;
            for (const BsgEdge* e : edges) {
                FlowStep s;
                s.node_id = e->to;
                s.entering_label = EdgeLabel::Parallel;
                s.parallel_group = group;
                steps.push_back(s);
                covered.insert({e->from, e->to});
                auto jt = out.find(e->to);
                if (jt != out.end()) {
                    for (const BsgEdge* je : jt->second) joins.insert(je->to);
                }
            }
            if (joins.empty()) {
                emit();
            } else if (joins.size() > 1) {
                throw Error("PARALLEL_SHAPE",
                            "parallel branches from " + node +
                                " do not join on a single node");
            } else {
                const std::string join = *joins.begin();
                for (const BsgEdge* e : edges) covered.insert({e->to, join});
                FlowStep s;
                s.node_id = join;
                s.entering_label = EdgeLabel::Sequence;
                steps.push_back(s);
                walk(join);
                steps.pop_back();
                for (const BsgEdge* e : edges) covered.erase({e->to, join});
            }
            while (steps.size() > base) steps.pop_back();
            for (const BsgEdge* e : edges) covered.erase({e->from, e->to});
            --next_group;
            return;
        }
        for (const BsgEdge* e : edges) {
            FlowStep s;
            s.node_id = e->to;
            s.entering_label = e->label;
            s.guard = e->guard;
            s.guard_text = e->guard_text;
            steps.push_back(s);
            bool inserted = covered.insert({e->from, e->to}).second;
            walk(e->to);
            steps.pop_back();
            if (inserted) covered.erase({e->from, e->to});
        }
    }
};

std::vector<std::string> flow_signature(const FlowPlan& f) {
    std::vector<std::string> sig;
    for (const auto& s : f.steps) sig.push_back(s.node_id);
    return sig;
}

} // namespace

std::vector<FlowPlan> enumerate_flows(const Bsg& graph, int bound) {
    topo_order(graph); // throws CYCLE on cyclic input

    std::set<std::string> has_in;
    for (const auto& e : graph.edges) has_in.insert(e.to);
    std::vector<std::string> sources;
    for (const auto& n : graph.nodes) {
        if (!has_in.count(n.id)) sources.push_back(n.id);
    }
    std::sort(sources.begin(), sources.end());

    FlowWalker walker(graph);
    for (const auto& src : sources) {
        FlowStep s;
        s.node_id = src;
        s.entering_label = EdgeLabel::Sequence;
        walker.steps.push_back(s);
        walker.walk(src);
        walker.steps.pop_back();
    }

    std::vector<FlowPlan>& all = walker.flows;
    std::sort(all.begin(), all.end(), [](const FlowPlan& a, const FlowPlan& b) {
        return flow_signature(a) < flow_signature(b);
    });

    std::set<std::pair<std::string, std::string>> edge_set;
    for (const auto& e : graph.edges) edge_set.insert({e.from, e.to});

    // Coverage-first selection: lexicographically smallest flow for each
    // still-uncovered edge, then fill remaining budget in lex order.
    std::vector<bool> selected(all.size(), false);
    std::set<std::pair<std::string, std::string>> covered;
    std::size_t selected_count = 0;
    for (const auto& edge : edge_set) {
        if (covered.count(edge)) continue;
        for (std::size_t i = 0; i < all.size(); ++i) {
            if (all[i].covered_edges.count(edge)) {
                if (!selected[i]) {
                    selected[i] = true;
                    ++selected_count;
                    covered.insert(all[i].covered_edges.begin(), all[i].covered_edges.end());
                }
                break;
            }
        }
    }
    for (std::size_t i = 0; i < all.size() && selected_count < static_cast<std::size_t>(bound);
         ++i) {
        if (!selected[i]) {
            selected[i] = true;
            ++selected_count;
        }
    }

    std::vector<FlowPlan> result;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (selected[i]) result.push_back(all[i]);
    }
    for (std::size_t i = 0; i < result.size(); ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "flow-%03zu", i + 1);
        result[i].id = buf;
    }
    return result;
}

} // namespace modernize::bsg
