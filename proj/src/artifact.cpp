#include "modernize/artifact.hpp"

#include "modernize/digest.hpp"
#include "modernize/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <set>

namespace modernize::model {

namespace fs = std::filesystem;

const char* artifact_kind_name(ArtifactKind k) {
    switch (k) {
        case ArtifactKind::Source: return "source";
        case ArtifactKind::Config: return "config";
        case ArtifactKind::Schema: return "schema";
        case ArtifactKind::Doc: return "doc";
    }
    return "?";
}

std::optional<ArtifactKind> artifact_kind_from(const std::string& name) {
    if (name == "source") return ArtifactKind::Source;
    if (name == "config") return ArtifactKind::Config;
    if (name == "schema") return ArtifactKind::Schema;
    if (name == "doc") return ArtifactKind::Doc;
    return std::nullopt;
}

std::vector<const ArtifactFile*> LegacyArtifactBundle::of_kind(ArtifactKind k) const {
    std::vector<const ArtifactFile*> out;
    for (const auto& f : files) {
        if (f.kind == k) out.push_back(&f);
    }
    return out;
}

const ArtifactFile* LegacyArtifactBundle::find(const std::string& path) const {
    for (const auto& f : files) {
        if (f.path == path) return &f;
    }
    return nullptr;
}

std::string SourceLocation::str() const {
    return file + ":" + std::to_string(line_start) + "-" + std::to_string(line_end);
}

SourceLocation SourceLocation::parse(const std::string& text) {
    auto colon = text.rfind(':');
    auto dash = text.rfind('-');
    if (colon == std::string::npos || dash == std::string::npos || dash < colon) {
        throw Error("BAD_LOCATION", "expected file:start-end, got '" + text + "'");
    }
    SourceLocation loc;
    loc.file = text.substr(0, colon);
    loc.line_start = std::stoi(text.substr(colon + 1, dash - colon - 1));
    loc.line_end = std::stoi(text.substr(dash + 1));
    if (loc.line_start < 1 || loc.line_end < loc.line_start) {
        throw Error("BAD_LOCATION", "invalid line range in '" + text + "'");
    }
    return loc;
}

bool SourceLocation::overlaps(const SourceLocation& other) const {
    return file == other.file && line_start <= other.line_end &&
           other.line_start <= line_end;
}

const char* confidence_name(Confidence c) {
    switch (c) {
        case Confidence::High: return "high";
        case Confidence::Medium: return "medium";
        case Confidence::Low: return "low";
    }
    return "?";
}

const char* rule_category_name(RuleCategory c) {
    return c == RuleCategory::Explicit ? "explicit" : "implicit";
}

const char* rule_kind_name(RuleKind k) {
    switch (k) {
        case RuleKind::Validation: return "validation";
        case RuleKind::Computation: return "computation";
        case RuleKind::StateTransition: return "state_transition";
        case RuleKind::Exception: return "exception";
        case RuleKind::Constraint: return "constraint";
    }
    return "?";
}

const char* constraint_kind_name(ConstraintKind k) {
    switch (k) {
        case ConstraintKind::TypeRestriction: return "type_restriction";
        case ConstraintKind::ValueRange: return "value_range";
        case ConstraintKind::ReferentialIntegrity: return "referential_integrity";
        case ConstraintKind::TemporalOrdering: return "temporal_ordering";
        case ConstraintKind::BusinessInvariant: return "business_invariant";
    }
    return "?";
}

namespace {

template <typename T>
T enum_from(const std::string& name, std::initializer_list<std::pair<const char*, T>> table,
            const char* what) {
    for (const auto& [n, v] : table) {
        if (name == n) return v;
    }
    throw Error("BAD_ENUM", std::string("unknown ") + what + " '" + name + "'");
}

} // namespace

Confidence confidence_from(const std::string& name) {
    return enum_from<Confidence>(name,
                                 {{"high", Confidence::High},
                                  {"medium", Confidence::Medium},
                                  {"low", Confidence::Low}},
                                 "confidence");
}

RuleCategory rule_category_from(const std::string& name) {
    return enum_from<RuleCategory>(
        name, {{"explicit", RuleCategory::Explicit}, {"implicit", RuleCategory::Implicit}},
        "category");
}

RuleKind rule_kind_from(const std::string& name) {
    return enum_from<RuleKind>(name,
                               {{"validation", RuleKind::Validation},
                                {"computation", RuleKind::Computation},
                                {"state_transition", RuleKind::StateTransition},
                                {"exception", RuleKind::Exception},
                                {"constraint", RuleKind::Constraint}},
                               "rule kind");
}

ConstraintKind constraint_kind_from(const std::string& name) {
    return enum_from<ConstraintKind>(name,
                                     {{"type_restriction", ConstraintKind::TypeRestriction},
                                      {"value_range", ConstraintKind::ValueRange},
                                      {"referential_integrity", ConstraintKind::ReferentialIntegrity},
                                      {"temporal_ordering", ConstraintKind::TemporalOrdering},
                                      {"business_invariant", ConstraintKind::BusinessInvariant}},
                                     "constraint kind");
}

const BusinessRule* BusinessRuleInventory::find(const std::string& id) const {
    for (const auto& r : rules) {
        if (r.id == id) return &r;
    }
    return nullptr;
}

void BusinessRuleInventory::check() const {
    std::set<std::string> seen;
    for (const auto& r : rules) {
        if (!seen.insert(r.id).second) {
            throw Error("DUPLICATE_RULE_ID", "rule id " + r.id + " appears more than once");
        }
        if (r.kind == RuleKind::Constraint && !r.constraint_payload) {
            throw Error("MISSING_CONSTRAINT_PAYLOAD",
                        "constraint rule " + r.id + " lacks constraint_payload");
        }
        if (r.constraint_payload) {
            const auto& c = *r.constraint_payload;
            if (c.kind == ConstraintKind::ValueRange && !c.lower && !c.upper) {
                throw Error("CONSTRAINT_BOUNDS",
                            "value_range constraint on " + r.id + " carries no bounds");
            }
            if (!pred::try_parse_predicate(c.expression)) {
                throw Error("CONSTRAINT_EXPRESSION",
                            "constraint expression of " + r.id + " does not parse: " +
                                c.expression);
            }
        }
    }
}

namespace {

std::optional<ArtifactKind> kind_from_extension(const std::string& path) {
    auto dot = path.rfind('.');
    if (dot == std::string::npos) return std::nullopt;
    std::string ext = to_lower(path.substr(dot));
    if (ext == ".cob" || ext == ".cbl" || ext == ".sql" || ext == ".pls") {
        return ArtifactKind::Source;
    }
    if (ext == ".ddl") return ArtifactKind::Schema;
    if (ext == ".jcl" || ext == ".cfg" || ext == ".properties") return ArtifactKind::Config;
    if (ext == ".md" || ext == ".txt") return ArtifactKind::Doc;
    return std::nullopt;
}

} // namespace

LegacyArtifactBundle load_bundle(const fs::path& root_directory,
                                 const std::optional<fs::path>& manifest,
                                 const std::string& scenario_id) {
    if (!fs::is_directory(root_directory)) {
        throw Error("NO_SUCH_DIRECTORY", root_directory.string() + " is not a directory");
    }

    std::map<std::string, ArtifactKind> manifest_kinds;
    if (manifest) {
        std::string text = io::read_text_file(*manifest);
        int lineno = 0;
        for (const auto& raw : split(text, '\n')) {
            ++lineno;
            std::string line = trim(raw);
            if (line.empty() || line[0] == '#') continue;
            auto space = line.find(' ');
            if (space == std::string::npos) {
                throw Error("BAD_MANIFEST", "line " + std::to_string(lineno) +
                                                ": expected '<kind> <relative-path>'");
            }
            std::string kind_name = line.substr(0, space);
            std::string rel = trim(line.substr(space + 1));
            auto kind = artifact_kind_from(kind_name);
            if (!kind) {
                throw Error("UNKNOWN_KIND", "line " + std::to_string(lineno) +
                                                ": unknown kind tag '" + kind_name + "'");
            }
            if (manifest_kinds.count(rel)) {
                throw Error("DUPLICATE_PATH", "manifest lists " + rel + " twice");
            }
            manifest_kinds.emplace(rel, *kind);
        }
    }

    LegacyArtifactBundle bundle;
    bundle.scenario_id = scenario_id.empty() ? root_directory.filename().string() : scenario_id;

    if (manifest) {
        for (const auto& [rel, kind] : manifest_kinds) {
            ArtifactFile f;
            f.path = rel;
            f.kind = kind;
            f.text = io::read_text_file(root_directory / rel);
            bundle.files.push_back(std::move(f));
        }
    } else {
        std::vector<std::string> paths;
        for (const auto& entry : fs::recursive_directory_iterator(root_directory)) {
            if (!entry.is_regular_file()) continue;
            paths.push_back(
                fs::relative(entry.path(), root_directory).generic_string());
        }
        std::sort(paths.begin(), paths.end());
        for (const auto& rel : paths) {
            auto kind = kind_from_extension(rel);
            if (!kind) continue;
            ArtifactFile f;
            f.path = rel;
            f.kind = *kind;
            f.text = io::read_text_file(root_directory / rel);
            bundle.files.push_back(std::move(f));
        }
    }

    std::sort(bundle.files.begin(), bundle.files.end(),
              [](const ArtifactFile& a, const ArtifactFile& b) { return a.path < b.path; });

    std::set<std::string> seen;
    for (const auto& f : bundle.files) {
        if (!seen.insert(f.path).second) {
            throw Error("DUPLICATE_PATH", "bundle contains " + f.path + " twice");
        }
    }
    if (bundle.of_kind(ArtifactKind::Source).empty()) {
        throw Error("EMPTY_SOURCE_SET",
                    "no source files in " + root_directory.string());
    }
    return bundle;
}

std::string bundle_digest(const LegacyArtifactBundle& bundle) {
    std::vector<const ArtifactFile*> sorted;
    for (const auto& f : bundle.files) sorted.push_back(&f);
    std::sort(sorted.begin(), sorted.end(),
              [](const ArtifactFile* a, const ArtifactFile* b) { return a->path < b->path; });
    std::string buf;
    for (const auto* f : sorted) {
        buf += f->path;
        buf.push_back('\0');
        buf += artifact_kind_name(f->kind);
        buf.push_back('\0');
        buf += std::to_string(f->text.size());
        buf.push_back('\0');
        buf += f->text;
    }
    return sha256_hex(buf);
}

std::string canonical_dump(const nlohmann::json& j) {
    // nlohmann objects iterate in sorted key order; two-space indent and a
    // trailing newline give byte-deterministic documents.
    return j.dump(2) + "\n";
}

nlohmann::json bundle_to_json(const LegacyArtifactBundle& bundle) {
    nlohmann::json files = nlohmann::json::array();
    for (const auto& f : bundle.files) {
        files.push_back({{"kind", artifact_kind_name(f.kind)},
                         {"lines", std::count(f.text.begin(), f.text.end(), '\n') + 1},
                         {"path", f.path}});
    }
    return {{"digest", bundle_digest(bundle)},
            {"digest_algorithm", kDigestAlgorithm},
            {"files", files},
            {"scenario_id", bundle.scenario_id}};
}

nlohmann::json rule_to_json(const BusinessRule& r) {
    nlohmann::json j{{"category", rule_category_name(r.category)},
                     {"confidence", confidence_name(r.confidence)},
                     {"description", r.description},
                     {"id", r.id},
                     {"input_fields", r.input_fields},
                     {"kind", rule_kind_name(r.kind)},
                     {"location", r.location.str()},
                     {"output_effects", r.output_effects}};
    if (r.constraint_payload) {
        const auto& c = *r.constraint_payload;
        nlohmann::json cj{{"expression", c.expression},
                          {"kind", constraint_kind_name(c.kind)},
                          {"subject_fields", c.subject_fields}};
        if (c.lower) cj["lower"] = *c.lower;
        if (c.upper) cj["upper"] = *c.upper;
        j["constraint"] = cj;
    }
    return j;
}

BusinessRule rule_from_json(const nlohmann::json& j) {
    BusinessRule r;
    r.id = j.at("id").get<std::string>();
    r.description = j.at("description").get<std::string>();
    r.location = SourceLocation::parse(j.at("location").get<std::string>());
    r.input_fields = j.at("input_fields").get<std::vector<std::string>>();
    r.output_effects = j.at("output_effects").get<std::vector<std::string>>();
    r.category = rule_category_from(j.at("category").get<std::string>());
    r.confidence = confidence_from(j.at("confidence").get<std::string>());
    r.kind = rule_kind_from(j.at("kind").get<std::string>());
    if (j.contains("constraint")) {
        const auto& cj = j.at("constraint");
        ConstraintSpec c;
        c.kind = constraint_kind_from(cj.at("kind").get<std::string>());
        c.expression = cj.at("expression").get<std::string>();
        c.subject_fields = cj.at("subject_fields").get<std::vector<std::string>>();
        if (cj.contains("lower")) c.lower = cj.at("lower").get<std::int64_t>();
        if (cj.contains("upper")) c.upper = cj.at("upper").get<std::int64_t>();
        r.constraint_payload = std::move(c);
    }
    return r;
}

nlohmann::json bri_to_json(const BusinessRuleInventory& bri) {
    nlohmann::json rules = nlohmann::json::array();
    for (const auto& r : bri.rules) rules.push_back(rule_to_json(r));
    return {{"bundle_digest", bri.bundle_digest},
            {"digest_algorithm", kDigestAlgorithm},
            {"extraction_meta",
             {{"backend", bri.extraction_meta.backend},
              {"temperature", bri.extraction_meta.temperature},
              {"timestamp", bri.extraction_meta.timestamp}}},
            {"rules", rules}};
}

BusinessRuleInventory bri_from_json(const nlohmann::json& j) {
    BusinessRuleInventory bri;
    bri.bundle_digest = j.at("bundle_digest").get<std::string>();
    const auto& meta = j.at("extraction_meta");
    bri.extraction_meta.backend = meta.at("backend").get<std::string>();
    bri.extraction_meta.timestamp = meta.at("timestamp").get<std::string>();
    bri.extraction_meta.temperature = meta.at("temperature").get<double>();
    for (const auto& rj : j.at("rules")) bri.rules.push_back(rule_from_json(rj));
    bri.check();
    return bri;
}

std::string bri_digest(const BusinessRuleInventory& bri) {
    nlohmann::json rules = nlohmann::json::array();
    for (const auto& r : bri.rules) rules.push_back(rule_to_json(r));
    return sha256_hex(
        canonical_dump({{"bundle_digest", bri.bundle_digest}, {"rules", rules}}));
}

} // namespace modernize::model
