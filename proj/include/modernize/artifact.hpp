#pragma once

#include "modernize/predicate.hpp"
#include "modernize/util.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace modernize::model {

enum class ArtifactKind { Source, Config, Schema, Doc };

const char* artifact_kind_name(ArtifactKind k);
std::optional<ArtifactKind> artifact_kind_from(const std::string& name);

struct ArtifactFile {
    std::string path; // relative, '/'-separated
    ArtifactKind kind;
    std::string text;

    bool operator==(const ArtifactFile&) const = default;
};

/// The pipeline input: source files, config files, schemas and optional
/// documentation, loaded from a directory in deterministic order.
struct LegacyArtifactBundle {
    std::string scenario_id;
    std::vector<ArtifactFile> files; // sorted by path

    std::vector<const ArtifactFile*> of_kind(ArtifactKind k) const;
    const ArtifactFile* find(const std::string& path) const;

    bool operator==(const LegacyArtifactBundle&) const = default;
};

struct SourceLocation {
    std::string file;
    int line_start = 1;
    int line_end = 1;

    /// Compact rendering used in every document: "FILE.cob:118-142".
    std::string str() const;
    static SourceLocation parse(const std::string& text);

    bool overlaps(const SourceLocation& other) const;
    auto operator<=>(const SourceLocation&) const = default;
};

enum class Confidence { High, Medium, Low };
enum class RuleCategory { Explicit, Implicit };
enum class RuleKind { Validation, Computation, StateTransition, Exception, Constraint };
enum class ConstraintKind {
    TypeRestriction,
    ValueRange,
    ReferentialIntegrity,
    TemporalOrdering,
    BusinessInvariant,
};

const char* confidence_name(Confidence c);
const char* rule_category_name(RuleCategory c);
const char* rule_kind_name(RuleKind k);
const char* constraint_kind_name(ConstraintKind k);
Confidence confidence_from(const std::string& name);
RuleCategory rule_category_from(const std::string& name);
RuleKind rule_kind_from(const std::string& name);
ConstraintKind constraint_kind_from(const std::string& name);

struct ConstraintSpec {
    ConstraintKind kind = ConstraintKind::BusinessInvariant;
    std::vector<std::string> subject_fields;
    std::string expression; // predicate text; must parse under the DSL
    std::optional<std::int64_t> lower; // value_range only
    std::optional<std::int64_t> upper;

    bool operator==(const ConstraintSpec&) const = default;
};

struct BusinessRule {
    std::string id; // BR-###
    std::string description;
    SourceLocation location;
    std::vector<std::string> input_fields;
    std::vector<std::string> output_effects;
    Confidence confidence = Confidence::High;
    RuleCategory category = RuleCategory::Explicit;
    RuleKind kind = RuleKind::Validation;
    std::optional<ConstraintSpec> constraint_payload;

    bool operator==(const BusinessRule&) const = default;
};

struct ExtractionMeta {
    std::string backend;
    std::string timestamp; // empty for the deterministic backend
    double temperature = 0.0;

    bool operator==(const ExtractionMeta&) const = default;
};

struct BusinessRuleInventory {
    std::vector<BusinessRule> rules;
    std::string bundle_digest;
    ExtractionMeta extraction_meta;

    const BusinessRule* find(const std::string& id) const;
    /// Throws DUPLICATE_RULE_ID / CONSTRAINT_* on invariant violations.
    void check() const;

    bool operator==(const BusinessRuleInventory&) const = default;
};

/// Load a bundle from a directory. Without a manifest, kinds come from the
/// extension map (.cob/.cbl/.sql/.pls source, .ddl schema,
/// .jcl/.cfg/.properties config, .md/.txt doc); unmapped extensions are
/// skipped. A manifest is one `<kind> <relative-path>` line per file.
LegacyArtifactBundle load_bundle(const std::filesystem::path& root_directory,
                                 const std::optional<std::filesystem::path>& manifest = {},
                                 const std::string& scenario_id = "");

/// Content digest over sorted (path, kind, bytes) triples; independent of
/// presentation order.
std::string bundle_digest(const LegacyArtifactBundle& bundle);

nlohmann::json bundle_to_json(const LegacyArtifactBundle& bundle);

nlohmann::json rule_to_json(const BusinessRule& rule);
BusinessRule rule_from_json(const nlohmann::json& j);
nlohmann::json bri_to_json(const BusinessRuleInventory& bri);
BusinessRuleInventory bri_from_json(const nlohmann::json& j);

/// Digest of the rule content (rules + bundle digest, not extraction meta);
/// stamped into BSG metadata for provenance checks.
std::string bri_digest(const BusinessRuleInventory& bri);

/// Canonical serialization used by every artifact document: sorted keys,
/// two-space indent, trailing newline.
std::string canonical_dump(const nlohmann::json& j);

} // namespace modernize::model
