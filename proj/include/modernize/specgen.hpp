#pragma once

#include "modernize/analyzer.hpp"
#include "modernize/bsg.hpp"

#include <vector>

namespace modernize::specgen {

/// Agent 2 deterministic backend: transform the analysis output into a
/// validated behavioral specification graph.
///
/// Mapping rules:
///  - one operation node per paragraph owning at least one extracted rule;
///  - rejection guards become negated preconditions carrying their error
///    class; the rejection condition itself lands in error_behavior;
///  - computations, defaults and transitions become postconditions of the
///    shape `out == expr` (guarded ones as `not guard or out == expr`);
///    a written field that the node also reads is renamed `new_<field>`;
///  - single-field value constraints become preconditions on every node
///    inputting the field; business invariants become checkable global
///    invariants; referential/unattached constraints become prose global
///    clauses so no inventory rule is dropped;
///  - entry-paragraph PERFORM chains become sequence edges, IF-guarded
///    performs conditional edges, rejection handlers error edges.
///
/// Throws DIGEST_MISMATCH when the inventory was not derived from
/// `bundle`, EMPTY_BRI on an empty inventory, NAME_COLLISION when field
/// normalization is not injective.
bsg::Bsg generate_bsg(const analyzer::AnalysisResult& analysis,
                      const model::LegacyArtifactBundle& bundle);

struct LosslessReport {
    std::vector<std::string> missing_rule_ids;
    bool lossless() const { return missing_rule_ids.empty(); }
};

/// Every inventory rule must be referenced by a node or tagged on a global
/// invariant clause; the report lists the ids that are not.
LosslessReport check_lossless(const model::BusinessRuleInventory& bri, const bsg::Bsg& graph);

} // namespace modernize::specgen
