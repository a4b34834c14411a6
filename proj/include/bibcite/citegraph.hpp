#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bibcite/corpus.hpp"
#include "bibcite/parallel.hpp"
#include "bibcite/resolver.hpp"

namespace bibcite::citegraph {

struct PolicyConfig {
  int staleness_days = 365;  // > 0; strictly older than this is dropped
  Date as_of;

  bool operator==(const PolicyConfig&) const = default;
};

struct PolicyAction {
  std::string rule;  // replaced-by-published | attributed-to-published |
                     // reattribution-self-loop | reattribution-duplicate |
                     // stale-preprint
  Bibcode citing;
  Bibcode cited;
  std::optional<Bibcode> attributed_to;
};

/// Applies the e-print deduplication rules to a resolved table:
/// linked e-prints either yield to the published paper's own references or
/// have theirs re-attributed to it; unlinked e-prints older than the
/// staleness window contribute nothing. Idempotent.
std::vector<resolver::ResolvedReference> apply_eprint_policy(
    const std::vector<resolver::ResolvedReference>& resolved, const corpus::RecordStore& store,
    const std::vector<corpus::EprintLink>& links, const PolicyConfig& policy,
    std::vector<PolicyAction>* log = nullptr);

/// Inverted citation table. Both directions are kept; values are sorted
/// unique bibcode vectors, so duality is a structural property.
struct CitationIndex {
  std::map<Bibcode, std::vector<Bibcode>> cited_to_citing;
  std::map<Bibcode, std::vector<Bibcode>> citing_to_cited;
  Date build_date;
  PolicyConfig policy;

  size_t pair_count() const;

  bool operator==(const CitationIndex&) const = default;
};

/// Policy application, pair deduplication (identical pairs from several
/// sources count once), then inversion into both directional maps.
CitationIndex rebuild_citation_index(const std::vector<resolver::ResolvedReference>& resolved,
                                     const corpus::RecordStore& store,
                                     const std::vector<corpus::EprintLink>& links,
                                     const PolicyConfig& policy,
                                     ExecutionMode mode = default_execution_mode(),
                                     std::vector<PolicyAction>* log = nullptr);

/// Citers of a record, ascending bibcode; empty when unknown.
std::vector<Bibcode> citations_of(const CitationIndex& index, const Bibcode& cited);

/// Resolved-and-policy-surviving references of a record; unresolved strings
/// never appear.
std::vector<Bibcode> references_of(const CitationIndex& index, const Bibcode& citing);

/// Groups unresolved items by normalized (surname, year, venue) key and
/// returns the top-k by count, ties by key ascending. Fully unparsed items
/// group under "unparsed".
struct UnresolvedGroup {
  std::string key;
  size_t count = 0;
};
Result<std::vector<UnresolvedGroup>> unresolved_report(
    const std::vector<resolver::UnresolvedReference>& unresolved, int top_k);

std::string unresolved_key(const resolver::UnresolvedReference& item);

struct SourceCoverageRow {
  std::string source_tag;
  size_t attempted = 0;
  size_t resolved = 0;
  std::string rate;        // whole percent, "n/a" when nothing attempted
  std::string date_range;  // "1982-2002" year span, "-" when empty
};

std::vector<SourceCoverageRow> source_coverage_report(
    const std::map<std::string, resolver::SourceCount>& counts);
std::string render_source_coverage(const std::vector<SourceCoverageRow>& rows);

// Index export: tab-separated citing/cited pair list plus a JSON build
// manifest carrying the policy and input digests.
std::string render_index_pairs(const CitationIndex& index);
Result<CitationIndex> parse_index_pairs(std::string_view text);

std::string render_index_manifest(const CitationIndex& index,
                                  const std::map<std::string, std::string>& input_digests);
Result<CitationIndex> load_index(std::string_view pairs_text, std::string_view manifest_text);

}  // namespace bibcite::citegraph
