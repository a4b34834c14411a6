#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bibcite/corpus.hpp"
#include "bibcite/parallel.hpp"
#include "bibcite/refparse.hpp"

namespace bibcite::resolver {

/// Venue alias -> bibcode venue code (<= 5 chars). Aliases are canonicalized
/// (case-folded, spaces squeezed, trailing dots stripped); one alias may
/// expand to several codes when the file lists it more than once.
class VenueAbbrevTable {
 public:
  static std::string canonical_alias(std::string_view token);

  Result<bool> add_alias(std::string_view alias, std::string_view venue_code);
  std::vector<std::string> lookup(std::string_view venue_token) const;
  size_t size() const { return entries_.size(); }

  // File format: one "alias<TAB>code" per line, '#' comments.
  static Result<VenueAbbrevTable> parse(std::string_view text);
  std::string render() const;

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

struct ResolutionConfig {
  double threshold = 0.8;  // (0, 1]
  double weight_year = 0.25;
  double weight_authors = 0.25;
  double weight_venue = 0.25;
  double weight_volume_page = 0.25;
  int max_variants = 3;

  Result<bool> validate() const;  // weights sum to 1, threshold in (0,1]

  // Key-value config file: "threshold = 0.8" etc.
  static Result<ResolutionConfig> parse(std::string_view text);
  std::string render() const;
};

struct ResolvedReference {
  Bibcode citing;
  Bibcode cited;
  double score = 0.0;  // >= config threshold
  std::string source_tag;
  Date resolved_date;
  std::string provenance;  // set when the citing side was re-attributed

  bool operator==(const ResolvedReference&) const = default;
};

enum class UnresolvedReason { parse_failed, no_candidate, below_threshold };

std::string to_string(UnresolvedReason r);
std::optional<UnresolvedReason> unresolved_reason_from_string(std::string_view s);

struct UnresolvedReference {
  refparse::RawReference raw;
  std::optional<refparse::ParsedReference> best_guess;
  double best_score = 0.0;
  UnresolvedReason reason = UnresolvedReason::parse_failed;
  std::string note;  // ambiguity ties carry an explanation
};

/// One tentative identifier per venue-alias expansion of the parsed venue
/// token; empty when the token is unmapped. Error when the parse has no
/// year, since no identifier can be formed.
Result<std::vector<Bibcode>> tentative_bibcodes(const refparse::ParsedReference& parsed,
                                                const VenueAbbrevTable& table);

/// Weighted field agreement in [0, 1]: year (1 exact, 0.5 off by one),
/// first-author surname (edit similarity when unequal, initials break
/// near-ties), venue code after table mapping, and the mean of the
/// volume/page exact-match indicators.
double similarity_score(const refparse::ParsedReference& parsed, const corpus::BibRecord& record,
                        const VenueAbbrevTable& table, const ResolutionConfig& config);

using ResolveOutcome = std::variant<ResolvedReference, UnresolvedReference, Error>;

/// Walks parse variants in order, generating and verifying tentative
/// identifiers; the first variant with an unambiguous candidate at or above
/// threshold wins. Self pairs are never produced. Error when the citing
/// record is not in the store.
ResolveOutcome resolve_reference(const refparse::RawReference& raw,
                                 const corpus::RecordStore& store,
                                 const VenueAbbrevTable& table, const ResolutionConfig& config);

struct SourceCount {
  size_t attempted = 0;
  size_t resolved = 0;
  std::optional<Date> first_date;
  std::optional<Date> last_date;
};

struct BatchResult {
  std::vector<ResolvedReference> resolved;      // input order
  std::vector<UnresolvedReference> unresolved;  // input order
  std::map<std::string, SourceCount> per_source;
  std::vector<std::string> errors;
};

/// Per-item resolution over a read-only store; item errors are recorded and
/// never abort the batch. The parallel path fans items out across threads
/// and reassembles in input order.
BatchResult resolve_batch(const std::vector<refparse::RawReference>& raws,
                          const corpus::RecordStore& store, const VenueAbbrevTable& table,
                          const ResolutionConfig& config,
                          ExecutionMode mode = default_execution_mode());

// Tab-separated resolved table: citing, cited, score, source, date.
std::string render_resolved_table(const std::vector<ResolvedReference>& rows);
Result<std::vector<ResolvedReference>> parse_resolved_table(std::string_view text);

// Unresolved rows persist enough for the grouping report:
// reason, best_score, surname, year, venue, citing, source, sequence, text.
std::string render_unresolved_table(const std::vector<UnresolvedReference>& rows);
Result<std::vector<UnresolvedReference>> parse_unresolved_table(std::string_view text);

std::string render_source_counts(const std::map<std::string, SourceCount>& counts);
Result<std::map<std::string, SourceCount>> parse_source_counts(std::string_view text);

/// Merges per-source tallies from successive runs.
void merge_source_counts(std::map<std::string, SourceCount>& into,
                         const std::map<std::string, SourceCount>& from);

}  // namespace bibcite::resolver
