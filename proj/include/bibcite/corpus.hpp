#pragma once

#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "bibcite/bibcode.hpp"
#include "bibcite/parallel.hpp"
#include "bibcite/util.hpp"

namespace bibcite::corpus {

struct AuthorName {
  std::string surname;   // non-empty
  std::string initials;  // "M. J." style, may be empty

  /// Case-folded, diacritic-stripped surname. Idempotent.
  std::string normalized_surname() const;
  /// First initial letter, folded; 0 when none.
  char first_initial() const;

  bool operator==(const AuthorName&) const = default;
};

/// "Surname, I. I." -> AuthorName. Accepts bare surnames.
AuthorName parse_author(std::string_view text);

enum class RecordKind { journal, eprint, other };

std::string to_string(RecordKind k);
std::optional<RecordKind> record_kind_from_string(std::string_view s);

struct BibRecord {
  Bibcode bibcode;
  std::string title;
  std::vector<AuthorName> authors;
  std::optional<std::string> abstract;
  std::vector<std::string> keywords;
  int pub_year = 0;  // must equal bibcode.year()
  std::string venue;
  std::optional<std::string> volume;
  std::optional<std::string> first_page;
  bool refereed = false;  // kind == eprint implies false
  RecordKind kind = RecordKind::other;
  std::set<std::string> source_tags;
  bool has_reference_list = false;  // maintained by the store
  Date ingest_date;

  bool operator==(const BibRecord&) const = default;
};

enum class LinkOrigin { explicit_link, matched };

struct EprintLink {
  Bibcode eprint;
  Bibcode published;
  LinkOrigin origin = LinkOrigin::explicit_link;
  std::optional<double> match_score;

  bool operator==(const EprintLink&) const = default;
};

struct SearchFilter {
  std::optional<int> year_min;
  std::optional<int> year_max;
  bool refereed_only = false;
  std::optional<RecordKind> kind;
};

enum class AddOutcome { inserted, updated };

struct MatchConfig {
  double title_threshold = 0.7;  // Jaccard over case-folded title tokens
  int year_window = 1;
};

struct MatchAmbiguity {
  Bibcode eprint;
  std::vector<Bibcode> candidates;  // equal top score
  double score = 0.0;
};

struct MatchReport {
  std::vector<EprintLink> links;         // newly created, eprint ascending
  std::vector<MatchAmbiguity> ambiguous; // ties, no link created
};

/// Canonical record store. Single writer, many readers: mutators are
/// serialized, reads take a shared lock and see a consistent snapshot.
class RecordStore {
 public:
  RecordStore() = default;
  RecordStore(RecordStore&& other) noexcept;
  RecordStore& operator=(RecordStore&& other) noexcept;

  Result<AddOutcome> add_record(const BibRecord& record);
  std::optional<BibRecord> find_by_bibcode(const Bibcode& code) const;

  /// Bibcodes of records whose title/abstract/keywords contain all terms
  /// (case-folded whole tokens, AND semantics), ascending bibcode order.
  Result<std::vector<Bibcode>> search_records(const std::vector<std::string>& terms,
                                              const SearchFilter& filter = {}) const;

  Result<EprintLink> link_eprint(const Bibcode& eprint, const Bibcode& published);

  /// Links every unlinked eprint whose best non-eprint candidate passes the
  /// surname/year/title tests. Explicit links are never overwritten; exact
  /// score ties produce no link and are reported.
  MatchReport match_eprints(const MatchConfig& config = {},
                            ExecutionMode mode = default_execution_mode());

  /// Marks the citing side of ingested reference data; keeps
  /// has_reference_list consistent for records added later.
  void note_references_ingested(const Bibcode& citing);

  std::optional<EprintLink> link_for_eprint(const Bibcode& eprint) const;
  std::vector<EprintLink> all_links() const;
  void restore_link(const EprintLink& link);  // used by persistence loads

  std::vector<Bibcode> all_bibcodes() const;
  size_t size() const;

  /// Deterministic serialization of store contents (records and links),
  /// used for digests and persistence.
  std::string serialize() const;

 private:
  bool record_matches(const BibRecord& r, const std::vector<std::vector<std::string>>& term_tokens,
                      const SearchFilter& filter) const;

  mutable std::shared_mutex mutex_;
  std::map<Bibcode, BibRecord> records_;
  std::map<Bibcode, EprintLink> links_;          // keyed by eprint
  std::set<Bibcode> with_reference_data_;
};

// Line-oriented tagged ingest format: one "%X value" line per field,
// records separated by blank lines. Tags: %R bibcode, %T title, %A author
// (repeatable), %D year, %J venue, %V volume, %P first page, %F refereed
// 0/1, %E kind, %S source tag (repeatable), %K keyword (repeatable),
// %B abstract, %I ingest date, %X published bibcode (explicit eprint link).
struct RecordIngestStats {
  size_t inserted = 0;
  size_t updated = 0;
  size_t links = 0;
  std::vector<std::string> errors;  // per-block diagnostics, ingest continues
};

Result<RecordIngestStats> ingest_records_text(RecordStore& store, std::string_view text,
                                              const Date& default_ingest_date);
std::string render_records_text(const RecordStore& store);

// Link table: eprint, published, origin, score ("-" when absent).
std::string render_links(const std::vector<EprintLink>& links);
Result<std::vector<EprintLink>> parse_links(std::string_view text);

}  // namespace bibcite::corpus
