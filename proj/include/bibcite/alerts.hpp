#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "bibcite/citegraph.hpp"
#include "bibcite/corpus.hpp"
#include "bibcite/metrics.hpp"

namespace bibcite::alerts {

struct StoredQuery {
  std::string subscriber_id;
  std::set<Bibcode> tracked_bibcodes;
  std::vector<corpus::AuthorName> followed_authors;
  std::vector<std::string> topic_terms;
  Date last_run;

  bool has_interest() const {
    return !tracked_bibcodes.empty() || !followed_authors.empty() || !topic_terms.empty();
  }
};

struct AlertBatch {
  std::string subscriber_id;
  Date run_date;
  std::vector<std::pair<Bibcode, Bibcode>> new_citations;  // (citing, tracked)
  std::vector<Bibcode> new_author_papers;
  std::vector<metrics::RankedPaper> topic_papers_ranked;

  bool empty() const {
    return new_citations.empty() && new_author_papers.empty() && topic_papers_ranked.empty();
  }
};

class QueryRegistry {
 public:
  /// Rejects queries with no interests; re-registration replaces.
  Result<bool> register_query(StoredQuery query);
  std::vector<StoredQuery> all() const;  // subscriber_id ascending
  void set_last_run(const std::string& subscriber_id, const Date& run_date);
  size_t size() const { return queries_.size(); }

  // Same %-tagged block convention as the record ingest file:
  // %Q subscriber, %C tracked bibcode*, %A followed author*, %T topic term*,
  // %L last run date.
  static Result<QueryRegistry> parse(std::string_view text);
  std::string render() const;

 private:
  std::map<std::string, StoredQuery> queries_;
};

/// Diffs the two index snapshots and the store's ingest window against each
/// stored query. Batches with nothing to report are omitted; every
/// evaluated query has last_run advanced to run_date.
std::vector<AlertBatch> run_alerts(QueryRegistry& registry,
                                   const citegraph::CitationIndex& index_before,
                                   const citegraph::CitationIndex& index_after,
                                   const corpus::RecordStore& store, const Date& run_date);

std::string render_alert_text(const AlertBatch& batch);

}  // namespace bibcite::alerts
