#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bibcite/citegraph.hpp"
#include "bibcite/corpus.hpp"

namespace bibcite::metrics {

struct CitationFilter {
  bool refereed_only = false;
  std::optional<int> year_min;  // bounds apply to the citing paper's year
  std::optional<int> year_max;
  bool exclude_self = false;
  std::vector<corpus::AuthorName> base_authors;  // required when exclude_self

  Result<bool> validate() const;
};

struct FilteredCitations {
  std::map<Bibcode, std::vector<Bibcode>> per_paper;  // surviving citers per target
  size_t total = 0;  // sum of per-target counts; shared citers count per target
  std::vector<Bibcode> unknown_targets;  // not in the store; reported, not fatal
};

FilteredCitations filtered_citations(const citegraph::CitationIndex& index,
                                     const corpus::RecordStore& store,
                                     const std::vector<Bibcode>& targets,
                                     const CitationFilter& filter);

/// The per-record predicate behind filtered_citations, usable for any
/// bibcode list (reference listings apply the same flags).
bool record_passes_filter(const Bibcode& code, const corpus::RecordStore& store,
                          const CitationFilter& filter);

struct RankedPaper {
  Bibcode bibcode;
  long metric_value = 0;
  int rank = 1;  // 1..n, non-increasing value, ties by bibcode ascending

  bool operator==(const RankedPaper&) const = default;
};

struct Ranking {
  std::vector<RankedPaper> papers;
  size_t total = 0;
};

Ranking rank_by_citations(const citegraph::CitationIndex& index,
                          const corpus::RecordStore& store, const std::vector<Bibcode>& set,
                          const CitationFilter& filter);

/// Largest N such that at least N papers of the set have >= N filtered
/// citations each; 0 for an empty set.
int h_index(const citegraph::CitationIndex& index, const corpus::RecordStore& store,
            const std::vector<Bibcode>& set, const CitationFilter& filter);

/// Count-profile core of h_index.
int h_index_from_counts(std::vector<long> counts);

/// Papers most cited by the set: X ranked by the number of distinct set
/// members whose reference list contains X. Top-k, ties by bibcode.
std::vector<std::pair<Bibcode, long>> most_useful(const citegraph::CitationIndex& index,
                                                  const std::vector<Bibcode>& set, int k);

/// Papers citing the most set members: C ranked by the number of distinct
/// set members C cites. Top-k, ties by bibcode.
std::vector<std::pair<Bibcode, long>> most_instructive(const citegraph::CitationIndex& index,
                                                       const std::vector<Bibcode>& set, int k);

std::string render_ranking(const Ranking& ranking);
std::string render_pairs_ranking(const std::vector<std::pair<Bibcode, long>>& rows);

}  // namespace bibcite::metrics
