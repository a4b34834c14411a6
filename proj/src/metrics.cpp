#include "bibcite/metrics.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace bibcite::metrics {

Result<bool> CitationFilter::validate() const {
  if (year_min && year_max && *year_min > *year_max)
    return Error{"year_min must not exceed year_max"};
  if (exclude_self && base_authors.empty())
    return Error{"exclude_self requires a non-empty base author list"};
  return true;
}

namespace {

// Shared (surname, first initial) tuple; a missing initial on either side
// matches any initial for the same surname.
bool shares_author(const std::vector<corpus::AuthorName>& a,
                   const std::vector<corpus::AuthorName>& b) {
  for (const auto& x : a) {
    const std::string xs = x.normalized_surname();
    const char xi = x.first_initial();
    for (const auto& y : b) {
      if (y.normalized_surname() != xs) continue;
      const char yi = y.first_initial();
      if (xi == 0 || yi == 0 || xi == yi) return true;
    }
  }
  return false;
}

bool citer_passes(const Bibcode& citer, const corpus::RecordStore& store,
                  const CitationFilter& filter) {
  if (!filter.refereed_only && !filter.year_min && !filter.year_max && !filter.exclude_self)
    return true;
  auto record = store.find_by_bibcode(citer);
  if (filter.refereed_only && (!record || !record->refereed)) return false;
  if (filter.year_min && (!record || record->pub_year < *filter.year_min)) return false;
  if (filter.year_max && (!record || record->pub_year > *filter.year_max)) return false;
  if (filter.exclude_self && record && shares_author(record->authors, filter.base_authors))
    return false;
  return true;
}

}  // namespace

bool record_passes_filter(const Bibcode& code, const corpus::RecordStore& store,
                          const CitationFilter& filter) {
  return citer_passes(code, store, filter);
}

namespace {

std::vector<Bibcode> unique_in_order(const std::vector<Bibcode>& set) {
  std::vector<Bibcode> out;
  std::set<Bibcode> seen;
  for (const auto& b : set)
    if (seen.insert(b).second) out.push_back(b);
  return out;
}

std::vector<std::pair<Bibcode, long>> top_k(std::map<Bibcode, long>&& counts, int k) {
  std::vector<std::pair<Bibcode, long>> rows(counts.begin(), counts.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (k >= 0 && rows.size() > size_t(k)) rows.resize(size_t(k));
  return rows;
}

}  // namespace

FilteredCitations filtered_citations(const citegraph::CitationIndex& index,
                                     const corpus::RecordStore& store,
                                     const std::vector<Bibcode>& targets,
                                     const CitationFilter& filter) {
  FilteredCitations result;
  for (const Bibcode& target : unique_in_order(targets)) {
    if (!store.find_by_bibcode(target)) result.unknown_targets.push_back(target);
    std::vector<Bibcode> kept;
    for (const Bibcode& citer : citegraph::citations_of(index, target))
      if (citer_passes(citer, store, filter)) kept.push_back(citer);
    result.total += kept.size();
    result.per_paper.emplace(target, std::move(kept));
  }
  return result;
}

Ranking rank_by_citations(const citegraph::CitationIndex& index,
                          const corpus::RecordStore& store, const std::vector<Bibcode>& set,
                          const CitationFilter& filter) {
  FilteredCitations filtered = filtered_citations(index, store, set, filter);

  Ranking ranking;
  ranking.total = filtered.total;
  for (const auto& [code, citers] : filtered.per_paper)
    ranking.papers.push_back(RankedPaper{code, long(citers.size()), 0});
  std::stable_sort(ranking.papers.begin(), ranking.papers.end(),
                   [](const RankedPaper& a, const RankedPaper& b) {
                     if (a.metric_value != b.metric_value) return a.metric_value > b.metric_value;
                     return a.bibcode < b.bibcode;
                   });
  for (size_t i = 0; i < ranking.papers.size(); ++i) ranking.papers[i].rank = int(i) + 1;
  return ranking;
}

int h_index_from_counts(std::vector<long> counts) {
  std::sort(counts.begin(), counts.end(), std::greater<long>());
  int h = 0;
  for (size_t i = 0; i < counts.size(); ++i)
    if (counts[i] >= long(i) + 1) h = int(i) + 1;
  return h;
}

int h_index(const citegraph::CitationIndex& index, const corpus::RecordStore& store,
            const std::vector<Bibcode>& set, const CitationFilter& filter) {
  FilteredCitations filtered = filtered_citations(index, store, set, filter);
  std::vector<long> counts;
  counts.reserve(filtered.per_paper.size());
  for (const auto& [code, citers] : filtered.per_paper) counts.push_back(long(citers.size()));
  return h_index_from_counts(std::move(counts));
}

std::vector<std::pair<Bibcode, long>> most_useful(const citegraph::CitationIndex& index,
                                                  const std::vector<Bibcode>& set, int k) {
  std::map<Bibcode, long> counts;
  for (const Bibcode& member : unique_in_order(set))
    for (const Bibcode& referenced : citegraph::references_of(index, member))
      ++counts[referenced];  // reference lists are sets: one vote per member
  return top_k(std::move(counts), k);
}

std::vector<std::pair<Bibcode, long>> most_instructive(const citegraph::CitationIndex& index,
                                                       const std::vector<Bibcode>& set, int k) {
  std::map<Bibcode, long> counts;
  for (const Bibcode& member : unique_in_order(set))
    for (const Bibcode& citer : citegraph::citations_of(index, member)) ++counts[citer];
  return top_k(std::move(counts), k);
}

std::string render_ranking(const Ranking& ranking) {
  std::ostringstream out;
  for (const auto& p : ranking.papers)
    out << p.rank << "\t" << p.bibcode.str() << "\t" << p.metric_value << "\n";
  out << "total\t" << ranking.total << "\n";
  return out.str();
}

std::string render_pairs_ranking(const std::vector<std::pair<Bibcode, long>>& rows) {
  std::ostringstream out;
  int rank = 1;
  for (const auto& [code, value] : rows) out << rank++ << "\t" << code.str() << "\t" << value << "\n";
  return out.str();
}

}  // namespace bibcite::metrics
