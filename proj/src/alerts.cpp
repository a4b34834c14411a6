#include "bibcite/alerts.hpp"

#include <algorithm>
#include <sstream>

namespace bibcite::alerts {

Result<bool> QueryRegistry::register_query(StoredQuery query) {
  if (trim(query.subscriber_id).empty()) return Error{"subscriber id is empty"};
  if (!query.has_interest())
    return Error{"stored query for '" + query.subscriber_id +
                 "' must track bibcodes, authors, or topic terms"};
  queries_.insert_or_assign(query.subscriber_id, std::move(query));
  return true;
}

std::vector<StoredQuery> QueryRegistry::all() const {
  std::vector<StoredQuery> out;
  out.reserve(queries_.size());
  for (const auto& [id, q] : queries_) out.push_back(q);
  return out;
}

void QueryRegistry::set_last_run(const std::string& subscriber_id, const Date& run_date) {
  auto it = queries_.find(subscriber_id);
  if (it != queries_.end()) it->second.last_run = run_date;
}

Result<QueryRegistry> QueryRegistry::parse(std::string_view text) {
  QueryRegistry registry;
  StoredQuery current;
  bool open = false;
  size_t lineno = 0;

  auto flush = [&]() -> Result<bool> {
    if (!open) return true;
    auto added = registry.register_query(current);
    if (!added.ok()) return added.error();
    current = StoredQuery{};
    open = false;
    return true;
  };

  for (const std::string& raw : split_lines(text)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty()) {
      auto flushed = flush();
      if (!flushed.ok()) return flushed.error();
      continue;
    }
    if (line[0] == '#') continue;
    if (line.size() < 2 || line[0] != '%')
      return Error{"stored queries line " + std::to_string(lineno) + ": expected '%X value'"};
    char tag = line[1];
    std::string value(trim(line.substr(2)));
    switch (tag) {
      case 'Q': {
        auto flushed = flush();
        if (!flushed.ok()) return flushed.error();
        current.subscriber_id = value;
        open = true;
        break;
      }
      case 'C': {
        auto code = Bibcode::parse(value);
        if (!code.ok())
          return Error{"stored queries line " + std::to_string(lineno) + ": " +
                       code.error().message};
        current.tracked_bibcodes.insert(code.value());
        break;
      }
      case 'A': current.followed_authors.push_back(corpus::parse_author(value)); break;
      case 'T': current.topic_terms.push_back(value); break;
      case 'L': {
        auto date = Date::parse(value);
        if (!date.ok())
          return Error{"stored queries line " + std::to_string(lineno) + ": " +
                       date.error().message};
        current.last_run = date.value();
        break;
      }
      default:
        return Error{"stored queries line " + std::to_string(lineno) + ": unknown tag '%" +
                     std::string(1, tag) + "'"};
    }
  }
  auto flushed = flush();
  if (!flushed.ok()) return flushed.error();
  return registry;
}

std::string QueryRegistry::render() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& [id, q] : queries_) {
    if (!first) out << "\n";
    first = false;
    out << "%Q " << id << "\n";
    for (const auto& code : q.tracked_bibcodes) out << "%C " << code.str() << "\n";
    for (const auto& a : q.followed_authors) {
      out << "%A " << a.surname;
      if (!a.initials.empty()) out << ", " << a.initials;
      out << "\n";
    }
    for (const auto& t : q.topic_terms) out << "%T " << t << "\n";
    out << "%L " << q.last_run.to_string() << "\n";
  }
  return out.str();
}

namespace {

bool author_followed(const corpus::BibRecord& record,
                     const std::vector<corpus::AuthorName>& followed) {
  for (const auto& f : followed) {
    const std::string fs = f.normalized_surname();
    const char fi = f.first_initial();
    for (const auto& a : record.authors) {
      if (a.normalized_surname() != fs) continue;
      const char ai = a.first_initial();
      if (fi == 0 || ai == 0 || fi == ai) return true;
    }
  }
  return false;
}

bool matches_topic(const corpus::BibRecord& record, const std::vector<std::string>& terms) {
  std::vector<std::string> have = tokenize(record.title);
  if (record.abstract) {
    auto more = tokenize(*record.abstract);
    have.insert(have.end(), more.begin(), more.end());
  }
  for (const auto& k : record.keywords) {
    auto more = tokenize(k);
    have.insert(have.end(), more.begin(), more.end());
  }
  std::set<std::string> have_set(have.begin(), have.end());
  for (const auto& term : terms)
    for (const auto& token : tokenize(term))
      if (!have_set.count(token)) return false;
  return true;
}

}  // namespace

std::vector<AlertBatch> run_alerts(QueryRegistry& registry,
                                   const citegraph::CitationIndex& index_before,
                                   const citegraph::CitationIndex& index_after,
                                   const corpus::RecordStore& store, const Date& run_date) {
  std::vector<AlertBatch> batches;

  for (const StoredQuery& query : registry.all()) {
    AlertBatch batch;
    batch.subscriber_id = query.subscriber_id;
    batch.run_date = run_date;

    for (const Bibcode& tracked : query.tracked_bibcodes) {
      auto before = citegraph::citations_of(index_before, tracked);
      for (const Bibcode& citer : citegraph::citations_of(index_after, tracked))
        if (!std::binary_search(before.begin(), before.end(), citer))
          batch.new_citations.emplace_back(citer, tracked);
    }
    std::sort(batch.new_citations.begin(), batch.new_citations.end());

    if (!query.followed_authors.empty() || !query.topic_terms.empty()) {
      for (const Bibcode& code : store.all_bibcodes()) {
        auto record = store.find_by_bibcode(code);
        if (!record) continue;
        if (record->ingest_date <= query.last_run || record->ingest_date > run_date) continue;
        if (!query.followed_authors.empty() && author_followed(*record, query.followed_authors))
          batch.new_author_papers.push_back(code);
        if (!query.topic_terms.empty() && matches_topic(*record, query.topic_terms))
          batch.topic_papers_ranked.push_back(
              metrics::RankedPaper{code, long(citegraph::citations_of(index_after, code).size()),
                                   0});
      }
      std::stable_sort(batch.topic_papers_ranked.begin(), batch.topic_papers_ranked.end(),
                       [](const metrics::RankedPaper& a, const metrics::RankedPaper& b) {
                         if (a.metric_value != b.metric_value)
                           return a.metric_value > b.metric_value;
                         return a.bibcode < b.bibcode;
                       });
      for (size_t i = 0; i < batch.topic_papers_ranked.size(); ++i)
        batch.topic_papers_ranked[i].rank = int(i) + 1;
    }

    registry.set_last_run(query.subscriber_id, run_date);
    if (!batch.empty()) batches.push_back(std::move(batch));
  }
  return batches;
}

std::string render_alert_text(const AlertBatch& batch) {
  std::ostringstream out;
  out << "== " << batch.subscriber_id << " (" << batch.run_date.to_string() << ")\n";
  if (!batch.new_citations.empty()) {
    out << "new citations:\n";
    for (const auto& [citing, cited] : batch.new_citations)
      out << "  " << citing.str() << " -> " << cited.str() << "\n";
  }
  if (!batch.new_author_papers.empty()) {
    out << "new papers by followed authors:\n";
    for (const auto& code : batch.new_author_papers) out << "  " << code.str() << "\n";
  }
  if (!batch.topic_papers_ranked.empty()) {
    out << "new topic papers (by citations):\n";
    for (const auto& p : batch.topic_papers_ranked)
      out << "  " << p.rank << "\t" << p.bibcode.str() << "\t" << p.metric_value << "\n";
  }
  return out.str();
}

}  // namespace bibcite::alerts
