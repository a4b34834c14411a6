#include "bibcite/citegraph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bibcite::citegraph {

// ---------------------------------------------------------------------------
// E-print policy
// ---------------------------------------------------------------------------

std::vector<resolver::ResolvedReference> apply_eprint_policy(
    const std::vector<resolver::ResolvedReference>& resolved, const corpus::RecordStore& store,
    const std::vector<corpus::EprintLink>& links, const PolicyConfig& policy,
    std::vector<PolicyAction>* log) {
  std::unordered_map<std::string, Bibcode> link_target;
  for (const auto& link : links) link_target.emplace(link.eprint.str(), link.published);

  // "The published paper has its own references" is judged over the whole
  // input table, so late-arriving publisher data displaces preprint
  // references on the next rebuild.
  std::unordered_set<std::string> has_own_refs;
  for (const auto& pair : resolved) has_own_refs.insert(pair.citing.str());

  auto emit = [&](std::vector<PolicyAction>* sink, std::string rule,
                  const resolver::ResolvedReference& pair, std::optional<Bibcode> target) {
    if (sink) sink->push_back(PolicyAction{std::move(rule), pair.citing, pair.cited, target});
  };

  std::vector<resolver::ResolvedReference> out;
  out.reserve(resolved.size());
  std::set<std::pair<std::string, std::string>> reattributed_keys;

  for (const auto& pair : resolved) {
    auto record = store.find_by_bibcode(pair.citing);
    if (!record || record->kind != corpus::RecordKind::eprint) {
      out.push_back(pair);
      continue;
    }

    auto linked = link_target.find(pair.citing.str());
    if (linked != link_target.end()) {
      const Bibcode& published = linked->second;
      if (has_own_refs.count(published.str())) {
        emit(log, "replaced-by-published", pair, published);
        continue;
      }
      if (pair.cited == published) {
        emit(log, "reattribution-self-loop", pair, published);
        continue;
      }
      if (!reattributed_keys.insert({published.str(), pair.cited.str()}).second) {
        emit(log, "reattribution-duplicate", pair, published);
        continue;
      }
      resolver::ResolvedReference moved = pair;
      moved.citing = published;
      moved.provenance = "reattributed-from:" + pair.citing.str();
      emit(log, "attributed-to-published", pair, published);
      out.push_back(std::move(moved));
      continue;
    }

    // Unlinked preprint: strictly older than the window contributes nothing.
    if (policy.as_of.days_since(record->ingest_date) > policy.staleness_days) {
      emit(log, "stale-preprint", pair, std::nullopt);
      continue;
    }
    out.push_back(pair);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Index construction
// ---------------------------------------------------------------------------

size_t CitationIndex::pair_count() const {
  size_t n = 0;
  for (const auto& [code, refs] : citing_to_cited) n += refs.size();
  return n;
}

namespace {

void sort_unique(std::vector<Bibcode>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void build_maps(const std::vector<std::pair<Bibcode, Bibcode>>& pairs, CitationIndex& index,
                ExecutionMode mode) {
#ifdef _OPENMP
  const bool parallel = mode == ExecutionMode::parallel && pairs.size() > 1024;
#else
  const bool parallel = false;
  (void)mode;
#endif

  if (!parallel) {
    for (const auto& [citing, cited] : pairs) {
      index.citing_to_cited[citing].push_back(cited);
      index.cited_to_citing[cited].push_back(citing);
    }
  } else {
    using LocalMap = std::map<Bibcode, std::vector<Bibcode>>;
    int threads = available_threads();
    std::vector<LocalMap> fwd(threads), rev(threads);
#pragma omp parallel num_threads(threads)
    {
#ifdef _OPENMP
      int tid = omp_get_thread_num();
#else
      int tid = 0;
#endif
      LocalMap& f = fwd[tid];
      LocalMap& r = rev[tid];
#pragma omp for schedule(static)
      for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(pairs.size()); ++i) {
        f[pairs[size_t(i)].first].push_back(pairs[size_t(i)].second);
        r[pairs[size_t(i)].second].push_back(pairs[size_t(i)].first);
      }
    }
    // Deterministic merge: content is a set union, independent of chunking.
    for (int t = 0; t < threads; ++t) {
      for (auto& [code, values] : fwd[t]) {
        auto& dst = index.citing_to_cited[code];
        dst.insert(dst.end(), values.begin(), values.end());
      }
      for (auto& [code, values] : rev[t]) {
        auto& dst = index.cited_to_citing[code];
        dst.insert(dst.end(), values.begin(), values.end());
      }
    }
  }

  for (auto& [code, values] : index.citing_to_cited) sort_unique(values);
  for (auto& [code, values] : index.cited_to_citing) sort_unique(values);
}

}  // namespace

CitationIndex rebuild_citation_index(const std::vector<resolver::ResolvedReference>& resolved,
                                     const corpus::RecordStore& store,
                                     const std::vector<corpus::EprintLink>& links,
                                     const PolicyConfig& policy, ExecutionMode mode,
                                     std::vector<PolicyAction>* log) {
  CitationIndex index;
  index.build_date = policy.as_of;
  index.policy = policy;

  auto kept = apply_eprint_policy(resolved, store, links, policy, log);

  std::vector<std::pair<Bibcode, Bibcode>> pairs;
  pairs.reserve(kept.size());
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : kept) {
    if (r.citing == r.cited) continue;
    if (!seen.insert({r.citing.str(), r.cited.str()}).second) continue;  // sources overlap
    pairs.emplace_back(r.citing, r.cited);
  }

  build_maps(pairs, index, mode);
  return index;
}

std::vector<Bibcode> citations_of(const CitationIndex& index, const Bibcode& cited) {
  auto it = index.cited_to_citing.find(cited);
  if (it == index.cited_to_citing.end()) return {};
  return it->second;
}

std::vector<Bibcode> references_of(const CitationIndex& index, const Bibcode& citing) {
  auto it = index.citing_to_cited.find(citing);
  if (it == index.citing_to_cited.end()) return {};
  return it->second;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

std::string unresolved_key(const resolver::UnresolvedReference& item) {
  if (!item.best_guess) return "unparsed";
  const auto& guess = *item.best_guess;
  std::string surname =
      guess.authors.empty() ? "-" : guess.authors.front().normalized_surname();
  std::string year = guess.year ? std::to_string(*guess.year) : "-";
  std::string venue =
      guess.venue_token ? resolver::VenueAbbrevTable::canonical_alias(*guess.venue_token) : "-";
  if (surname == "-" && year == "-" && venue == "-") return "unparsed";
  return surname + " " + year + " " + venue;
}

Result<std::vector<UnresolvedGroup>> unresolved_report(
    const std::vector<resolver::UnresolvedReference>& unresolved, int top_k) {
  if (top_k < 1) return Error{"top_k must be >= 1"};
  std::map<std::string, size_t> groups;
  for (const auto& item : unresolved) ++groups[unresolved_key(item)];

  std::vector<UnresolvedGroup> rows;
  rows.reserve(groups.size());
  for (const auto& [key, count] : groups) rows.push_back(UnresolvedGroup{key, count});
  std::stable_sort(rows.begin(), rows.end(), [](const UnresolvedGroup& a, const UnresolvedGroup& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.key < b.key;
  });
  if (rows.size() > size_t(top_k)) rows.resize(size_t(top_k));
  return rows;
}

std::vector<SourceCoverageRow> source_coverage_report(
    const std::map<std::string, resolver::SourceCount>& counts) {
  std::vector<SourceCoverageRow> rows;
  rows.reserve(counts.size());
  for (const auto& [tag, c] : counts) {
    SourceCoverageRow row;
    row.source_tag = tag;
    row.attempted = c.attempted;
    row.resolved = c.resolved;
    if (c.attempted == 0) {
      row.rate = "n/a";
    } else {
      long pct = std::lround(100.0 * double(c.resolved) / double(c.attempted));
      row.rate = std::to_string(pct) + "%";
    }
    if (c.first_date && c.last_date) {
      row.date_range =
          std::to_string(c.first_date->year()) + "-" + std::to_string(c.last_date->year());
    } else {
      row.date_range = "-";
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string render_source_coverage(const std::vector<SourceCoverageRow>& rows) {
  std::ostringstream out;
  out << "source\tattempted\tresolved\trate\tdate_range\n";
  for (const auto& r : rows)
    out << r.source_tag << "\t" << r.attempted << "\t" << r.resolved << "\t" << r.rate << "\t"
        << r.date_range << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Export / import
// ---------------------------------------------------------------------------

std::string render_index_pairs(const CitationIndex& index) {
  std::ostringstream out;
  for (const auto& [citing, refs] : index.citing_to_cited)
    for (const auto& cited : refs) out << citing.str() << "\t" << cited.str() << "\n";
  return out.str();
}

Result<CitationIndex> parse_index_pairs(std::string_view text) {
  CitationIndex index;
  std::vector<std::pair<Bibcode, Bibcode>> pairs;
  size_t lineno = 0;
  for (const std::string& raw : split_lines(text)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2)
      return Error{"index pairs line " + std::to_string(lineno) + ": expected 2 columns"};
    auto citing = Bibcode::parse(fields[0]);
    if (!citing.ok()) return citing.error();
    auto cited = Bibcode::parse(fields[1]);
    if (!cited.ok()) return cited.error();
    pairs.emplace_back(citing.value(), cited.value());
  }
  build_maps(pairs, index, ExecutionMode::serial);
  return index;
}

std::string render_index_manifest(const CitationIndex& index,
                                  const std::map<std::string, std::string>& input_digests) {
  nlohmann::json j;
  j["as_of"] = index.policy.as_of.to_string();
  j["staleness_days"] = index.policy.staleness_days;
  j["build_date"] = index.build_date.to_string();
  j["pairs"] = index.pair_count();
  j["inputs"] = nlohmann::json::object();
  for (const auto& [name, digest] : input_digests) j["inputs"][name] = digest;
  return j.dump(2) + "\n";
}

Result<CitationIndex> load_index(std::string_view pairs_text, std::string_view manifest_text) {
  auto parsed = parse_index_pairs(pairs_text);
  if (!parsed.ok()) return parsed.error();
  CitationIndex index = std::move(parsed).value();

  nlohmann::json manifest = nlohmann::json::parse(manifest_text, nullptr, false);
  if (manifest.is_discarded()) return Error{"index manifest is not valid JSON"};
  if (manifest.contains("as_of")) {
    auto d = Date::parse(manifest["as_of"].get<std::string>());
    if (!d.ok()) return d.error();
    index.policy.as_of = d.value();
  }
  if (manifest.contains("staleness_days"))
    index.policy.staleness_days = manifest["staleness_days"].get<int>();
  if (manifest.contains("build_date")) {
    auto d = Date::parse(manifest["build_date"].get<std::string>());
    if (!d.ok()) return d.error();
    index.build_date = d.value();
  }
  if (manifest.contains("pairs") && manifest["pairs"].get<size_t>() != index.pair_count())
    return Error{"index manifest pair count does not match the pair list"};
  return index;
}

}  // namespace bibcite::citegraph
