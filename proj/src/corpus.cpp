#include "bibcite/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <unordered_set>

namespace bibcite::corpus {

// ---------------------------------------------------------------------------
// Authors
// ---------------------------------------------------------------------------

std::string AuthorName::normalized_surname() const {
  return normalize_text(trim(surname));
}

char AuthorName::first_initial() const {
  std::string norm = normalize_text(initials);
  for (unsigned char c : norm)
    if (std::isalpha(c)) return char(c);
  return 0;
}

AuthorName parse_author(std::string_view text) {
  AuthorName a;
  size_t comma = text.find(',');
  if (comma == std::string_view::npos) {
    a.surname = std::string(trim(text));
  } else {
    a.surname = std::string(trim(text.substr(0, comma)));
    a.initials = std::string(trim(text.substr(comma + 1)));
  }
  return a;
}

std::string to_string(RecordKind k) {
  switch (k) {
    case RecordKind::journal: return "journal";
    case RecordKind::eprint: return "eprint";
    case RecordKind::other: return "other";
  }
  return "other";
}

std::optional<RecordKind> record_kind_from_string(std::string_view s) {
  if (s == "journal") return RecordKind::journal;
  if (s == "eprint") return RecordKind::eprint;
  if (s == "other") return RecordKind::other;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// RecordStore
// ---------------------------------------------------------------------------

namespace {

Result<bool> check_record(const BibRecord& r) {
  if (r.pub_year != r.bibcode.year())
    return Error{"record " + r.bibcode.str() + ": pub_year " + std::to_string(r.pub_year) +
                 " does not equal bibcode year " + std::to_string(r.bibcode.year())};
  if (r.kind == RecordKind::eprint && r.refereed)
    return Error{"record " + r.bibcode.str() + ": eprint records cannot be refereed"};
  for (const auto& a : r.authors)
    if (trim(a.surname).empty())
      return Error{"record " + r.bibcode.str() + ": author surname empty"};
  return true;
}

std::vector<std::string> record_tokens(const BibRecord& r) {
  std::vector<std::string> tokens = tokenize(r.title);
  if (r.abstract) {
    auto more = tokenize(*r.abstract);
    tokens.insert(tokens.end(), more.begin(), more.end());
  }
  for (const auto& k : r.keywords) {
    auto more = tokenize(k);
    tokens.insert(tokens.end(), more.begin(), more.end());
  }
  return tokens;
}

}  // namespace

RecordStore::RecordStore(RecordStore&& other) noexcept {
  std::unique_lock lock(other.mutex_);
  records_ = std::move(other.records_);
  links_ = std::move(other.links_);
  with_reference_data_ = std::move(other.with_reference_data_);
}

RecordStore& RecordStore::operator=(RecordStore&& other) noexcept {
  if (this != &other) {
    std::scoped_lock lock(mutex_, other.mutex_);
    records_ = std::move(other.records_);
    links_ = std::move(other.links_);
    with_reference_data_ = std::move(other.with_reference_data_);
  }
  return *this;
}

Result<AddOutcome> RecordStore::add_record(const BibRecord& record) {
  auto check = check_record(record);
  if (!check.ok()) return check.error();
  std::unique_lock lock(mutex_);
  BibRecord stored = record;
  stored.has_reference_list = with_reference_data_.count(record.bibcode) > 0;
  auto [it, inserted] = records_.insert_or_assign(record.bibcode, std::move(stored));
  return inserted ? AddOutcome::inserted : AddOutcome::updated;
}

std::optional<BibRecord> RecordStore::find_by_bibcode(const Bibcode& code) const {
  std::shared_lock lock(mutex_);
  auto it = records_.find(code);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

bool RecordStore::record_matches(const BibRecord& r,
                                 const std::vector<std::vector<std::string>>& term_tokens,
                                 const SearchFilter& filter) const {
  if (filter.refereed_only && !r.refereed) return false;
  if (filter.kind && r.kind != *filter.kind) return false;
  if (filter.year_min && r.pub_year < *filter.year_min) return false;
  if (filter.year_max && r.pub_year > *filter.year_max) return false;
  auto tokens = record_tokens(r);
  std::unordered_set<std::string> have(tokens.begin(), tokens.end());
  for (const auto& group : term_tokens)
    for (const auto& t : group)
      if (!have.count(t)) return false;
  return true;
}

Result<std::vector<Bibcode>> RecordStore::search_records(const std::vector<std::string>& terms,
                                                         const SearchFilter& filter) const {
  std::vector<std::vector<std::string>> term_tokens;
  for (const auto& term : terms) {
    auto toks = tokenize(term);
    if (!toks.empty()) term_tokens.push_back(std::move(toks));
  }
  if (term_tokens.empty()) return Error{"search requires at least one non-empty term"};

  std::shared_lock lock(mutex_);
  std::vector<Bibcode> out;
  for (const auto& [code, record] : records_)
    if (record_matches(record, term_tokens, filter)) out.push_back(code);
  return out;
}

Result<EprintLink> RecordStore::link_eprint(const Bibcode& eprint, const Bibcode& published) {
  std::unique_lock lock(mutex_);
  auto e = records_.find(eprint);
  if (e == records_.end()) return Error{"unknown eprint bibcode " + eprint.str()};
  auto p = records_.find(published);
  if (p == records_.end()) return Error{"unknown published bibcode " + published.str()};
  if (e->second.kind != RecordKind::eprint)
    return Error{"link source " + eprint.str() + " is not an eprint record"};
  if (p->second.kind == RecordKind::eprint)
    return Error{"link target " + published.str() + " must not be an eprint record"};
  EprintLink link{eprint, published, LinkOrigin::explicit_link, std::nullopt};
  links_.insert_or_assign(eprint, link);
  return link;
}

MatchReport RecordStore::match_eprints(const MatchConfig& config, ExecutionMode mode) {
  std::unique_lock lock(mutex_);

  std::vector<const BibRecord*> pending;
  std::vector<const BibRecord*> candidates;
  for (const auto& [code, record] : records_) {
    if (record.kind == RecordKind::eprint) {
      if (!links_.count(code)) pending.push_back(&record);
    } else {
      candidates.push_back(&record);
    }
  }

  struct Verdict {
    std::optional<EprintLink> link;
    std::optional<MatchAmbiguity> ambiguity;
  };
  std::vector<Verdict> verdicts(pending.size());

  const bool parallel = mode == ExecutionMode::parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(pending.size()); ++i) {
    const BibRecord& ep = *pending[size_t(i)];
    if (ep.authors.empty()) continue;
    const std::string ep_surname = ep.authors.front().normalized_surname();
    const auto ep_tokens = tokenize(ep.title);

    double best = -1.0;
    std::vector<const BibRecord*> best_records;
    for (const BibRecord* cand : candidates) {
      if (cand->authors.empty()) continue;
      if (cand->authors.front().normalized_surname() != ep_surname) continue;
      if (std::abs(cand->pub_year - ep.pub_year) > config.year_window) continue;
      double score = jaccard(ep_tokens, tokenize(cand->title));
      if (score < config.title_threshold) continue;
      if (score > best) {
        best = score;
        best_records = {cand};
      } else if (score == best) {
        best_records.push_back(cand);
      }
    }
    if (best_records.empty()) continue;
    if (best_records.size() == 1) {
      verdicts[size_t(i)].link = EprintLink{ep.bibcode, best_records.front()->bibcode,
                                            LinkOrigin::matched, best};
    } else {
      MatchAmbiguity amb{ep.bibcode, {}, best};
      for (const BibRecord* r : best_records) amb.candidates.push_back(r->bibcode);
      verdicts[size_t(i)].ambiguity = std::move(amb);
    }
  }

  MatchReport report;
  for (auto& v : verdicts) {
    if (v.link) {
      links_.insert_or_assign(v.link->eprint, *v.link);
      report.links.push_back(*v.link);
    } else if (v.ambiguity) {
      report.ambiguous.push_back(std::move(*v.ambiguity));
    }
  }
  return report;
}

void RecordStore::note_references_ingested(const Bibcode& citing) {
  std::unique_lock lock(mutex_);
  with_reference_data_.insert(citing);
  auto it = records_.find(citing);
  if (it != records_.end()) it->second.has_reference_list = true;
}

std::optional<EprintLink> RecordStore::link_for_eprint(const Bibcode& eprint) const {
  std::shared_lock lock(mutex_);
  auto it = links_.find(eprint);
  if (it == links_.end()) return std::nullopt;
  return it->second;
}

std::vector<EprintLink> RecordStore::all_links() const {
  std::shared_lock lock(mutex_);
  std::vector<EprintLink> out;
  out.reserve(links_.size());
  for (const auto& [code, link] : links_) out.push_back(link);
  return out;
}

void RecordStore::restore_link(const EprintLink& link) {
  std::unique_lock lock(mutex_);
  links_.insert_or_assign(link.eprint, link);
}

std::vector<Bibcode> RecordStore::all_bibcodes() const {
  std::shared_lock lock(mutex_);
  std::vector<Bibcode> out;
  out.reserve(records_.size());
  for (const auto& [code, record] : records_) out.push_back(code);
  return out;
}

size_t RecordStore::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

// ---------------------------------------------------------------------------
// Tagged ingest format
// ---------------------------------------------------------------------------

namespace {

struct Block {
  std::vector<std::pair<char, std::string>> fields;
  size_t first_line = 0;
};

std::vector<Block> split_blocks(std::string_view text, std::vector<std::string>* errors) {
  std::vector<Block> blocks;
  Block cur;
  size_t lineno = 0;
  for (const auto& raw_line : split_lines(text)) {
    ++lineno;
    std::string_view line = trim(raw_line);
    if (line.empty()) {
      if (!cur.fields.empty()) blocks.push_back(std::move(cur));
      cur = {};
      continue;
    }
    if (line[0] == '#') continue;
    if (line.size() < 2 || line[0] != '%') {
      if (errors)
        errors->push_back("line " + std::to_string(lineno) + ": expected '%X value' field");
      continue;
    }
    if (cur.fields.empty()) cur.first_line = lineno;
    char tag = line[1];
    std::string value(trim(line.substr(2)));
    cur.fields.emplace_back(tag, std::move(value));
  }
  if (!cur.fields.empty()) blocks.push_back(std::move(cur));
  return blocks;
}

}  // namespace

Result<RecordIngestStats> ingest_records_text(RecordStore& store, std::string_view text,
                                              const Date& default_ingest_date) {
  RecordIngestStats stats;
  std::vector<std::pair<Bibcode, std::string>> pending_links;

  for (const Block& block : split_blocks(text, &stats.errors)) {
    std::optional<Bibcode> code;
    BibRecord rec;
    rec.ingest_date = default_ingest_date;
    std::optional<int> year;
    std::string block_error;

    for (const auto& [tag, value] : block.fields) {
      switch (tag) {
        case 'R': {
          auto parsed = Bibcode::parse(value);
          if (!parsed.ok()) {
            block_error = parsed.error().message;
          } else {
            code = parsed.value();
          }
          break;
        }
        case 'T': rec.title = value; break;
        case 'A': rec.authors.push_back(parse_author(value)); break;
        case 'D': year = std::atoi(value.c_str()); break;
        case 'J': rec.venue = value; break;
        case 'V': rec.volume = value; break;
        case 'P': rec.first_page = value; break;
        case 'F': rec.refereed = (value == "1"); break;
        case 'E': {
          auto kind = record_kind_from_string(value);
          if (!kind) block_error = "unknown record kind '" + value + "'";
          else rec.kind = *kind;
          break;
        }
        case 'S': rec.source_tags.insert(value); break;
        case 'K': rec.keywords.push_back(value); break;
        case 'B': rec.abstract = value; break;
        case 'I': {
          auto d = Date::parse(value);
          if (!d.ok()) block_error = d.error().message;
          else rec.ingest_date = d.value();
          break;
        }
        case 'X': break;  // handled after the record exists
        default:
          block_error = std::string("unknown tag '%") + tag + "'";
      }
      if (!block_error.empty()) break;
    }

    if (block_error.empty() && !code)
      block_error = "record block missing %R bibcode";
    if (!block_error.empty()) {
      stats.errors.push_back("block at line " + std::to_string(block.first_line) + ": " +
                             block_error);
      continue;
    }

    rec.bibcode = *code;
    rec.pub_year = year.value_or(code->year());
    auto added = store.add_record(rec);
    if (!added.ok()) {
      stats.errors.push_back("block at line " + std::to_string(block.first_line) + ": " +
                             added.error().message);
      continue;
    }
    if (added.value() == AddOutcome::inserted) ++stats.inserted;
    else ++stats.updated;

    for (const auto& [tag, value] : block.fields) {
      if (tag == 'X') pending_links.emplace_back(*code, value);
    }
  }

  for (const auto& [eprint, target] : pending_links) {
    auto published = Bibcode::parse(target);
    if (!published.ok()) {
      stats.errors.push_back("link from " + eprint.str() + ": " + published.error().message);
      continue;
    }
    auto linked = store.link_eprint(eprint, published.value());
    if (!linked.ok()) {
      stats.errors.push_back("link from " + eprint.str() + ": " + linked.error().message);
      continue;
    }
    ++stats.links;
  }
  return stats;
}

std::string render_records_text(const RecordStore& store) {
  std::ostringstream out;
  bool first = true;
  for (const Bibcode& code : store.all_bibcodes()) {
    auto rec = store.find_by_bibcode(code);
    if (!rec) continue;
    if (!first) out << "\n";
    first = false;
    out << "%R " << rec->bibcode.str() << "\n";
    if (!rec->title.empty()) out << "%T " << rec->title << "\n";
    for (const auto& a : rec->authors) {
      out << "%A " << a.surname;
      if (!a.initials.empty()) out << ", " << a.initials;
      out << "\n";
    }
    out << "%D " << rec->pub_year << "\n";
    if (!rec->venue.empty()) out << "%J " << rec->venue << "\n";
    if (rec->volume) out << "%V " << *rec->volume << "\n";
    if (rec->first_page) out << "%P " << *rec->first_page << "\n";
    out << "%F " << (rec->refereed ? 1 : 0) << "\n";
    out << "%E " << to_string(rec->kind) << "\n";
    for (const auto& s : rec->source_tags) out << "%S " << s << "\n";
    for (const auto& k : rec->keywords) out << "%K " << k << "\n";
    if (rec->abstract) out << "%B " << *rec->abstract << "\n";
    out << "%I " << rec->ingest_date.to_string() << "\n";
  }
  return out.str();
}

std::string render_links(const std::vector<EprintLink>& links) {
  std::ostringstream out;
  for (const auto& link : links) {
    out << link.eprint.str() << "\t" << link.published.str() << "\t"
        << (link.origin == LinkOrigin::explicit_link ? "explicit" : "matched") << "\t"
        << (link.match_score ? format_fraction(*link.match_score) : "-") << "\n";
  }
  return out.str();
}

Result<std::vector<EprintLink>> parse_links(std::string_view text) {
  std::vector<EprintLink> links;
  size_t lineno = 0;
  for (const std::string& raw : split_lines(text)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 4)
      return Error{"links line " + std::to_string(lineno) + ": expected 4 columns"};
    auto eprint = Bibcode::parse(fields[0]);
    if (!eprint.ok()) return eprint.error();
    auto published = Bibcode::parse(fields[1]);
    if (!published.ok()) return published.error();
    EprintLink link;
    link.eprint = eprint.value();
    link.published = published.value();
    if (fields[2] == "explicit") link.origin = LinkOrigin::explicit_link;
    else if (fields[2] == "matched") link.origin = LinkOrigin::matched;
    else return Error{"links line " + std::to_string(lineno) + ": bad origin '" + fields[2] + "'"};
    if (fields[3] != "-") link.match_score = std::atof(fields[3].c_str());
    links.push_back(std::move(link));
  }
  return links;
}

std::string RecordStore::serialize() const {
  std::string out = render_records_text(*this);
  for (const auto& link : all_links()) {
    out += "#L ";
    out += link.eprint.str();
    out += ' ';
    out += link.published.str();
    out += link.origin == LinkOrigin::explicit_link ? " explicit" : " matched";
    if (link.match_score) {
      out += ' ';
      out += format_fraction(*link.match_score);
    }
    out += '\n';
  }
  return out;
}

}  // namespace bibcite::corpus
