#include "bibcite/resolver.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace bibcite::resolver {

// ---------------------------------------------------------------------------
// Venue table
// ---------------------------------------------------------------------------

namespace {

std::string squeeze(std::string_view s) {
  std::string out;
  bool in_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string VenueAbbrevTable::canonical_alias(std::string_view token) {
  std::string s = squeeze(normalize_text(trim(token)));
  while (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

Result<bool> VenueAbbrevTable::add_alias(std::string_view alias, std::string_view venue_code) {
  std::string key = canonical_alias(alias);
  std::string code(trim(venue_code));
  if (key.empty()) return Error{"venue alias is empty"};
  if (code.empty() || code.size() > 5)
    return Error{"venue code '" + code + "' must be 1..5 characters"};
  if (code.back() == '.') return Error{"venue code '" + code + "' must not end with '.'"};
  auto& codes = entries_[key];
  if (std::find(codes.begin(), codes.end(), code) == codes.end()) codes.push_back(code);
  return true;
}

std::vector<std::string> VenueAbbrevTable::lookup(std::string_view venue_token) const {
  auto it = entries_.find(canonical_alias(venue_token));
  if (it == entries_.end()) return {};
  return it->second;
}

Result<VenueAbbrevTable> VenueAbbrevTable::parse(std::string_view text) {
  VenueAbbrevTable table;
  size_t lineno = 0;
  for (const std::string& raw : split_lines(text)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string_view::npos)
      return Error{"venue table line " + std::to_string(lineno) + ": expected alias<TAB>code"};
    auto added = table.add_alias(line.substr(0, tab), line.substr(tab + 1));
    if (!added.ok())
      return Error{"venue table line " + std::to_string(lineno) + ": " + added.error().message};
  }
  return table;
}

std::string VenueAbbrevTable::render() const {
  std::ostringstream out;
  for (const auto& [alias, codes] : entries_)
    for (const auto& code : codes) out << alias << "\t" << code << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

Result<bool> ResolutionConfig::validate() const {
  if (!(threshold > 0.0 && threshold <= 1.0)) return Error{"threshold must be in (0, 1]"};
  double sum = weight_year + weight_authors + weight_venue + weight_volume_page;
  if (std::abs(sum - 1.0) > 1e-9) return Error{"weights must sum to 1"};
  if (max_variants < 1) return Error{"max_variants must be >= 1"};
  return true;
}

Result<ResolutionConfig> ResolutionConfig::parse(std::string_view text) {
  ResolutionConfig config;
  size_t lineno = 0;
  for (const std::string& raw : split_lines(text)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      return Error{"config line " + std::to_string(lineno) + ": expected key = value"};
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    char* end = nullptr;
    double num = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
      return Error{"config line " + std::to_string(lineno) + ": value '" + value +
                   "' is not a number"};
    if (key == "threshold") config.threshold = num;
    else if (key == "weight_year") config.weight_year = num;
    else if (key == "weight_authors") config.weight_authors = num;
    else if (key == "weight_venue") config.weight_venue = num;
    else if (key == "weight_volume_page") config.weight_volume_page = num;
    else if (key == "max_variants") config.max_variants = int(num);
    else return Error{"config line " + std::to_string(lineno) + ": unknown key '" + key + "'"};
  }
  auto valid = config.validate();
  if (!valid.ok()) return valid.error();
  return config;
}

std::string ResolutionConfig::render() const {
  std::ostringstream out;
  out << "threshold = " << format_fraction(threshold) << "\n"
      << "weight_year = " << format_fraction(weight_year) << "\n"
      << "weight_authors = " << format_fraction(weight_authors) << "\n"
      << "weight_venue = " << format_fraction(weight_venue) << "\n"
      << "weight_volume_page = " << format_fraction(weight_volume_page) << "\n"
      << "max_variants = " << max_variants << "\n";
  return out.str();
}

std::string to_string(UnresolvedReason r) {
  switch (r) {
    case UnresolvedReason::parse_failed: return "parse_failed";
    case UnresolvedReason::no_candidate: return "no_candidate";
    case UnresolvedReason::below_threshold: return "below_threshold";
  }
  return "parse_failed";
}

std::optional<UnresolvedReason> unresolved_reason_from_string(std::string_view s) {
  if (s == "parse_failed") return UnresolvedReason::parse_failed;
  if (s == "no_candidate") return UnresolvedReason::no_candidate;
  if (s == "below_threshold") return UnresolvedReason::below_threshold;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Tentative identifiers and scoring
// ---------------------------------------------------------------------------

namespace {

char surname_initial(const std::vector<corpus::AuthorName>& authors) {
  if (authors.empty()) return '.';
  std::string norm = authors.front().normalized_surname();
  if (norm.empty()) return '.';
  char c = norm[0];
  if (c >= 'a' && c <= 'z') return char(std::toupper(static_cast<unsigned char>(c)));
  return '.';
}

// Strips leading zeros of all-digit strings so "0291" and "291" agree.
std::string canonical_number(std::string_view s) {
  std::string t(trim(s));
  if (t.empty() || !std::all_of(t.begin(), t.end(), [](unsigned char c) {
        return std::isdigit(c);
      }))
    return t;
  size_t i = 0;
  while (i + 1 < t.size() && t[i] == '0') ++i;
  return t.substr(i);
}

double match_indicator(const std::optional<std::string>& parsed,
                       const std::optional<std::string>& stored) {
  if (!parsed && !stored) return 1.0;
  if (!parsed || !stored) return 0.0;
  return canonical_number(*parsed) == canonical_number(*stored) ? 1.0 : 0.0;
}

}  // namespace

Result<std::vector<Bibcode>> tentative_bibcodes(const refparse::ParsedReference& parsed,
                                                const VenueAbbrevTable& table) {
  if (!parsed.year)
    return Error{"cannot form a tentative bibcode without a year (reference '" +
                 parsed.raw.text + "')"};
  std::vector<Bibcode> out;
  if (!parsed.venue_token) return out;
  for (const std::string& code : table.lookup(*parsed.venue_token)) {
    BibcodeFields f;
    f.year = *parsed.year;
    f.venue_code = code;
    f.volume = parsed.volume.value_or("");
    f.page = parsed.page.value_or("");
    f.qualifier = '.';
    f.author_initial = surname_initial(parsed.authors);
    auto built = Bibcode::from_fields(f);
    if (built.ok()) out.push_back(built.value());
  }
  return out;
}

double similarity_score(const refparse::ParsedReference& parsed, const corpus::BibRecord& record,
                        const VenueAbbrevTable& table, const ResolutionConfig& config) {
  double year_score = 0.0;
  if (parsed.year) {
    int delta = std::abs(*parsed.year - record.pub_year);
    year_score = delta == 0 ? 1.0 : delta == 1 ? 0.5 : 0.0;
  }

  double author_score = 0.0;
  if (!parsed.authors.empty() && !record.authors.empty()) {
    const std::string ps = parsed.authors.front().normalized_surname();
    const std::string rs = record.authors.front().normalized_surname();
    if (ps == rs) {
      char pi = parsed.authors.front().first_initial();
      char ri = record.authors.front().first_initial();
      author_score = (pi != 0 && ri != 0 && pi != ri) ? 0.95 : 1.0;
    } else {
      author_score = edit_similarity(ps, rs);
    }
  }

  double venue_score = 0.0;
  if (parsed.venue_token) {
    const std::string record_code = record.bibcode.venue_code();
    for (const std::string& code : table.lookup(*parsed.venue_token)) {
      if (code == record_code) {
        venue_score = 1.0;
        break;
      }
    }
    // unmapped tokens still match by direct case-folded equality
    if (venue_score == 0.0 && VenueAbbrevTable::canonical_alias(*parsed.venue_token) ==
                                  VenueAbbrevTable::canonical_alias(record_code))
      venue_score = 1.0;
  }

  double vp_score =
      (match_indicator(parsed.volume, record.volume) +
       match_indicator(parsed.page, record.first_page)) /
      2.0;

  return config.weight_year * year_score + config.weight_authors * author_score +
         config.weight_venue * venue_score + config.weight_volume_page * vp_score;
}

// ---------------------------------------------------------------------------
// Resolution
// ---------------------------------------------------------------------------

ResolveOutcome resolve_reference(const refparse::RawReference& raw,
                                 const corpus::RecordStore& store,
                                 const VenueAbbrevTable& table, const ResolutionConfig& config) {
  if (!store.find_by_bibcode(raw.citing_bibcode))
    return Error{"unknown citing bibcode " + raw.citing_bibcode.str() + " (source " +
                 raw.source_tag + ", sequence " + std::to_string(raw.sequence) + ")"};

  auto variants = refparse::parse_variants(raw);
  if (variants.empty()) {
    UnresolvedReference u;
    u.raw = raw;
    u.reason = UnresolvedReason::parse_failed;
    return u;
  }

  double best_score = 0.0;
  std::optional<refparse::ParsedReference> best_guess;
  bool any_candidate = false;
  std::string tie_note;

  const size_t variant_count = std::min(variants.size(), size_t(config.max_variants));
  for (size_t v = 0; v < variant_count; ++v) {
    const auto& parsed = variants[v];
    if (!best_guess) best_guess = parsed;
    if (!parsed.year) continue;

    auto tentative = tentative_bibcodes(parsed, table);
    if (!tentative.ok()) continue;

    // Verify existence; letters-section qualifier is the fallback probe.
    std::vector<corpus::BibRecord> candidates;
    for (const Bibcode& code : tentative.value()) {
      std::optional<corpus::BibRecord> rec = store.find_by_bibcode(code);
      if (!rec) rec = store.find_by_bibcode(code.with_qualifier('L'));
      if (!rec) continue;
      if (rec->bibcode == raw.citing_bibcode) continue;  // self pair
      if (std::any_of(candidates.begin(), candidates.end(), [&](const corpus::BibRecord& c) {
            return c.bibcode == rec->bibcode;
          }))
        continue;
      candidates.push_back(std::move(*rec));
    }
    if (candidates.empty()) continue;
    any_candidate = true;

    double top = -1.0;
    size_t top_ties = 0;
    const corpus::BibRecord* top_record = nullptr;
    for (const auto& cand : candidates) {
      double score = similarity_score(parsed, cand, table, config);
      if (score > top) {
        top = score;
        top_ties = 1;
        top_record = &cand;
      } else if (score == top) {
        ++top_ties;
      }
    }
    if (top > best_score) {
      best_score = top;
      best_guess = parsed;
    }
    if (top >= config.threshold) {
      if (top_ties > 1) {
        tie_note = "ambiguous: " + std::to_string(top_ties) +
                   " candidates share top score " + format_fraction(top);
        continue;  // a later variant may disambiguate
      }
      return ResolvedReference{raw.citing_bibcode, top_record->bibcode, top, raw.source_tag,
                               raw.received_date, ""};
    }
  }

  UnresolvedReference u;
  u.raw = raw;
  u.best_guess = best_guess;
  u.best_score = best_score;
  u.note = tie_note;
  u.reason = !any_candidate ? UnresolvedReason::no_candidate : UnresolvedReason::below_threshold;
  return u;
}

BatchResult resolve_batch(const std::vector<refparse::RawReference>& raws,
                          const corpus::RecordStore& store, const VenueAbbrevTable& table,
                          const ResolutionConfig& config, ExecutionMode mode) {
  std::vector<ResolveOutcome> outcomes(raws.size());
  const bool parallel = mode == ExecutionMode::parallel;

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(raws.size()); ++i)
    outcomes[size_t(i)] = resolve_reference(raws[size_t(i)], store, table, config);

  BatchResult result;
  for (size_t i = 0; i < raws.size(); ++i) {
    SourceCount& count = result.per_source[raws[i].source_tag];
    ++count.attempted;
    const Date& d = raws[i].received_date;
    if (!count.first_date || d < *count.first_date) count.first_date = d;
    if (!count.last_date || d > *count.last_date) count.last_date = d;

    if (auto* resolved = std::get_if<ResolvedReference>(&outcomes[i])) {
      ++count.resolved;
      result.resolved.push_back(std::move(*resolved));
    } else if (auto* unresolved = std::get_if<UnresolvedReference>(&outcomes[i])) {
      result.unresolved.push_back(std::move(*unresolved));
    } else {
      result.errors.push_back(std::get<Error>(outcomes[i]).message);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Flat-file round trips
// ---------------------------------------------------------------------------

std::string render_resolved_table(const std::vector<ResolvedReference>& rows) {
  std::ostringstream out;
  for (const auto& r : rows) {
    out << r.citing.str() << "\t" << r.cited.str() << "\t" << format_fraction(r.score) << "\t"
        << r.source_tag << "\t" << r.resolved_date.to_string() << "\n";
  }
  return out.str();
}

Result<std::vector<ResolvedReference>> parse_resolved_table(std::string_view text) {
  std::vector<ResolvedReference> rows;
  size_t lineno = 0;
  for (const std::string& raw : split_lines(text)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 5)
      return Error{"resolved table line " + std::to_string(lineno) + ": expected 5 columns"};
    auto citing = Bibcode::parse(fields[0]);
    if (!citing.ok()) return citing.error();
    auto cited = Bibcode::parse(fields[1]);
    if (!cited.ok()) return cited.error();
    auto date = Date::parse(fields[4]);
    if (!date.ok()) return date.error();
    ResolvedReference r;
    r.citing = citing.value();
    r.cited = cited.value();
    r.score = std::atof(fields[2].c_str());
    r.source_tag = fields[3];
    r.resolved_date = date.value();
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string render_unresolved_table(const std::vector<UnresolvedReference>& rows) {
  std::ostringstream out;
  for (const auto& u : rows) {
    std::string surname = "-", year = "-", venue = "-";
    if (u.best_guess) {
      if (!u.best_guess->authors.empty())
        surname = u.best_guess->authors.front().normalized_surname();
      if (u.best_guess->year) year = std::to_string(*u.best_guess->year);
      if (u.best_guess->venue_token)
        venue = VenueAbbrevTable::canonical_alias(*u.best_guess->venue_token);
    }
    std::string text = u.raw.text;
    std::replace(text.begin(), text.end(), '\t', ' ');
    out << to_string(u.reason) << "\t" << format_fraction(u.best_score) << "\t" << surname
        << "\t" << year << "\t" << venue << "\t" << u.raw.citing_bibcode.str() << "\t"
        << u.raw.source_tag << "\t" << u.raw.sequence << "\t" << text << "\n";
  }
  return out.str();
}

Result<std::vector<UnresolvedReference>> parse_unresolved_table(std::string_view text) {
  std::vector<UnresolvedReference> rows;
  size_t lineno = 0;
  for (const std::string& raw : split_lines(text)) {
    ++lineno;
    std::string_view line = raw;
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 9)
      return Error{"unresolved table line " + std::to_string(lineno) + ": expected 9 columns"};
    auto reason = unresolved_reason_from_string(fields[0]);
    if (!reason)
      return Error{"unresolved table line " + std::to_string(lineno) + ": bad reason '" +
                   fields[0] + "'"};
    auto citing = Bibcode::parse(fields[5]);
    if (!citing.ok()) return citing.error();

    UnresolvedReference u;
    u.reason = *reason;
    u.best_score = std::atof(fields[1].c_str());
    u.raw.citing_bibcode = citing.value();
    u.raw.source_tag = fields[6];
    u.raw.sequence = std::atoi(fields[7].c_str());
    u.raw.text = fields[8];
    if (fields[2] != "-" || fields[3] != "-" || fields[4] != "-") {
      refparse::ParsedReference guess;
      guess.raw = u.raw;
      if (fields[2] != "-") guess.authors.push_back(corpus::AuthorName{fields[2], ""});
      if (fields[3] != "-") guess.year = std::atoi(fields[3].c_str());
      if (fields[4] != "-") guess.venue_token = fields[4];
      u.best_guess = std::move(guess);
    }
    rows.push_back(std::move(u));
  }
  return rows;
}

std::string render_source_counts(const std::map<std::string, SourceCount>& counts) {
  std::ostringstream out;
  for (const auto& [tag, c] : counts) {
    out << tag << "\t" << c.attempted << "\t" << c.resolved << "\t"
        << (c.first_date ? c.first_date->to_string() : "-") << "\t"
        << (c.last_date ? c.last_date->to_string() : "-") << "\n";
  }
  return out.str();
}

Result<std::map<std::string, SourceCount>> parse_source_counts(std::string_view text) {
  std::map<std::string, SourceCount> counts;
  size_t lineno = 0;
  for (const std::string& raw : split_lines(text)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 5)
      return Error{"source counts line " + std::to_string(lineno) + ": expected 5 columns"};
    SourceCount c;
    c.attempted = size_t(std::atoll(fields[1].c_str()));
    c.resolved = size_t(std::atoll(fields[2].c_str()));
    if (fields[3] != "-") {
      auto d = Date::parse(fields[3]);
      if (!d.ok()) return d.error();
      c.first_date = d.value();
    }
    if (fields[4] != "-") {
      auto d = Date::parse(fields[4]);
      if (!d.ok()) return d.error();
      c.last_date = d.value();
    }
    counts[fields[0]] = c;
  }
  return counts;
}

void merge_source_counts(std::map<std::string, SourceCount>& into,
                         const std::map<std::string, SourceCount>& from) {
  for (const auto& [tag, c] : from) {
    SourceCount& dst = into[tag];
    dst.attempted += c.attempted;
    dst.resolved += c.resolved;
    if (c.first_date && (!dst.first_date || *c.first_date < *dst.first_date))
      dst.first_date = c.first_date;
    if (c.last_date && (!dst.last_date || *c.last_date > *dst.last_date))
      dst.last_date = c.last_date;
  }
}

}  // namespace bibcite::resolver
