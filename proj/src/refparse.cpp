#include "bibcite/refparse.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <sstream>

namespace bibcite::refparse {

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
bool is_lower(char c) { return std::islower(static_cast<unsigned char>(c)); }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)); }

// ---------------------------------------------------------------------------
// Section heading detection
// ---------------------------------------------------------------------------

constexpr std::array<std::string_view, 3> kHeadings = {"references", "bibliography",
                                                       "literature cited"};

bool is_roman(char c) {
  switch (c) {
    case 'i': case 'v': case 'x': case 'l': case 'c':
      return true;
    default:
      return false;
  }
}

std::string squeeze_spaces(std::string_view s) {
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

bool is_heading_line(std::string_view line) {
  std::string t = squeeze_spaces(normalize_text(trim(line)));
  if (t.empty()) return false;

  // Optional numbering: "7." / "7)" / "7" / "vii." / "[3]". Roman numbering
  // needs the punctuation; bare digits may stand alone.
  size_t i = 0;
  if (t[0] == '[') {
    size_t j = 1;
    while (j < t.size() && is_digit(t[j])) ++j;
    if (j > 1 && j < t.size() && t[j] == ']') i = j + 1;
  } else {
    size_t j = 0;
    while (j < t.size() && is_digit(t[j])) ++j;
    const bool digits = j > 0;
    if (!digits)
      while (j < t.size() && is_roman(t[j])) ++j;
    const bool roman = !digits && j > 0;
    if ((digits || roman) && j < t.size()) {
      if (t[j] == '.' || t[j] == ')') i = j + 1;
      else if (digits && t[j] == ' ') i = j;
    }
  }
  while (i < t.size() && t[i] == ' ') ++i;

  std::string_view rest = std::string_view(t).substr(i);
  for (std::string_view heading : kHeadings) {
    if (rest.size() < heading.size()) continue;
    if (rest.substr(0, heading.size()) != heading) continue;
    std::string_view tail = rest.substr(heading.size());
    if (tail.empty() || tail == ":" || tail == ".") return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// List markers
// ---------------------------------------------------------------------------

// Index just past a leading list marker and its trailing spaces; 0 if the
// line carries no marker.
size_t marker_end(std::string_view line) {
  size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  size_t start = i;
  if (i >= line.size()) return 0;

  auto skip_ws = [&](size_t j) {
    while (j < line.size() && (line[j] == ' ' || line[j] == '\t')) ++j;
    return j;
  };

  if (line[i] == '[') {
    size_t j = i + 1;
    while (j < line.size() && is_digit(line[j])) ++j;
    if (j > i + 1 && j < line.size() && line[j] == ']') return skip_ws(j + 1);
    return 0;
  }
  if (is_digit(line[i])) {
    size_t j = i;
    while (j < line.size() && is_digit(line[j])) ++j;
    if (j - i <= 3 && j < line.size() && (line[j] == '.' || line[j] == ')')) {
      if (j + 1 < line.size() && (line[j + 1] == ' ' || line[j + 1] == '\t'))
        return skip_ws(j + 1);
    }
    return 0;
  }
  if (line[i] == '-' || line[i] == '*') {
    if (i + 1 < line.size() && (line[i + 1] == ' ' || line[i + 1] == '\t'))
      return skip_ws(i + 1);
    return 0;
  }
  // U+2022 bullet
  if (i + 2 < line.size() && (unsigned char)line[i] == 0xE2 && (unsigned char)line[i + 1] == 0x80 &&
      (unsigned char)line[i + 2] == 0xA2)
    return skip_ws(i + 3);
  (void)start;
  return 0;
}

}  // namespace

std::string_view strip_list_marker(std::string_view line) {
  size_t e = marker_end(line);
  return e > 0 ? line.substr(e) : line;
}

// ---------------------------------------------------------------------------
// Section extraction
// ---------------------------------------------------------------------------

Result<std::string> extract_reference_section(const RawDocument& doc) {
  const std::string& body = doc.body_text;
  std::optional<size_t> section_start;  // byte offset just past the heading line

  size_t pos = 0;
  while (pos <= body.size()) {
    size_t eol = body.find('\n', pos);
    size_t end = (eol == std::string::npos) ? body.size() : eol;
    std::string_view line(body.data() + pos, end - pos);
    if (is_heading_line(line)) section_start = (eol == std::string::npos) ? body.size() : eol + 1;
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }

  if (!section_start)
    return Error{"no reference section heading found in document " + doc.citing_bibcode.str()};
  return std::string(trim(std::string_view(body).substr(*section_start)));
}

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

std::vector<RawReference> split_reference_strings(const std::string& section,
                                                  const Bibcode& citing,
                                                  const std::string& source_tag,
                                                  const Date& received_date) {
  std::vector<std::string> texts;
  std::string current;

  auto close = [&] {
    std::string_view t = trim(current);
    if (!t.empty()) texts.emplace_back(t);
    current.clear();
  };

  for (const std::string& line : split_lines(section)) {
    std::string_view sv = line;
    if (trim(sv).empty()) {
      close();
      continue;
    }
    size_t me = marker_end(sv);
    if (me > 0) {
      close();
      current = std::string(trim(sv.substr(me)));
      continue;
    }
    bool indented = sv[0] == ' ' || sv[0] == '\t';
    std::string_view body = trim(sv);
    bool lowercase_initial = !body.empty() && is_lower(body[0]);
    if (!current.empty() && (indented || lowercase_initial)) {
      current += ' ';
      current += body;
    } else {
      close();
      current = std::string(body);
    }
  }
  close();

  std::vector<RawReference> out;
  out.reserve(texts.size());
  int seq = 1;
  for (auto& t : texts)
    out.push_back(RawReference{citing, source_tag, seq++, std::move(t), received_date});
  return out;
}

// ---------------------------------------------------------------------------
// Reference string parsing
// ---------------------------------------------------------------------------

namespace {

constexpr int kMinYear = 1500;
constexpr int kMaxYear = 2100;

struct YearHit {
  size_t begin = 0;
  size_t end = 0;  // past digits and optional letter suffix
  int year = 0;
  bool parenthesized = false;
};

// Standalone 4-digit runs in [1500, 2100], optional single lowercase suffix.
std::vector<YearHit> find_years(std::string_view s) {
  std::vector<YearHit> hits;
  for (size_t i = 0; i + 4 <= s.size(); ++i) {
    if (!is_digit(s[i])) continue;
    if (i > 0 && is_digit(s[i - 1])) continue;
    size_t j = i;
    while (j < s.size() && is_digit(s[j])) ++j;
    if (j - i != 4) {
      i = j - 1;
      continue;
    }
    int y = (s[i] - '0') * 1000 + (s[i + 1] - '0') * 100 + (s[i + 2] - '0') * 10 + (s[i + 3] - '0');
    if (y < kMinYear || y > kMaxYear) {
      i = j - 1;
      continue;
    }
    YearHit hit;
    hit.begin = i;
    hit.end = j;
    hit.year = y;
    if (hit.end < s.size() && is_lower(s[hit.end])) ++hit.end;
    hit.parenthesized = i > 0 && s[i - 1] == '(' && hit.end < s.size() && s[hit.end] == ')';
    hits.push_back(hit);
    i = j - 1;
  }
  return hits;
}

bool initials_like(std::string_view unit) {
  // "A." / "M. J." / "M.J." -- up to four initial letters, dots/spaces only.
  int letters = 0;
  bool expect_letter = true;
  for (char c : unit) {
    if (c == ' ' || c == '.') {
      expect_letter = true;
      continue;
    }
    if (!is_upper(c)) return false;
    if (!expect_letter) return false;  // adjacent letters => a word, not initials
    ++letters;
    expect_letter = false;
  }
  return letters >= 1 && letters <= 4;
}

std::string replace_and_separators(std::string_view s) {
  std::string out(s);
  for (std::string_view pat : {std::string_view(" and "), std::string_view(" & ")}) {
    size_t pos = 0;
    while ((pos = out.find(pat, pos)) != std::string::npos) {
      out.replace(pos, pat.size(), ", ");
      pos += 2;
    }
  }
  return out;
}

bool strip_et_al(std::string& s) {
  std::string norm = normalize_text(s);
  for (std::string_view suffix : {std::string_view("et al."), std::string_view("et al")}) {
    if (norm.size() >= suffix.size() &&
        std::string_view(norm).substr(norm.size() - suffix.size()) == suffix) {
      s = std::string(trim(std::string_view(s).substr(0, s.size() - suffix.size())));
      return true;
    }
  }
  return false;
}

bool plain_word(std::string_view unit) {
  // Lowercase-initial surnames ("van Dam") are accepted; digits are not.
  if (unit.empty() || is_digit(unit[0])) return false;
  for (char c : unit)
    if (is_digit(c)) return false;
  return true;
}

// Surname-first author list: "Accomazzi, A., Eichhorn, G., et al."
std::vector<corpus::AuthorName> parse_authors_surname_first(std::string_view text) {
  std::vector<corpus::AuthorName> authors;
  std::string prepared = replace_and_separators(text);
  for (std::string& unit_storage : split(prepared, ',')) {
    std::string unit(trim(unit_storage));
    if (unit.empty()) continue;
    std::string norm = normalize_text(unit);
    if (norm == "et al" || norm == "et al.") continue;
    bool had_et_al = strip_et_al(unit);
    if (unit.empty()) continue;
    if (initials_like(unit)) {
      if (!authors.empty() && authors.back().initials.empty())
        authors.back().initials = unit;
      continue;
    }
    if (!plain_word(unit)) continue;
    authors.push_back(corpus::AuthorName{unit, ""});
    if (had_et_al) break;
  }
  return authors;
}

// Initials-first units: "A. Guth", "M. J. Kurtz".
std::optional<corpus::AuthorName> parse_initials_first_unit(std::string_view unit) {
  std::vector<std::string> words;
  for (auto& w : split(unit, ' '))
    if (!trim(w).empty()) words.emplace_back(trim(w));
  if (words.size() < 2) return std::nullopt;

  std::string initials;
  size_t i = 0;
  for (; i + 1 < words.size(); ++i) {
    if (!initials_like(words[i])) break;
    if (!initials.empty()) initials += ' ';
    initials += words[i];
  }
  if (i == 0) return std::nullopt;  // no leading initials
  std::string surname;
  for (; i < words.size(); ++i) {
    if (!surname.empty()) surname += ' ';
    surname += words[i];
  }
  if (surname.empty() || !plain_word(surname)) return std::nullopt;
  return corpus::AuthorName{surname, initials};
}

// Numeric-ish volume/page token: optional "p."/"pp."/"Vol."/"No." prefix,
// optional single letter ("L101" pages), 1..4 digits, optional range tail.
std::optional<std::string> numeric_field(std::string_view seg) {
  std::string s(trim(seg));
  if (!s.empty() && s.back() == '.') s.pop_back();
  for (std::string_view prefix :
       {std::string_view("pp."), std::string_view("p."), std::string_view("vol."),
        std::string_view("no."), std::string_view("pp"), std::string_view("p")}) {
    if (starts_with_ci(s, prefix) && s.size() > prefix.size() &&
        (s[prefix.size()] == ' ' || is_digit(s[prefix.size()]))) {
      s = std::string(trim(std::string_view(s).substr(prefix.size())));
      break;
    }
  }
  if (s.empty()) return std::nullopt;
  size_t i = 0;
  std::string out;
  if (is_upper(s[0]) && s.size() > 1 && is_digit(s[1])) {
    out.push_back(s[0]);
    i = 1;
  }
  size_t digits_begin = i;
  while (i < s.size() && is_digit(s[i])) ++i;
  size_t ndigits = i - digits_begin;
  if (ndigits < 1 || ndigits > 4) return std::nullopt;
  out += s.substr(digits_begin, ndigits);
  if (i < s.size()) {
    // allow a page-range tail ("291-300"), nothing else
    if (s[i] != '-') return std::nullopt;
    ++i;
    while (i < s.size() && is_digit(s[i])) ++i;
    if (i != s.size()) return std::nullopt;
  }
  return out;
}

struct Interp {
  std::vector<corpus::AuthorName> authors;
  std::optional<int> year;
  std::optional<std::string> venue;
  std::optional<std::string> volume;
  std::optional<std::string> page;

  bool operator==(const Interp&) const = default;
};

// Splits "ccdm.conf" into ("ccdm", "conf"): a single dot between two
// alphanumeric runs with no spaces.
std::optional<std::pair<std::string, std::string>> dotted_venue_split(std::string_view venue) {
  size_t dot = venue.find('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 >= venue.size()) return std::nullopt;
  std::string_view pre = venue.substr(0, dot);
  std::string_view post = venue.substr(dot + 1);
  auto alnum_run = [](std::string_view s) {
    return !s.empty() && s.size() <= 4 + 1 &&
           std::all_of(s.begin(), s.end(),
                       [](char c) { return is_alpha(c) || is_digit(c) || c == '&'; });
  };
  if (!alnum_run(pre) || !alnum_run(post) || post.size() > 4 || pre.size() > 5)
    return std::nullopt;
  return std::make_pair(std::string(pre), std::string(post));
}

void family_authors_first(std::string_view text, const YearHit& year, std::vector<Interp>& out) {
  std::string_view authors_text = trim(text.substr(0, year.begin));
  while (!authors_text.empty() && (authors_text.back() == ',' || authors_text.back() == ' '))
    authors_text.remove_suffix(1);
  auto authors = parse_authors_surname_first(authors_text);

  std::string_view rest = text.substr(year.end);
  while (!rest.empty() && (rest.front() == ',' || rest.front() == ' ' || rest.front() == '.'))
    rest.remove_prefix(1);

  std::optional<std::string> venue;
  std::vector<std::string> nums;
  for (auto& seg_storage : split(rest, ',')) {
    std::string_view seg = trim(seg_storage);
    if (seg.empty()) continue;
    if (auto num = numeric_field(seg)) {
      nums.push_back(*num);
      continue;
    }
    if (!venue) venue = std::string(seg);
    // later non-numeric segments ("in press") are ignored
  }

  Interp base;
  base.authors = authors;
  base.year = year.year;
  base.venue = venue;

  if (nums.size() >= 2) {
    Interp i0 = base;
    i0.volume = nums[0];
    i0.page = nums[1];
    out.push_back(i0);
  } else if (nums.size() == 1) {
    Interp i0 = base;
    i0.volume = nums[0];
    out.push_back(i0);
    Interp i1 = base;
    i1.page = nums[0];
    out.push_back(i1);
  } else {
    out.push_back(base);
  }

  if (venue) {
    if (auto sp = dotted_venue_split(*venue)) {
      Interp alt = base;
      alt.venue = sp->first;
      alt.volume = sp->second;
      if (!nums.empty()) alt.page = nums[0];
      out.push_back(alt);
    }
  }
}

void family_year_in_parens(std::string_view text, const YearHit& year, std::vector<Interp>& out) {
  std::string_view pre = trim(text.substr(0, year.begin - 1));  // before '('

  std::string prepared = replace_and_separators(pre);
  auto units = split(prepared, ',');

  std::vector<corpus::AuthorName> authors;
  size_t consumed = 0;
  for (; consumed < units.size(); ++consumed) {
    auto author = parse_initials_first_unit(trim(units[consumed]));
    if (!author) break;
    authors.push_back(*author);
  }

  // Remaining units: "<venue words> <volume>", "<page>"
  std::optional<std::string> venue;
  std::optional<std::string> volume;
  std::vector<std::string> nums;
  for (size_t u = consumed; u < units.size(); ++u) {
    std::string_view seg = trim(units[u]);
    if (seg.empty()) continue;
    if (auto num = numeric_field(seg)) {
      nums.push_back(*num);
      continue;
    }
    if (venue) continue;
    std::vector<std::string> words;
    for (auto& w : split(std::string(seg), ' '))
      if (!trim(w).empty()) words.emplace_back(trim(w));
    while (!words.empty()) {
      if (auto num = numeric_field(words.back())) {
        if (!volume) volume = *num;
        words.pop_back();
      } else {
        break;
      }
    }
    std::string joined;
    for (const auto& w : words) {
      if (!joined.empty()) joined += ' ';
      joined += w;
    }
    if (!joined.empty()) venue = joined;
  }

  Interp interp;
  interp.authors = std::move(authors);
  interp.year = year.year;
  interp.venue = venue;
  interp.volume = volume;
  if (!volume && !nums.empty()) {
    interp.volume = nums[0];
    if (nums.size() > 1) interp.page = nums[1];
  } else if (!nums.empty()) {
    interp.page = nums[0];
  }
  out.push_back(interp);
}

constexpr int kMaxVariants = 3;

}  // namespace

std::vector<ParsedReference> parse_variants(const RawReference& raw) {
  std::string_view text = strip_list_marker(raw.text);
  text = trim(text);

  std::vector<Interp> interps;
  auto years = find_years(text);

  const YearHit* plain_year = nullptr;
  const YearHit* paren_year = nullptr;
  for (const auto& hit : years) {
    if (!hit.parenthesized && !plain_year) plain_year = &hit;
    if (hit.parenthesized) paren_year = &hit;  // last one wins
  }

  if (plain_year) {
    family_authors_first(text, *plain_year, interps);
  } else if (paren_year) {
    family_year_in_parens(text, *paren_year, interps);
  }

  // Drop duplicates and empty parses, preserve order, cap the variant count.
  std::vector<ParsedReference> out;
  for (const auto& interp : interps) {
    if (int(out.size()) >= kMaxVariants) break;
    int fields = 0;
    if (!interp.authors.empty()) ++fields;
    if (interp.year) ++fields;
    if (interp.venue) ++fields;
    if (interp.volume) ++fields;
    if (interp.page) ++fields;
    if (fields == 0) continue;
    ParsedReference parsed;
    parsed.raw = raw;
    parsed.authors = interp.authors;
    parsed.year = interp.year;
    parsed.venue_token = interp.venue;
    parsed.volume = interp.volume;
    parsed.page = interp.page;
    parsed.confidence = double(fields) / 5.0;
    parsed.variant_index = int(out.size());
    bool dup = std::any_of(out.begin(), out.end(), [&](const ParsedReference& p) {
      return p.authors == parsed.authors && p.year == parsed.year &&
             p.venue_token == parsed.venue_token && p.volume == parsed.volume &&
             p.page == parsed.page;
    });
    if (!dup) out.push_back(std::move(parsed));
  }
  return out;
}

std::optional<ParsedReference> parse_reference(const RawReference& raw, int variant) {
  if (variant < 0) return std::nullopt;
  auto variants = parse_variants(raw);
  if (size_t(variant) >= variants.size()) return std::nullopt;
  return variants[size_t(variant)];
}

Result<std::vector<RawReference>> pipeline_from_document(const RawDocument& doc) {
  auto section = extract_reference_section(doc);
  if (!section.ok()) return section.error();
  return split_reference_strings(section.value(), doc.citing_bibcode, doc.source_tag,
                                 doc.received_date);
}

// ---------------------------------------------------------------------------
// Reference ingest files
// ---------------------------------------------------------------------------

namespace {

struct BlockHeader {
  Bibcode citing;
  std::string source_tag;
  Date received;
};

Result<BlockHeader> parse_block_header(std::string_view line) {
  std::optional<Bibcode> citing;
  std::string source_tag;
  std::optional<Date> received;

  std::vector<std::string> parts = split(std::string(line), ' ');
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    std::string_view key = parts[i];
    std::string_view value = parts[i + 1];
    if (key == "%%R") {
      auto b = Bibcode::parse(value);
      if (!b.ok()) return b.error();
      citing = b.value();
    } else if (key == "%%S") {
      source_tag = std::string(value);
    } else if (key == "%%D") {
      auto d = Date::parse(value);
      if (!d.ok()) return d.error();
      received = d.value();
    }
  }
  if (!citing) return Error{"block header missing %%R bibcode"};
  if (source_tag.empty()) return Error{"block header missing %%S source tag"};
  if (!received) return Error{"block header missing %%D date"};
  return BlockHeader{*citing, source_tag, *received};
}

}  // namespace

ReferenceIngestResult parse_reference_file(std::string_view text) {
  ReferenceIngestResult result;
  std::optional<BlockHeader> header;
  // Sequences stay unique per (citing, source) even when a paper's
  // references arrive split across several blocks.
  std::map<std::pair<std::string, std::string>, int> counters;
  size_t lineno = 0;

  for (const std::string& raw_line : split_lines(text)) {
    ++lineno;
    std::string_view line = trim(raw_line);
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("%%R", 0) == 0) {
      auto parsed = parse_block_header(line);
      if (!parsed.ok()) {
        result.errors.push_back("line " + std::to_string(lineno) + ": " + parsed.error().message);
        header.reset();
        continue;
      }
      header = parsed.value();
      continue;
    }
    if (!header) {
      result.errors.push_back("line " + std::to_string(lineno) +
                              ": reference string before any %%R header");
      continue;
    }
    int& seq = counters[{header->citing.str(), header->source_tag}];
    result.references.push_back(RawReference{header->citing, header->source_tag, ++seq,
                                             std::string(line), header->received});
  }
  return result;
}

std::string render_reference_file(const std::vector<RawReference>& refs) {
  std::ostringstream out;
  const RawReference* prev = nullptr;
  for (const auto& r : refs) {
    bool new_block = !prev || prev->citing_bibcode != r.citing_bibcode ||
                     prev->source_tag != r.source_tag || prev->received_date != r.received_date;
    if (new_block) {
      if (prev) out << "\n";
      out << "%%R " << r.citing_bibcode.str() << " %%S " << r.source_tag << " %%D "
          << r.received_date.to_string() << "\n";
    }
    out << r.text << "\n";
    prev = &r;
  }
  return out.str();
}

Result<RawDocument> parse_raw_document_file(std::string_view text) {
  auto lines_end = text.find('\n');
  if (lines_end == std::string_view::npos)
    return Error{"raw document file needs a %%R header line and a body"};
  auto header = parse_block_header(trim(text.substr(0, lines_end)));
  if (!header.ok()) return header.error();
  RawDocument doc;
  doc.citing_bibcode = header.value().citing;
  doc.source_tag = header.value().source_tag;
  doc.received_date = header.value().received;
  doc.body_text = std::string(text.substr(lines_end + 1));
  if (trim(doc.body_text).empty()) return Error{"raw document body is empty"};
  return doc;
}

}  // namespace bibcite::refparse
