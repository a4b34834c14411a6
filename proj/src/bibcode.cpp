#include "bibcite/bibcode.hpp"

#include <algorithm>
#include <cctype>

namespace bibcite {

namespace {

constexpr int kMinYear = 1500;
constexpr int kMaxYear = 2100;

bool printable(char c) {
  return c > 0x20 && c < 0x7F;
}

std::string strip_left_dots(std::string_view s) {
  size_t i = 0;
  while (i < s.size() && s[i] == '.') ++i;
  return std::string(s.substr(i));
}

std::string strip_right_dots(std::string_view s) {
  size_t e = s.size();
  while (e > 0 && s[e - 1] == '.') --e;
  return std::string(s.substr(0, e));
}

Error field_error(std::string_view field, std::string_view what) {
  return Error{"bibcode field '" + std::string(field) + "': " + std::string(what)};
}

}  // namespace

Result<Bibcode> Bibcode::from_fields(const BibcodeFields& f) {
  if (f.year < kMinYear || f.year > kMaxYear)
    return field_error("year", "must be in [1500, 2100]");
  if (f.venue_code.size() > 5) return field_error("venue", "longer than 5 characters");
  if (!f.venue_code.empty() && f.venue_code.back() == '.')
    return field_error("venue", "must not end with '.'");
  if (f.volume.size() > 4) return field_error("volume", "longer than 4 characters");
  if (!f.volume.empty() && f.volume.front() == '.')
    return field_error("volume", "must not begin with '.'");
  if (f.page.size() > 4) return field_error("page", "longer than 4 characters");
  if (!f.page.empty() && f.page.front() == '.')
    return field_error("page", "must not begin with '.'");
  if (!printable(f.qualifier)) return field_error("qualifier", "not a printable character");
  if (f.author_initial != '.' && !(f.author_initial >= 'A' && f.author_initial <= 'Z'))
    return field_error("author initial", "must be an uppercase letter or '.'");
  for (std::string_view part : {std::string_view(f.venue_code), std::string_view(f.volume),
                                std::string_view(f.page)}) {
    if (!std::all_of(part.begin(), part.end(), printable))
      return field_error("text", "contains non-printable characters");
  }

  std::string canon;
  canon.reserve(kBibcodeLength);
  char year[8];
  std::snprintf(year, sizeof year, "%04d", f.year);
  canon += year;
  canon += f.venue_code;
  canon.append(5 - f.venue_code.size(), '.');
  canon.append(4 - f.volume.size(), '.');
  canon += f.volume;
  canon += f.qualifier;
  canon.append(4 - f.page.size(), '.');
  canon += f.page;
  canon += f.author_initial;
  return Bibcode(std::move(canon));
}

Result<Bibcode> Bibcode::parse(std::string_view text) {
  if (text.size() != kBibcodeLength)
    return Error{"bibcode must be exactly 19 characters, got " +
                 std::to_string(text.size()) + " in '" + std::string(text) + "'"};
  BibcodeFields f;
  for (size_t i = 0; i < 4; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i])))
      return field_error("year", "first 4 characters must be digits");
  }
  f.year = (text[0] - '0') * 1000 + (text[1] - '0') * 100 + (text[2] - '0') * 10 +
           (text[3] - '0');
  f.venue_code = strip_right_dots(text.substr(4, 5));
  f.volume = strip_left_dots(text.substr(9, 4));
  f.qualifier = text[13];
  f.page = strip_left_dots(text.substr(14, 4));
  f.author_initial = text[18];
  return from_fields(f);
}

BibcodeFields Bibcode::fields() const {
  BibcodeFields f;
  f.year = year();
  f.venue_code = venue_code();
  f.volume = volume();
  f.qualifier = qualifier();
  f.page = page();
  f.author_initial = author_initial();
  return f;
}

int Bibcode::year() const {
  return (canon_[0] - '0') * 1000 + (canon_[1] - '0') * 100 + (canon_[2] - '0') * 10 +
         (canon_[3] - '0');
}

std::string Bibcode::venue_code() const {
  return strip_right_dots(std::string_view(canon_).substr(4, 5));
}

std::string Bibcode::volume() const {
  return strip_left_dots(std::string_view(canon_).substr(9, 4));
}

std::string Bibcode::page() const {
  return strip_left_dots(std::string_view(canon_).substr(14, 4));
}

Bibcode Bibcode::with_qualifier(char q) const {
  std::string canon = canon_;
  canon[13] = q;
  return Bibcode(std::move(canon));
}

}  // namespace bibcite
