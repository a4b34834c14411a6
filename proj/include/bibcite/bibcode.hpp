#pragma once

#include <compare>
#include <functional>
#include <string>
#include <string_view>

#include "bibcite/util.hpp"

namespace bibcite {

/// Field view of a bibcode. Venue must not end with '.', volume and page
/// must not begin with '.': those positions are padding in the text form
/// and would not survive a round trip.
struct BibcodeFields {
  int year = 0;               // [1500, 2100]
  std::string venue_code;     // <= 5 chars, dot-padded right
  std::string volume;         // <= 4 chars, dot-padded left
  char qualifier = '.';       // single printable char
  std::string page;           // <= 4 chars, dot-padded left
  char author_initial = '.';  // 'A'..'Z' or '.'

  bool operator==(const BibcodeFields&) const = default;
};

/// Canonical 19-character record identifier:
/// YYYY + venue(5) + volume(4) + qualifier + page(4) + initial.
/// Comparison and hashing use the canonical text form.
class Bibcode {
 public:
  /// All-empty placeholder (year 1500, every other field blank).
  Bibcode() : canon_("1500...............") {}

  static Result<Bibcode> parse(std::string_view text);
  static Result<Bibcode> from_fields(const BibcodeFields& f);

  const std::string& str() const { return canon_; }
  BibcodeFields fields() const;

  int year() const;
  std::string venue_code() const;   // trailing padding dots stripped
  std::string volume() const;       // leading padding dots stripped
  char qualifier() const { return canon_[13]; }
  std::string page() const;         // leading padding dots stripped
  char author_initial() const { return canon_[18]; }

  Bibcode with_qualifier(char q) const;

  auto operator<=>(const Bibcode& other) const { return canon_ <=> other.canon_; }
  bool operator==(const Bibcode& other) const { return canon_ == other.canon_; }

 private:
  explicit Bibcode(std::string canon) : canon_(std::move(canon)) {}
  std::string canon_;
};

constexpr size_t kBibcodeLength = 19;

}  // namespace bibcite

template <>
struct std::hash<bibcite::Bibcode> {
  size_t operator()(const bibcite::Bibcode& b) const noexcept {
    return std::hash<std::string>{}(b.str());
  }
};
