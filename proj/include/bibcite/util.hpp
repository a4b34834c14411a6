#pragma once

#include <cassert>
#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace bibcite {

// ---------------------------------------------------------------------------
// Error handling
// ---------------------------------------------------------------------------

struct Error {
  std::string message;
};

/// Value-or-error result. Operations whose contract lists a rejection path
/// return one of these instead of throwing.
template <typename T>
class Result {
 public:
  Result(T value) : state_(std::move(value)) {}
  Result(Error err) : state_(std::move(err)) {}

  bool ok() const { return std::holds_alternative<T>(state_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    assert(ok());
    return std::get<T>(state_);
  }
  T&& value() && {
    assert(ok());
    return std::get<T>(std::move(state_));
  }
  const Error& error() const {
    assert(!ok());
    return std::get<Error>(state_);
  }

 private:
  std::variant<T, Error> state_;
};

// ---------------------------------------------------------------------------
// Calendar dates (day resolution, ISO-8601 text form)
// ---------------------------------------------------------------------------

class Date {
 public:
  Date() = default;  // 1970-01-01

  static Date from_ymd(int year, unsigned month, unsigned day);
  static Result<Date> parse(std::string_view iso);  // strict YYYY-MM-DD

  std::string to_string() const;
  int year() const;

  /// Difference in whole days (positive when *this is later).
  long days_since(const Date& other) const;
  Date plus_days(long n) const;

  auto operator<=>(const Date&) const = default;

 private:
  explicit Date(std::chrono::sys_days d) : day_(d) {}
  std::chrono::sys_days day_{};
};

// ---------------------------------------------------------------------------
// String helpers
// ---------------------------------------------------------------------------

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_lines(std::string_view text);
bool starts_with_ci(std::string_view s, std::string_view prefix);

/// ASCII lowercase plus transliteration of common Latin diacritics
/// (U+00C0..U+017F) to their base letters. Idempotent; bytes outside the
/// mapped ranges pass through unchanged.
std::string normalize_text(std::string_view s);

/// Lowercase alphanumeric tokens of the normalized text.
std::vector<std::string> tokenize(std::string_view s);

/// Levenshtein distance scaled to [0,1]: 1 means equal, 0 means disjoint.
double edit_similarity(std::string_view a, std::string_view b);

/// Jaccard overlap of two token sets.
double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// FNV-1a 64-bit digest, rendered as 16 hex digits. Used for build manifests.
std::string fnv1a_hex(std::string_view bytes);

std::string format_fraction(double value);  // fixed 4 decimals

}  // namespace bibcite
