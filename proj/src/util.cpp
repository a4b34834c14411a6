#include "bibcite/util.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <unordered_set>

namespace bibcite {

// ---------------------------------------------------------------------------
// Date
// ---------------------------------------------------------------------------

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  using namespace std::chrono;
  return Date(sys_days(year_month_day{std::chrono::year{year}, std::chrono::month{month},
                                      std::chrono::day{day}}));
}

Result<Date> Date::parse(std::string_view iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
    return Error{"date must be YYYY-MM-DD, got '" + std::string(iso) + "'"};
  auto digits = [](std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
  };
  if (!digits(iso.substr(0, 4)) || !digits(iso.substr(5, 2)) || !digits(iso.substr(8, 2)))
    return Error{"date must be YYYY-MM-DD, got '" + std::string(iso) + "'"};
  int y = 0, m = 0, d = 0;
  std::from_chars(iso.data(), iso.data() + 4, y);
  std::from_chars(iso.data() + 5, iso.data() + 7, m);
  std::from_chars(iso.data() + 8, iso.data() + 10, d);
  using namespace std::chrono;
  year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                     std::chrono::day{unsigned(d)}};
  if (!ymd.ok()) return Error{"invalid calendar date '" + std::string(iso) + "'"};
  return Date(sys_days(ymd));
}

std::string Date::to_string() const {
  std::chrono::year_month_day ymd{day_};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()));
  return buf;
}

int Date::year() const {
  return int(std::chrono::year_month_day{day_}.year());
}

long Date::days_since(const Date& other) const {
  return (day_ - other.day_).count();
}

Date Date::plus_days(long n) const {
  return Date(day_ + std::chrono::days{n});
}

// ---------------------------------------------------------------------------
// Strings
// ---------------------------------------------------------------------------

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t pos = text.find('\n', start);
    if (pos == std::string_view::npos) {
      if (start < text.size()) out.emplace_back(text.substr(start));
      break;
    }
    std::string_view line = text.substr(start, pos - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.emplace_back(line);
    start = pos + 1;
  }
  return out;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i])))
      return false;
  }
  return true;
}

namespace {

// Base letters for U+00C0..U+00FF (UTF-8 lead byte 0xC3). '?' marks
// punctuation-like codepoints left untouched.
constexpr std::string_view kLatin1Base =
    "aaaaaa?ceeeeiiii"   // C0..CF (Æ and Ð fall through)
    "dnooooo?ouuuuy?s"   // D0..DF (× kept, ß -> s)
    "aaaaaa?ceeeeiiii"   // E0..EF
    "dnooooo?ouuuuy?y";  // F0..FF

// Latin Extended-A (U+0100..U+017F), one entry per codepoint. Ligatures
// (Ĳ, Œ) are left untouched.
constexpr std::string_view kLatinExtABase =
    "aaaaaaccccccccdd"   // 0100..010F
    "ddeeeeeeeeeegggg"   // 0110..011F
    "gggghhhhiiiiiiii"   // 0120..012F
    "ii??jjkkklllllll"   // 0130..013F
    "lllnnnnnnnnnoooo"   // 0140..014F
    "oo??rrrrrrssssss"   // 0150..015F
    "ssttttttuuuuuuuu"   // 0160..016F
    "uuuuwwyyyzzzzzzs";  // 0170..017F

void append_fold(std::string& out, unsigned cp, char fallback_lead, char fallback_cont) {
  char base = 0;
  if (cp >= 0xC0 && cp <= 0xFF) base = kLatin1Base[cp - 0xC0];
  if (cp >= 0x100 && cp <= 0x17F) base = kLatinExtABase[cp - 0x100];
  if (base != 0 && base != '?') {
    out.push_back(base);
  } else {
    out.push_back(fallback_lead);
    out.push_back(fallback_cont);
  }
}

}  // namespace

std::string normalize_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    unsigned char c = s[i];
    if (c < 0x80) {
      out.push_back(char(std::tolower(c)));
    } else if ((c == 0xC3 || c == 0xC4 || c == 0xC5) && i + 1 < s.size()) {
      unsigned char c2 = s[i + 1];
      unsigned cp = ((c & 0x1F) << 6) | (c2 & 0x3F);
      append_fold(out, cp, char(c), char(c2));
      ++i;
    } else {
      out.push_back(char(c));
    }
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::string norm = normalize_text(s);
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : norm) {
    if (std::isalnum(c)) {
      cur.push_back(char(c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

double edit_similarity(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  const size_t n = a.size(), m = b.size();
  std::vector<size_t> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = j;
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= m; ++j) {
      size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  double dist = double(prev[m]);
  return 1.0 - dist / double(std::max(n, m));
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::unordered_set<std::string> sa(a.begin(), a.end());
  std::unordered_set<std::string> sb(b.begin(), b.end());
  size_t inter = 0;
  for (const auto& t : sa)
    if (sb.count(t)) ++inter;
  size_t uni = sa.size() + sb.size() - inter;
  if (uni == 0) return 1.0;
  return double(inter) / double(uni);
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_fraction(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  return buf;
}

}  // namespace bibcite
