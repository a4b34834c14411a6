#include "bibcite/export.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

#include "bibcite/xml.hpp"

namespace bibcite::exporter {

Result<std::string> export_xml_abstracts(const std::vector<corpus::BibRecord>& records,
                                         const std::map<Bibcode, long>& counts,
                                         const std::string& query_echo) {
  long total = 0;
  for (const auto& record : records) {
    auto it = counts.find(record.bibcode);
    if (it == counts.end())
      return Error{"export: no citation count supplied for " + record.bibcode.str()};
    total += it->second;
  }

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<records query=\"" << xml::escape(query_echo) << "\" count=\"" << records.size()
      << "\" total_citations=\"" << total << "\">\n";
  for (const auto& record : records) {
    out << "  <record bibcode=\"" << xml::escape(record.bibcode.str()) << "\" citations=\""
        << counts.at(record.bibcode) << "\">\n";
    out << "    <title>" << xml::escape(record.title) << "</title>\n";
    for (const auto& author : record.authors) {
      std::string rendered = author.surname;
      if (!author.initials.empty()) rendered += ", " + author.initials;
      out << "    <author>" << xml::escape(rendered) << "</author>\n";
    }
    out << "    <year>" << record.pub_year << "</year>\n";
    out << "    <refereed>" << (record.refereed ? "true" : "false") << "</refereed>\n";
    out << "  </record>\n";
  }
  out << "</records>\n";
  return out.str();
}

namespace {

// RFC 822 date for January 1st of the publication year.
std::string rfc822_new_year(int year) {
  using namespace std::chrono;
  sys_days day{year_month_day{std::chrono::year{year}, January, std::chrono::day{1}}};
  static constexpr const char* kDays[] = {"Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};
  unsigned wd = weekday{day}.c_encoding();
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s, 01 Jan %04d 00:00:00 GMT", kDays[wd], year);
  return buf;
}

}  // namespace

std::string export_rss(const std::vector<corpus::BibRecord>& records,
                       const std::string& channel_title) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<rss version=\"2.0\">\n";
  out << "  <channel>\n";
  out << "    <title>" << xml::escape(channel_title) << "</title>\n";
  out << "    <link>urn:bibcite:query</link>\n";
  out << "    <description>" << xml::escape("Records matching: " + channel_title)
      << "</description>\n";
  for (const auto& record : records) {
    out << "    <item>\n";
    out << "      <title>" << xml::escape(record.title) << "</title>\n";
    out << "      <link>urn:bibcode:" << xml::escape(record.bibcode.str()) << "</link>\n";
    out << "      <guid isPermaLink=\"false\">urn:bibcode:" << xml::escape(record.bibcode.str())
        << "</guid>\n";
    out << "      <pubDate>" << rfc822_new_year(record.pub_year) << "</pubDate>\n";
    out << "    </item>\n";
  }
  out << "  </channel>\n";
  out << "</rss>\n";
  return out.str();
}

}  // namespace bibcite::exporter
