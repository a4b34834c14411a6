#include "bibcite/export.hpp"

#include <fstream>
#include <sstream>

#include "bibcite/xml.hpp"
#include "doctest.h"

using namespace bibcite;
using namespace bibcite::exporter;

namespace {

corpus::BibRecord record_of(const std::string& bibcode, const std::string& title, bool refereed) {
  corpus::BibRecord r;
  r.bibcode = Bibcode::parse(bibcode).value();
  r.title = title;
  r.authors = {{"Kurtz", "M. J."}, {"Eichhorn", "G."}};
  r.pub_year = r.bibcode.year();
  r.venue = r.bibcode.venue_code();
  r.kind = corpus::RecordKind::journal;
  r.refereed = refereed;
  r.ingest_date = Date::parse("2006-01-01").value();
  return r;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

xml::SchemaValidator shipped_validator() {
  auto validator = xml::SchemaValidator::from_xsd(read_file(TEST_SCHEMA_PATH));
  REQUIRE(validator.ok());
  return std::move(validator).value();
}

}  // namespace

TEST_CASE("two records with counts 3 and 1 total 4") {
  auto a = record_of("2005IPM....41.1395K", "Worldwide use and impact", true);
  auto b = record_of("2002SPIE.4847..238K", "Second-order operators at work", true);
  std::map<Bibcode, long> counts = {{a.bibcode, 3}, {b.bibcode, 1}};

  auto text = export_xml_abstracts({a, b}, counts, "kurtz citations");
  REQUIRE(text.ok());

  auto doc = xml::parse_document(text.value());
  REQUIRE(doc.ok());
  CHECK(*doc.value().attr("count") == "2");
  CHECK(*doc.value().attr("total_citations") == "4");
  CHECK(*doc.value().attr("query") == "kurtz citations");
  REQUIRE(doc.value().children.size() == 2);
  CHECK(*doc.value().children[0].attr("citations") == "3");
  CHECK(doc.value().children[0].first_child("year")->text == "2005");
  CHECK(doc.value().children[0].first_child("refereed")->text == "true");
  CHECK(doc.value().children[0].children_named("author").size() == 2);

  CHECK(shipped_validator().validate(doc.value()).ok());
}

TEST_CASE("empty result set still renders a valid document") {
  auto text = export_xml_abstracts({}, {}, "nothing");
  REQUIRE(text.ok());
  auto doc = xml::parse_document(text.value());
  REQUIRE(doc.ok());
  CHECK(*doc.value().attr("count") == "0");
  CHECK(*doc.value().attr("total_citations") == "0");
  CHECK(shipped_validator().validate(doc.value()).ok());
}

TEST_CASE("markup characters in titles are escaped and survive") {
  auto rec = record_of("2005IPM....41.1395K", "Dust & gas <at> z>6", true);
  std::map<Bibcode, long> counts = {{rec.bibcode, 2}};
  auto text = export_xml_abstracts({rec}, counts, "dust & gas");
  REQUIRE(text.ok());
  auto doc = xml::parse_document(text.value());
  REQUIRE(doc.ok());
  CHECK(doc.value().children[0].first_child("title")->text == "Dust & gas <at> z>6");
  CHECK(*doc.value().attr("query") == "dust & gas");
  CHECK(shipped_validator().validate(doc.value()).ok());
}

TEST_CASE("a record without a count is a hard error") {
  auto rec = record_of("2005IPM....41.1395K", "t", true);
  auto text = export_xml_abstracts({rec}, {}, "q");
  REQUIRE_FALSE(text.ok());
  CHECK(text.error().message.find("2005IPM....41.1395K") != std::string::npos);
}

TEST_CASE("export output is byte-identical across runs") {
  auto rec = record_of("2005IPM....41.1395K", "Worldwide use and impact", true);
  std::map<Bibcode, long> counts = {{rec.bibcode, 3}};
  CHECK(export_xml_abstracts({rec}, counts, "q").value() ==
        export_xml_abstracts({rec}, counts, "q").value());
  CHECK(export_rss({rec}, "feed") == export_rss({rec}, "feed"));
}

TEST_CASE("rss carries required elements and no counts") {
  auto a = record_of("2005IPM....41.1395K", "Worldwide use and impact", true);
  auto b = record_of("2002SPIE.4847..238K", "Second-order operators at work", true);
  auto c = record_of("1999ASPC..172..291A", "Reference resolution in practice", true);

  auto text = export_rss({a, b, c}, "kurtz feed");
  auto doc = xml::parse_document(text);
  REQUIRE(doc.ok());
  const auto& rss = doc.value();
  CHECK(rss.name == "rss");
  REQUIRE(rss.attr("version") != nullptr);
  CHECK(*rss.attr("version") == "2.0");
  const auto* channel = rss.first_child("channel");
  REQUIRE(channel != nullptr);
  CHECK(channel->first_child("title") != nullptr);
  CHECK(channel->first_child("link") != nullptr);
  CHECK(channel->first_child("description") != nullptr);
  auto items = channel->children_named("item");
  REQUIRE(items.size() == 3);
  for (const auto* item : items) {
    CHECK(item->first_child("title") != nullptr);
    REQUIRE(item->first_child("link") != nullptr);
    CHECK(item->first_child("link")->text.find("urn:bibcode:") == 0);
    REQUIRE(item->first_child("pubDate") != nullptr);
    CHECK(item->first_child("pubDate")->text.find("GMT") != std::string::npos);
  }
  // no citation counts anywhere in the feed
  CHECK(text.find("citation") == std::string::npos);
  CHECK(text.find("count") == std::string::npos);
}

TEST_CASE("empty rss channel is still well-formed") {
  auto text = export_rss({}, "empty feed");
  auto doc = xml::parse_document(text);
  REQUIRE(doc.ok());
  CHECK(doc.value().first_child("channel")->children_named("item").empty());
}

TEST_CASE("feed diff across two builds reveals newly added records") {
  auto a = record_of("2005IPM....41.1395K", "Worldwide use and impact", true);
  auto b = record_of("2002SPIE.4847..238K", "Second-order operators at work", true);

  auto before = xml::parse_document(export_rss({a}, "feed")).value();
  auto after = xml::parse_document(export_rss({a, b}, "feed")).value();

  auto links = [](const xml::Element& rss) {
    std::set<std::string> out;
    for (const auto* item : rss.first_child("channel")->children_named("item"))
      out.insert(item->first_child("link")->text);
    return out;
  };
  auto before_links = links(before), after_links = links(after);
  std::vector<std::string> fresh;
  for (const auto& l : after_links)
    if (!before_links.count(l)) fresh.push_back(l);
  REQUIRE(fresh.size() == 1);
  CHECK(fresh[0] == "urn:bibcode:2002SPIE.4847..238K");
}
