#include "bibcite/refparse.hpp"

#include <algorithm>
#include <cctype>

#include "doctest.h"

using namespace bibcite;
using namespace bibcite::refparse;

namespace {

RawDocument make_doc(const std::string& body) {
  RawDocument doc;
  doc.citing_bibcode = Bibcode::parse("2005IPM....41.1395K").value();
  doc.source_tag = "arxiv";
  doc.body_text = body;
  doc.received_date = Date::parse("2006-09-01").value();
  return doc;
}

RawReference make_raw(const std::string& text, int seq = 1) {
  RawReference raw;
  raw.citing_bibcode = Bibcode::parse("2005IPM....41.1395K").value();
  raw.source_tag = "arxiv";
  raw.sequence = seq;
  raw.text = text;
  raw.received_date = Date::parse("2006-09-01").value();
  return raw;
}

std::string non_ws(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

}  // namespace

TEST_CASE("extracts text after a heading on its own line") {
  auto doc = make_doc("Intro text.\nReferences\nSmith, J. 2001, ApJ, 550, 100\n");
  auto section = extract_reference_section(doc);
  REQUIRE(section.ok());
  CHECK(section.value() == "Smith, J. 2001, ApJ, 550, 100");
}

TEST_CASE("heading in running prose does not count") {
  auto doc = make_doc("As listed in the References above, nothing follows.\n");
  auto section = extract_reference_section(doc);
  REQUIRE_FALSE(section.ok());
}

TEST_CASE("the last matching heading wins") {
  auto doc = make_doc(
      "References\nOld list we do not want\n\nSome appendix.\n\nREFERENCES:\nJones, K. 2003, "
      "AJ, 126, 50\n");
  auto section = extract_reference_section(doc);
  REQUIRE(section.ok());
  CHECK(section.value() == "Jones, K. 2003, AJ, 126, 50");
}

TEST_CASE("numbered and alternate headings are recognized") {
  for (const char* heading :
       {"7. References", "VII. Bibliography", "[9] References", "Literature Cited:",
        "  references.  "}) {
    auto doc = make_doc(std::string("text\n") + heading + "\nSmith, J. 2001, ApJ, 550, 100\n");
    auto section = extract_reference_section(doc);
    REQUIRE_MESSAGE(section.ok(), heading);
  }
}

TEST_CASE("splitting on markers keeps order") {
  auto refs = split_reference_strings("[1] Alpha entry\n[2] Beta entry",
                                      Bibcode::parse("2005IPM....41.1395K").value(), "pub",
                                      Date::parse("2006-01-01").value());
  REQUIRE(refs.size() == 2);
  CHECK(refs[0].text == "Alpha entry");
  CHECK(refs[0].sequence == 1);
  CHECK(refs[1].text == "Beta entry");
  CHECK(refs[1].sequence == 2);
}

TEST_CASE("continuation lines merge into the previous reference") {
  auto refs = split_reference_strings("Smith, J. 2001,\n  ApJ, 550, 100",
                                      Bibcode::parse("2005IPM....41.1395K").value(), "pub",
                                      Date::parse("2006-01-01").value());
  REQUIRE(refs.size() == 1);
  CHECK(refs[0].text == "Smith, J. 2001, ApJ, 550, 100");
}

TEST_CASE("lowercase-initial lines continue the previous reference") {
  auto refs = split_reference_strings("Smith, J. 2001, ApJ,\nand further matter 550, 100",
                                      Bibcode::parse("2005IPM....41.1395K").value(), "pub",
                                      Date::parse("2006-01-01").value());
  REQUIRE(refs.size() == 1);
}

TEST_CASE("ten unmarked single-line entries become ten references") {
  std::string section;
  for (int i = 0; i < 10; ++i)
    section += "Author" + std::to_string(i) + ", A. 2000, AJ, 1, " + std::to_string(i + 1) + "\n";
  auto refs = split_reference_strings(section, Bibcode::parse("2005IPM....41.1395K").value(),
                                      "pub", Date::parse("2006-01-01").value());
  REQUIRE(refs.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK(refs[size_t(i)].sequence == i + 1);
}

TEST_CASE("splitting loses no non-whitespace characters beyond separators") {
  std::string section =
      "[1] Alpha, A. 2001, ApJ, 5, 10\n[2] Beta, B. 2002,\n  AJ, 6, 20\n\nGamma, C. 2003, "
      "MNRAS, 7, 30\n- Delta, D. 2004, SPIE, 8, 40\n";
  auto refs = split_reference_strings(section, Bibcode::parse("2005IPM....41.1395K").value(),
                                      "pub", Date::parse("2006-01-01").value());

  std::string survivors;
  for (const auto& r : refs) survivors += non_ws(r.text);

  std::string expected;
  for (const auto& line : split_lines(section)) expected += non_ws(strip_list_marker(line));
  CHECK(survivors == expected);
}

TEST_CASE("astronomy style parses all five fields") {
  auto parsed = parse_reference(make_raw("Accomazzi, A., et al. 1999, ASPC, 172, 291"), 0);
  REQUIRE(parsed.has_value());
  REQUIRE(parsed->authors.size() == 1);
  CHECK(parsed->authors[0].surname == "Accomazzi");
  CHECK(parsed->authors[0].initials == "A.");
  CHECK(parsed->year == 1999);
  CHECK(parsed->venue_token == "ASPC");
  CHECK(parsed->volume == "172");
  CHECK(parsed->page == "291");
  CHECK(parsed->confidence == doctest::Approx(1.0));
  CHECK(parsed->variant_index == 0);
}

TEST_CASE("multi-initial authors parse") {
  auto parsed = parse_reference(make_raw("Kurtz, M. J., et al. 2002, SPIE, 4847, 238"), 0);
  REQUIRE(parsed.has_value());
  CHECK(parsed->authors[0].surname == "Kurtz");
  CHECK(parsed->authors[0].initials == "M. J.");
  CHECK(parsed->year == 2002);
  CHECK(parsed->venue_token == "SPIE");
  CHECK(parsed->volume == "4847");
  CHECK(parsed->page == "238");
}

TEST_CASE("multi-author lists split on commas and 'and'") {
  auto parsed =
      parse_reference(make_raw("Smith, J., Jones, K., and Lee, W. 2001, ApJ, 550, 100"), 0);
  REQUIRE(parsed.has_value());
  REQUIRE(parsed->authors.size() == 3);
  CHECK(parsed->authors[1].surname == "Jones");
  CHECK(parsed->authors[2].initials == "W.");
}

TEST_CASE("unparseable scribble fails with no variants") {
  auto parsed = parse_reference(make_raw("mysterious scribble 12345"), 0);
  CHECK_FALSE(parsed.has_value());
  CHECK(parse_variants(make_raw("mysterious scribble 12345")).empty());
}

TEST_CASE("variant indexes walk alternate field assignments") {
  auto raw = make_raw("Demleitner, M. 2004, ccdm.conf, 521");
  auto variants = parse_variants(raw);
  REQUIRE(variants.size() == 3);

  CHECK(variants[0].venue_token == "ccdm.conf");
  CHECK(variants[0].volume == "521");
  CHECK_FALSE(variants[0].page.has_value());

  CHECK(variants[1].venue_token == "ccdm.conf");
  CHECK_FALSE(variants[1].volume.has_value());
  CHECK(variants[1].page == "521");

  // dotted venue split: proceedings identifier shape
  CHECK(variants[2].venue_token == "ccdm");
  CHECK(variants[2].volume == "conf");
  CHECK(variants[2].page == "521");
  CHECK(variants[2].variant_index == 2);

  CHECK_FALSE(parse_reference(raw, 3).has_value());
}

TEST_CASE("physics style with the year in parentheses") {
  auto parsed = parse_reference(make_raw("A. Guth, Phys. Rev. Lett. 23, 347 (1981)"), 0);
  REQUIRE(parsed.has_value());
  REQUIRE(parsed->authors.size() == 1);
  CHECK(parsed->authors[0].surname == "Guth");
  CHECK(parsed->authors[0].initials == "A.");
  CHECK(parsed->year == 1981);
  CHECK(parsed->venue_token == "Phys. Rev. Lett.");
  CHECK(parsed->volume == "23");
  CHECK(parsed->page == "347");
}

TEST_CASE("et-al only surnames parse without initials") {
  auto parsed = parse_reference(make_raw("Smith et al. 2001, ApJ, 550"), 0);
  REQUIRE(parsed.has_value());
  REQUIRE(parsed->authors.size() == 1);
  CHECK(parsed->authors[0].surname == "Smith");
  CHECK(parsed->authors[0].initials.empty());
  CHECK(parsed->volume == "550");
  // four of five fields
  CHECK(parsed->confidence == doctest::Approx(0.8));
}

TEST_CASE("bracket-numbered strings parse after marker stripping") {
  auto parsed = parse_reference(make_raw("[7] Smith, J. 2001, ApJ, 550, 100"), 0);
  REQUIRE(parsed.has_value());
  CHECK(parsed->authors[0].surname == "Smith");
  CHECK(parsed->confidence == doctest::Approx(1.0));
}

TEST_CASE("parsing is deterministic") {
  auto raw = make_raw("Kurtz, M. J., et al. 2002, SPIE, 4847, 238");
  auto a = parse_variants(raw);
  auto b = parse_variants(raw);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].venue_token == b[i].venue_token);
    CHECK(a[i].volume == b[i].volume);
    CHECK(a[i].page == b[i].page);
    CHECK(a[i].confidence == b[i].confidence);
  }
}

TEST_CASE("confidence zero is never a successful parse") {
  for (const char* text : {"", "   ", "????", "no year here at all"}) {
    auto variants = parse_variants(make_raw(text));
    for (const auto& v : variants) CHECK(v.confidence > 0.0);
  }
}

TEST_CASE("document pipeline extracts, splits and tags references") {
  auto doc = make_doc(
      "Title page\n\nLong body of prose.\n\nReferences\n[1] Accomazzi, A., et al. 1999, ASPC, "
      "172, 291\n[2] Kurtz, M. J., et al. 2002, SPIE, 4847, 238\n");
  auto refs = pipeline_from_document(doc);
  REQUIRE(refs.ok());
  REQUIRE(refs.value().size() == 2);
  CHECK(refs.value()[0].citing_bibcode == doc.citing_bibcode);
  CHECK(refs.value()[0].source_tag == "arxiv");
  CHECK(refs.value()[1].sequence == 2);
}

TEST_CASE("reference ingest file parses blocks and keeps sequences unique") {
  const char* text =
      "%%R 2005IPM....41.1395K %%S arxiv %%D 2005-06-01\n"
      "Accomazzi, A., et al. 1999, ASPC, 172, 291\n"
      "Kurtz, M. J., et al. 2002, SPIE, 4847, 238\n"
      "\n"
      "%%R 2003AAS...203.2005K %%S ucp %%D 2004-01-15\n"
      "Smith, J. 2001, ApJ, 550, 100\n"
      "\n"
      "%%R 2005IPM....41.1395K %%S arxiv %%D 2005-06-01\n"
      "Jones, K. 2003, AJ, 126, 50\n";
  auto result = parse_reference_file(text);
  CHECK(result.errors.empty());
  REQUIRE(result.references.size() == 4);
  CHECK(result.references[0].sequence == 1);
  CHECK(result.references[1].sequence == 2);
  CHECK(result.references[2].sequence == 1);
  CHECK(result.references[3].sequence == 3);  // continues the first block's numbering

  // round trip through the renderer
  auto rendered = render_reference_file(result.references);
  auto reparsed = parse_reference_file(rendered);
  CHECK(reparsed.errors.empty());
  CHECK(reparsed.references.size() == result.references.size());
}

TEST_CASE("raw document files carry the header and body") {
  auto doc = parse_raw_document_file(
      "%%R 2005IPM....41.1395K %%S arxiv %%D 2006-09-01\nBody text.\nReferences\nSmith, J. "
      "2001, ApJ, 550, 100\n");
  REQUIRE(doc.ok());
  CHECK(doc.value().source_tag == "arxiv");
  auto refs = pipeline_from_document(doc.value());
  REQUIRE(refs.ok());
  CHECK(refs.value().size() == 1);
}
