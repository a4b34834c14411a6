#include "bibcite/resolver.hpp"

#include "doctest.h"

using namespace bibcite;
using namespace bibcite::resolver;

namespace {

corpus::BibRecord record_for(const std::string& bibcode, const std::string& title,
                             std::vector<corpus::AuthorName> authors,
                             corpus::RecordKind kind = corpus::RecordKind::journal) {
  corpus::BibRecord r;
  r.bibcode = Bibcode::parse(bibcode).value();
  r.title = title;
  r.authors = std::move(authors);
  r.pub_year = r.bibcode.year();
  r.venue = r.bibcode.venue_code();
  if (!r.bibcode.volume().empty()) r.volume = r.bibcode.volume();
  if (!r.bibcode.page().empty()) r.first_page = r.bibcode.page();
  r.kind = kind;
  r.refereed = kind == corpus::RecordKind::journal;
  r.ingest_date = Date::parse("2006-01-01").value();
  return r;
}

refparse::RawReference raw_for(const std::string& citing, const std::string& text, int seq = 1,
                               const std::string& source = "pub") {
  refparse::RawReference raw;
  raw.citing_bibcode = Bibcode::parse(citing).value();
  raw.source_tag = source;
  raw.sequence = seq;
  raw.text = text;
  raw.received_date = Date::parse("2006-06-01").value();
  return raw;
}

VenueAbbrevTable demo_table() {
  VenueAbbrevTable table;
  REQUIRE(table.add_alias("ASPC", "ASPC").ok());
  REQUIRE(table.add_alias("IPM", "IPM").ok());
  REQUIRE(table.add_alias("SPIE", "SPIE").ok());
  REQUIRE(table.add_alias("ApJ", "ApJ").ok());
  REQUIRE(table.add_alias("AJ", "AJ").ok());
  REQUIRE(table.add_alias("ccdm", "ccdm").ok());
  REQUIRE(table.add_alias("Astrophys. J.", "ApJ").ok());
  return table;
}

refparse::ParsedReference parsed_fixture() {
  refparse::ParsedReference parsed;
  parsed.raw = raw_for("2005IPM....41.1395K", "Accomazzi, A., et al. 1999, ASPC, 172, 291");
  parsed.authors = {{"Accomazzi", "A."}};
  parsed.year = 1999;
  parsed.venue_token = "ASPC";
  parsed.volume = "172";
  parsed.page = "291";
  parsed.confidence = 1.0;
  return parsed;
}

}  // namespace

TEST_CASE("venue table canonicalizes aliases") {
  auto table = demo_table();
  CHECK(table.lookup("aspc") == std::vector<std::string>{"ASPC"});
  CHECK(table.lookup("Astrophys. J.") == std::vector<std::string>{"ApJ"});
  CHECK(table.lookup("ASTROPHYS.  J.") == std::vector<std::string>{"ApJ"});
  CHECK(table.lookup("J. Unknownia").empty());
}

TEST_CASE("venue table file round trip and multi-expansion") {
  auto parsed = VenueAbbrevTable::parse("apj\tApJ\n# comment\napj\tApJS\naspc\tASPC\n");
  REQUIRE(parsed.ok());
  CHECK(parsed.value().lookup("ApJ") == std::vector<std::string>{"ApJ", "ApJS"});
  auto rendered = parsed.value().render();
  auto reparsed = VenueAbbrevTable::parse(rendered);
  REQUIRE(reparsed.ok());
  CHECK(reparsed.value().render() == rendered);
}

TEST_CASE("venue table rejects over-long codes") {
  VenueAbbrevTable table;
  CHECK_FALSE(table.add_alias("something", "TOOLONG").ok());
  CHECK_FALSE(table.add_alias("", "AJ").ok());
}

TEST_CASE("resolution config parse and validation") {
  auto config = ResolutionConfig::parse("threshold = 0.9\nmax_variants = 2\n");
  REQUIRE(config.ok());
  CHECK(config.value().threshold == doctest::Approx(0.9));
  CHECK(config.value().max_variants == 2);

  CHECK_FALSE(ResolutionConfig::parse("threshold = 1.5\n").ok());
  CHECK_FALSE(ResolutionConfig::parse("weight_year = 0.9\n").ok());
  CHECK_FALSE(ResolutionConfig::parse("nonsense = 1\n").ok());

  ResolutionConfig defaults;
  CHECK(defaults.validate().ok());
}

TEST_CASE("tentative identifiers from parsed tokens") {
  auto table = demo_table();
  auto parsed = parsed_fixture();
  auto codes = tentative_bibcodes(parsed, table);
  REQUIRE(codes.ok());
  REQUIRE(codes.value().size() == 1);
  CHECK(codes.value()[0].str() == "1999ASPC..172..291A");
}

TEST_CASE("tentative identifier for a journal article") {
  auto table = demo_table();
  refparse::ParsedReference parsed;
  parsed.authors = {{"Kurtz", "M. J."}};
  parsed.year = 2005;
  parsed.venue_token = "IPM";
  parsed.volume = "41";
  parsed.page = "1395";
  auto codes = tentative_bibcodes(parsed, table);
  REQUIRE(codes.ok());
  REQUIRE(codes.value().size() == 1);
  CHECK(codes.value()[0].str() == "2005IPM....41.1395K");
}

TEST_CASE("unmapped venue yields no candidates; missing year is an error") {
  auto table = demo_table();
  auto parsed = parsed_fixture();
  parsed.venue_token = "J. Unknownia";
  auto codes = tentative_bibcodes(parsed, table);
  REQUIRE(codes.ok());
  CHECK(codes.value().empty());

  parsed.year.reset();
  CHECK_FALSE(tentative_bibcodes(parsed, table).ok());
}

TEST_CASE("an alias with two expansions yields two candidates") {
  VenueAbbrevTable table;
  REQUIRE(table.add_alias("apj", "ApJ").ok());
  REQUIRE(table.add_alias("apj", "ApJS").ok());
  refparse::ParsedReference parsed;
  parsed.authors = {{"Smith", "J."}};
  parsed.year = 2001;
  parsed.venue_token = "ApJ";
  parsed.volume = "550";
  parsed.page = "100";
  auto codes = tentative_bibcodes(parsed, table);
  REQUIRE(codes.ok());
  REQUIRE(codes.value().size() == 2);
  CHECK(codes.value()[0].str() == "2001ApJ...550..100S");
  CHECK(codes.value()[1].str() == "2001ApJS..550..100S");
}

TEST_CASE("similarity is 1 on identical fields and 0 on none") {
  auto table = demo_table();
  ResolutionConfig config;
  auto record = record_for("1999ASPC..172..291A", "t", {{"Accomazzi", "A."}});
  CHECK(similarity_score(parsed_fixture(), record, table, config) == doctest::Approx(1.0));

  refparse::ParsedReference nothing;
  nothing.authors = {{"Zebra", "Q."}};
  nothing.year = 1950;
  nothing.venue_token = "XXXX";
  nothing.volume = "9";
  nothing.page = "9";
  auto far = record_for("2002SPIE.4847..238K", "t", {{"Kurtz", "M. J."}});
  CHECK(similarity_score(nothing, far, table, config) == doctest::Approx(0.0));
}

TEST_CASE("year off by one costs half the year weight") {
  auto table = demo_table();
  ResolutionConfig config;
  auto parsed = parsed_fixture();
  parsed.year = 1998;  // record is 1999
  auto record = record_for("1999ASPC..172..291A", "t", {{"Accomazzi", "A."}});
  // 0.25 * 0.5 + 0.25 + 0.25 + 0.25
  CHECK(similarity_score(parsed, record, table, config) == doctest::Approx(0.875));
}

TEST_CASE("initial disagreement breaks near-ties below full score") {
  auto table = demo_table();
  ResolutionConfig config;
  auto parsed = parsed_fixture();
  parsed.authors = {{"Accomazzi", "Z."}};
  auto record = record_for("1999ASPC..172..291A", "t", {{"Accomazzi", "A."}});
  double score = similarity_score(parsed, record, table, config);
  CHECK(score < 1.0);
  CHECK(score == doctest::Approx(0.25 * 0.95 + 0.75));
}

TEST_CASE("resolve matches the record for a clean reference") {
  corpus::RecordStore store;
  REQUIRE(store.add_record(record_for("2005IPM....41.1395K", "citing paper", {{"Kurtz", "M. J."}}))
              .ok());
  REQUIRE(store
              .add_record(record_for("1999ASPC..172..291A", "cited paper", {{"Accomazzi", "A."}}))
              .ok());
  auto outcome =
      resolve_reference(raw_for("2005IPM....41.1395K", "Accomazzi, A., et al. 1999, ASPC, 172, 291"),
                        store, demo_table(), ResolutionConfig{});
  auto* resolved = std::get_if<ResolvedReference>(&outcome);
  REQUIRE(resolved != nullptr);
  CHECK(resolved->cited.str() == "1999ASPC..172..291A");
  CHECK(resolved->score == doctest::Approx(1.0));
  CHECK(resolved->citing.str() == "2005IPM....41.1395K");
}

TEST_CASE("the dotted proceedings reference resolves through a later variant") {
  corpus::RecordStore store;
  REQUIRE(store.add_record(record_for("2005IPM....41.1395K", "citing", {{"Kurtz", "M. J."}})).ok());
  REQUIRE(store
              .add_record(record_for("2004ccdm.conf..521D", "library interoperability",
                                     {{"Demleitner", "M."}}))
              .ok());
  auto outcome = resolve_reference(raw_for("2005IPM....41.1395K",
                                           "Demleitner, M. 2004, ccdm.conf, 521"),
                                   store, demo_table(), ResolutionConfig{});
  auto* resolved = std::get_if<ResolvedReference>(&outcome);
  REQUIRE(resolved != nullptr);
  CHECK(resolved->cited.str() == "2004ccdm.conf..521D");
}

TEST_CASE("absent target records leave the reference unresolved with no_candidate") {
  corpus::RecordStore store;
  REQUIRE(store.add_record(record_for("2005IPM....41.1395K", "citing", {{"Kurtz", "M. J."}})).ok());
  auto outcome = resolve_reference(raw_for("2005IPM....41.1395K",
                                           "Demleitner, M. 2004, ccdm.conf, 521"),
                                   store, demo_table(), ResolutionConfig{});
  auto* unresolved = std::get_if<UnresolvedReference>(&outcome);
  REQUIRE(unresolved != nullptr);
  CHECK(unresolved->reason == UnresolvedReason::no_candidate);
  CHECK(unresolved->best_guess.has_value());
}

TEST_CASE("a candidate lacking volume and page fields scores below threshold") {
  corpus::RecordStore store;
  REQUIRE(store.add_record(record_for("2005IPM....41.1395K", "citing", {{"Kurtz", "M. J."}})).ok());
  // record exists under the tentative identifier but carries no volume/page
  // metadata, so only year, authors and venue agree
  corpus::BibRecord sparse;
  sparse.bibcode = Bibcode::parse("2003lisa.conf..185S").value();
  sparse.title = "comparative library study";
  sparse.authors = {{"Smith", "S."}};
  sparse.pub_year = 2003;
  sparse.venue = "lisa";
  sparse.kind = corpus::RecordKind::journal;
  sparse.refereed = true;
  sparse.ingest_date = Date::parse("2006-01-01").value();
  REQUIRE(store.add_record(sparse).ok());

  auto table = demo_table();
  REQUIRE(table.add_alias("lisa", "lisa").ok());
  auto outcome = resolve_reference(
      raw_for("2005IPM....41.1395K", "Smith, S. 2003, lisa.conf, 185"), store, table,
      ResolutionConfig{});
  auto* unresolved = std::get_if<UnresolvedReference>(&outcome);
  REQUIRE(unresolved != nullptr);
  CHECK(unresolved->reason == UnresolvedReason::below_threshold);
  // year (0.25) + authors (0.25) + venue (0.25); both match indicators 0
  CHECK(unresolved->best_score == doctest::Approx(0.75));
  REQUIRE(unresolved->best_guess.has_value());
}

TEST_CASE("parse failures carry the raw text for accounting") {
  corpus::RecordStore store;
  REQUIRE(store.add_record(record_for("2005IPM....41.1395K", "citing", {{"Kurtz", "M. J."}})).ok());
  auto outcome = resolve_reference(raw_for("2005IPM....41.1395K", "mysterious scribble 12345"),
                                   store, demo_table(), ResolutionConfig{});
  auto* unresolved = std::get_if<UnresolvedReference>(&outcome);
  REQUIRE(unresolved != nullptr);
  CHECK(unresolved->reason == UnresolvedReason::parse_failed);
  CHECK(unresolved->raw.text == "mysterious scribble 12345");
}

TEST_CASE("unknown citing bibcode is a batch-level error") {
  corpus::RecordStore store;
  auto outcome = resolve_reference(raw_for("2005IPM....41.1395K", "Smith, J. 2001, ApJ, 550, 100"),
                                   store, demo_table(), ResolutionConfig{});
  CHECK(std::holds_alternative<Error>(outcome));
}

TEST_CASE("self pairs are rejected as no_candidate") {
  corpus::RecordStore store;
  REQUIRE(store
              .add_record(record_for("1999ASPC..172..291A", "self-citing oddity",
                                     {{"Accomazzi", "A."}}))
              .ok());
  auto outcome = resolve_reference(
      raw_for("1999ASPC..172..291A", "Accomazzi, A. 1999, ASPC, 172, 291"), store, demo_table(),
      ResolutionConfig{});
  auto* unresolved = std::get_if<UnresolvedReference>(&outcome);
  REQUIRE(unresolved != nullptr);
  CHECK(unresolved->reason == UnresolvedReason::no_candidate);
}

TEST_CASE("letters-section qualifier is probed when the exact lookup misses") {
  corpus::RecordStore store;
  REQUIRE(store.add_record(record_for("2005IPM....41.1395K", "citing", {{"Kurtz", "M. J."}})).ok());
  REQUIRE(store
              .add_record(record_for("2001ApJ...550L.100S", "letter to the editor",
                                     {{"Smith", "J."}}))
              .ok());
  auto outcome = resolve_reference(
      raw_for("2005IPM....41.1395K", "Smith, J. 2001, ApJ, 550, 100"), store, demo_table(),
      ResolutionConfig{});
  auto* resolved = std::get_if<ResolvedReference>(&outcome);
  REQUIRE(resolved != nullptr);
  CHECK(resolved->cited.str() == "2001ApJ...550L.100S");
}

TEST_CASE("exact candidate ties resolve to nothing and are flagged") {
  corpus::RecordStore store;
  REQUIRE(store.add_record(record_for("2005IPM....41.1395K", "citing", {{"Kurtz", "M. J."}})).ok());
  // two venue expansions with records that score identically
  REQUIRE(store.add_record(record_for("2001ApJ...550..100S", "one", {{"Smith", "J."}})).ok());
  REQUIRE(store.add_record(record_for("2001ApJS..550..100S", "two", {{"Smith", "J."}})).ok());
  VenueAbbrevTable table;
  REQUIRE(table.add_alias("apj", "ApJ").ok());
  REQUIRE(table.add_alias("apj", "ApJS").ok());

  auto outcome = resolve_reference(
      raw_for("2005IPM....41.1395K", "Smith, J. 2001, ApJ, 550, 100"), store, table,
      ResolutionConfig{});
  auto* unresolved = std::get_if<UnresolvedReference>(&outcome);
  REQUIRE(unresolved != nullptr);
  CHECK(unresolved->reason == UnresolvedReason::below_threshold);
  CHECK(unresolved->note.find("ambiguous") != std::string::npos);
}

TEST_CASE("batch keeps order, tallies sources, and never aborts") {
  corpus::RecordStore store;
  REQUIRE(store.add_record(record_for("2005IPM....41.1395K", "citing a", {{"Kurtz", "M. J."}})).ok());
  REQUIRE(store.add_record(record_for("2003AAS...203.2005K", "citing b", {{"Kurtz", "M. J."}})).ok());
  REQUIRE(store.add_record(record_for("1999ASPC..172..291A", "cited", {{"Accomazzi", "A."}})).ok());
  REQUIRE(store.add_record(record_for("2002SPIE.4847..238K", "cited 2", {{"Kurtz", "M. J."}})).ok());

  std::vector<refparse::RawReference> raws = {
      raw_for("2005IPM....41.1395K", "Accomazzi, A., et al. 1999, ASPC, 172, 291", 1, "arxiv"),
      raw_for("2005IPM....41.1395K", "garbage garbage", 2, "arxiv"),
      raw_for("2003AAS...203.2005K", "Kurtz, M. J., et al. 2002, SPIE, 4847, 238", 1, "ucp"),
  };
  auto batch = resolve_batch(raws, store, demo_table(), ResolutionConfig{},
                             ExecutionMode::serial);
  CHECK(batch.resolved.size() == 2);
  CHECK(batch.unresolved.size() == 1);
  CHECK(batch.errors.empty());
  CHECK(batch.per_source.at("arxiv").attempted == 2);
  CHECK(batch.per_source.at("arxiv").resolved == 1);
  CHECK(batch.per_source.at("ucp").attempted == 1);
  CHECK(batch.per_source.at("ucp").resolved == 1);
  // order preserved
  CHECK(batch.resolved[0].cited.str() == "1999ASPC..172..291A");
  CHECK(batch.resolved[1].cited.str() == "2002SPIE.4847..238K");
}

TEST_CASE("empty batch input gives an all-empty result") {
  corpus::RecordStore store;
  auto batch =
      resolve_batch({}, store, demo_table(), ResolutionConfig{}, ExecutionMode::serial);
  CHECK(batch.resolved.empty());
  CHECK(batch.unresolved.empty());
  CHECK(batch.per_source.empty());
  CHECK(batch.errors.empty());
}

TEST_CASE("raising the threshold never grows the resolved set") {
  corpus::RecordStore store;
  REQUIRE(store.add_record(record_for("2005IPM....41.1395K", "citing", {{"Kurtz", "M. J."}})).ok());
  REQUIRE(store.add_record(record_for("1999ASPC..172..291A", "a", {{"Accomazzi", "A."}})).ok());
  REQUIRE(store.add_record(record_for("2001ApJ...550..100S", "b", {{"Smith", "J."}})).ok());
  corpus::BibRecord sparse;  // no volume/page fields: scores 0.75 when found
  sparse.bibcode = Bibcode::parse("2003lisa.conf..185S").value();
  sparse.title = "comparative study";
  sparse.authors = {{"Smith", "S."}};
  sparse.pub_year = 2003;
  sparse.venue = "lisa";
  sparse.kind = corpus::RecordKind::journal;
  sparse.refereed = true;
  sparse.ingest_date = Date::parse("2006-01-01").value();
  REQUIRE(store.add_record(sparse).ok());

  auto table = demo_table();
  REQUIRE(table.add_alias("lisa", "lisa").ok());

  std::vector<refparse::RawReference> raws = {
      // score 1.0
      raw_for("2005IPM....41.1395K", "Accomazzi, A., et al. 1999, ASPC, 172, 291", 1),
      // surname typo, edit similarity 0.4 by hand: score 0.85
      raw_for("2005IPM....41.1395K", "Smead, J. 2001, ApJ, 550, 100", 2),
      // volume/page fields missing on the record: score 0.75
      raw_for("2005IPM....41.1395K", "Smith, S. 2003, lisa.conf, 185", 3),
      // never parses
      raw_for("2005IPM....41.1395K", "mysterious scribble 12345", 4),
  };

  std::vector<size_t> sizes;
  for (double threshold : {0.5, 0.8, 0.95}) {
    ResolutionConfig config;
    config.threshold = threshold;
    auto batch = resolve_batch(raws, store, table, config, ExecutionMode::serial);
    sizes.push_back(batch.resolved.size());
  }
  CHECK(sizes == std::vector<size_t>{3, 2, 1});
}

TEST_CASE("resolved and unresolved tables round trip") {
  ResolvedReference r;
  r.citing = Bibcode::parse("2005IPM....41.1395K").value();
  r.cited = Bibcode::parse("1999ASPC..172..291A").value();
  r.score = 1.0;
  r.source_tag = "arxiv";
  r.resolved_date = Date::parse("2006-06-01").value();
  auto text = render_resolved_table({r});
  CHECK(text ==
        "2005IPM....41.1395K\t1999ASPC..172..291A\t1.0000\tarxiv\t2006-06-01\n");
  auto parsed = parse_resolved_table(text);
  REQUIRE(parsed.ok());
  REQUIRE(parsed.value().size() == 1);
  CHECK(parsed.value()[0].citing == r.citing);
  CHECK(parsed.value()[0].cited == r.cited);
  CHECK(parsed.value()[0].score == doctest::Approx(1.0));

  UnresolvedReference u;
  u.raw = raw_for("2005IPM....41.1395K", "Einstein, A. 1905, AnP, 17, 891", 4);
  refparse::ParsedReference guess;
  guess.raw = u.raw;
  guess.authors = {{"Einstein", "A."}};
  guess.year = 1905;
  guess.venue_token = "AnP";
  u.best_guess = guess;
  u.best_score = 0.25;
  u.reason = UnresolvedReason::no_candidate;
  auto utext = render_unresolved_table({u});
  auto uparsed = parse_unresolved_table(utext);
  REQUIRE(uparsed.ok());
  REQUIRE(uparsed.value().size() == 1);
  CHECK(uparsed.value()[0].reason == UnresolvedReason::no_candidate);
  CHECK(uparsed.value()[0].best_guess->year == 1905);
  CHECK(render_unresolved_table(uparsed.value()) == utext);
}

TEST_CASE("source counts merge across runs") {
  std::map<std::string, SourceCount> a, b;
  a["arxiv"] = SourceCount{10, 8, Date::parse("2005-01-01").value(),
                           Date::parse("2005-12-31").value()};
  b["arxiv"] = SourceCount{5, 5, Date::parse("2006-01-01").value(),
                           Date::parse("2006-06-01").value()};
  b["ucp"] = SourceCount{2, 1, Date::parse("2006-02-01").value(),
                         Date::parse("2006-02-01").value()};
  merge_source_counts(a, b);
  CHECK(a["arxiv"].attempted == 15);
  CHECK(a["arxiv"].resolved == 13);
  CHECK(a["arxiv"].first_date->to_string() == "2005-01-01");
  CHECK(a["arxiv"].last_date->to_string() == "2006-06-01");
  CHECK(a["ucp"].attempted == 2);

  auto text = render_source_counts(a);
  auto parsed = parse_source_counts(text);
  REQUIRE(parsed.ok());
  CHECK(render_source_counts(parsed.value()) == text);
}
