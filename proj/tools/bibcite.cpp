// Command-line pipeline: ingest -> resolve -> build-index -> query/report/
// export/alerts. One stage per invocation; state lives in flat files under
// the workspace directory. Data goes to stdout, diagnostics to stderr.
// Exit codes: 0 success, 1 input error, 2 internal error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bibcite/alerts.hpp"
#include "bibcite/citegraph.hpp"
#include "bibcite/corpus.hpp"
#include "bibcite/export.hpp"
#include "bibcite/metrics.hpp"
#include "bibcite/refparse.hpp"
#include "bibcite/resolver.hpp"

namespace fs = std::filesystem;
using namespace bibcite;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInternal = 2;

struct CliError {
  std::string message;
};

[[noreturn]] void fail(const std::string& message) { throw CliError{message}; }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) fail("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out.good()) fail("cannot write " + path.string());
  out << content;
}

std::string read_if_exists(const fs::path& path) {
  if (!fs::exists(path)) return "";
  return read_file(path);
}

template <typename T>
T unwrap(Result<T> result) {
  if (!result.ok()) fail(result.error().message);
  return std::move(result).value();
}

Date parse_date_arg(const std::string& text) { return unwrap(Date::parse(text)); }

Bibcode parse_bibcode_arg(const std::string& text) { return unwrap(Bibcode::parse(text)); }

ExecutionMode parse_mode(const std::string& text) {
  if (text == "serial") return ExecutionMode::serial;
  if (text == "parallel") return ExecutionMode::parallel;
  fail("mode must be 'serial' or 'parallel'");
}

// ---------------------------------------------------------------------------
// Workspace: flat-file state between invocations
// ---------------------------------------------------------------------------

struct Workspace {
  fs::path dir;

  fs::path records_db() const { return dir / "records.db"; }
  fs::path links_tsv() const { return dir / "links.tsv"; }
  fs::path refs_db() const { return dir / "refs.db"; }
  fs::path resolved_tsv() const { return dir / "resolved.tsv"; }
  fs::path unresolved_tsv() const { return dir / "unresolved.tsv"; }
  fs::path source_counts_tsv() const { return dir / "source_counts.tsv"; }
  fs::path index_tsv() const { return dir / "index.tsv"; }
  fs::path index_manifest() const { return dir / "index_manifest.json"; }
  fs::path queries_db() const { return dir / "queries.db"; }
  fs::path alerts_baseline_tsv() const { return dir / "alerts_baseline.tsv"; }

  corpus::RecordStore load_store() const {
    corpus::RecordStore store;
    std::string records = read_if_exists(records_db());
    if (!records.empty()) {
      auto stats = unwrap(corpus::ingest_records_text(store, records, Date{}));
      for (const auto& error : stats.errors) std::cerr << "records.db: " << error << "\n";
    }
    std::string links = read_if_exists(links_tsv());
    if (!links.empty()) {
      for (const auto& link : unwrap(corpus::parse_links(links))) store.restore_link(link);
    }
    // reference availability is derived from the reference file
    for (const auto& raw : load_refs()) store.note_references_ingested(raw.citing_bibcode);
    return store;
  }

  void save_store(const corpus::RecordStore& store) const {
    write_file(records_db(), corpus::render_records_text(store));
    write_file(links_tsv(), corpus::render_links(store.all_links()));
  }

  std::vector<refparse::RawReference> load_refs() const {
    std::string text = read_if_exists(refs_db());
    if (text.empty()) return {};
    auto result = refparse::parse_reference_file(text);
    for (const auto& error : result.errors) std::cerr << "refs.db: " << error << "\n";
    return result.references;
  }

  std::vector<resolver::ResolvedReference> load_resolved() const {
    std::string text = read_if_exists(resolved_tsv());
    if (text.empty()) return {};
    return unwrap(resolver::parse_resolved_table(text));
  }

  citegraph::CitationIndex load_index() const {
    if (!fs::exists(index_tsv())) fail("no citation index yet; run build-index first");
    return unwrap(
        citegraph::load_index(read_file(index_tsv()), read_if_exists(index_manifest())));
  }

  alerts::QueryRegistry load_queries() const {
    std::string text = read_if_exists(queries_db());
    if (text.empty()) return {};
    return unwrap(alerts::QueryRegistry::parse(text));
  }
};

resolver::VenueAbbrevTable load_venues(const std::string& path) {
  if (path.empty()) fail("a venue table is required; pass --venues <file>");
  return unwrap(resolver::VenueAbbrevTable::parse(read_file(path)));
}

metrics::CitationFilter build_filter(bool refereed, const std::string& year_range,
                                     const std::string& authors_file) {
  metrics::CitationFilter filter;
  filter.refereed_only = refereed;
  if (!year_range.empty()) {
    auto parts = split(year_range, ':');
    if (parts.size() != 2) fail("--year expects A:B");
    if (!parts[0].empty()) filter.year_min = std::atoi(parts[0].c_str());
    if (!parts[1].empty()) filter.year_max = std::atoi(parts[1].c_str());
  }
  if (!authors_file.empty()) {
    filter.exclude_self = true;
    for (const auto& line : split_lines(read_file(authors_file))) {
      std::string_view t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      filter.base_authors.push_back(corpus::parse_author(t));
    }
  }
  auto valid = filter.validate();
  if (!valid.ok()) fail(valid.error().message);
  return filter;
}

std::vector<Bibcode> gather_set(const Workspace& ws, const corpus::RecordStore& store,
                                const std::vector<std::string>& bibcodes,
                                const std::vector<std::string>& search_terms) {
  std::vector<Bibcode> set;
  for (const auto& text : bibcodes) set.push_back(parse_bibcode_arg(text));
  if (!search_terms.empty()) {
    auto found = unwrap(store.search_records(search_terms));
    set.insert(set.end(), found.begin(), found.end());
  }
  (void)ws;
  if (set.empty()) fail("no paper set: pass bibcodes or --search terms");
  return set;
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

void cmd_ingest_records(const Workspace& ws, const std::vector<std::string>& files,
                        const std::string& date) {
  auto store = ws.load_store();
  Date ingest_date = date.empty() ? Date{} : parse_date_arg(date);
  size_t inserted = 0, updated = 0, links = 0;
  for (const auto& file : files) {
    auto stats = unwrap(corpus::ingest_records_text(store, read_file(file), ingest_date));
    inserted += stats.inserted;
    updated += stats.updated;
    links += stats.links;
    for (const auto& error : stats.errors) std::cerr << file << ": " << error << "\n";
  }
  ws.save_store(store);
  std::cerr << "ingest-records: " << inserted << " inserted, " << updated << " updated, "
            << links << " explicit links\n";
}

void cmd_ingest_refs(const Workspace& ws, const std::vector<std::string>& files, bool raw_mode) {
  auto store = ws.load_store();
  auto existing = ws.load_refs();
  size_t added = 0;
  for (const auto& file : files) {
    std::vector<refparse::RawReference> fresh;
    if (raw_mode) {
      auto doc = unwrap(refparse::parse_raw_document_file(read_file(file)));
      fresh = unwrap(refparse::pipeline_from_document(doc));
    } else {
      auto result = refparse::parse_reference_file(read_file(file));
      for (const auto& error : result.errors) std::cerr << file << ": " << error << "\n";
      fresh = std::move(result.references);
    }
    added += fresh.size();
    existing.insert(existing.end(), fresh.begin(), fresh.end());
  }
  // renumber sequences uniquely per (citing, source)
  std::map<std::pair<std::string, std::string>, int> counters;
  for (auto& r : existing)
    r.sequence = ++counters[{r.citing_bibcode.str(), r.source_tag}];
  write_file(ws.refs_db(), refparse::render_reference_file(existing));
  for (const auto& r : existing) store.note_references_ingested(r.citing_bibcode);
  ws.save_store(store);
  std::cerr << "ingest-refs: " << added << " reference strings added (total "
            << existing.size() << ")\n";
}

void cmd_resolve(const Workspace& ws, const std::string& config_path,
                 const std::string& venues_path, const std::string& mode) {
  auto store = ws.load_store();
  auto table = load_venues(venues_path);
  resolver::ResolutionConfig config;
  if (!config_path.empty())
    config = unwrap(resolver::ResolutionConfig::parse(read_file(config_path)));
  auto raws = ws.load_refs();

  auto batch = resolver::resolve_batch(raws, store, table, config, parse_mode(mode));
  for (const auto& error : batch.errors) std::cerr << "resolve: " << error << "\n";

  write_file(ws.resolved_tsv(), resolver::render_resolved_table(batch.resolved));
  write_file(ws.unresolved_tsv(), resolver::render_unresolved_table(batch.unresolved));
  write_file(ws.source_counts_tsv(), resolver::render_source_counts(batch.per_source));
  std::cerr << "resolve: " << batch.resolved.size() << " resolved, "
            << batch.unresolved.size() << " unresolved, " << batch.errors.size()
            << " errors\n";
}

void cmd_build_index(const Workspace& ws, const std::string& as_of, int staleness,
                     const std::string& mode, bool skip_matching) {
  auto store = ws.load_store();
  auto resolved = ws.load_resolved();

  if (!skip_matching) {
    auto report = store.match_eprints();
    for (const auto& amb : report.ambiguous) {
      std::cerr << "match-eprints: ambiguous candidates for " << amb.eprint.str() << " (score "
                << format_fraction(amb.score) << "):";
      for (const auto& c : amb.candidates) std::cerr << " " << c.str();
      std::cerr << "\n";
    }
    if (!report.links.empty())
      std::cerr << "match-eprints: " << report.links.size() << " new links\n";
    ws.save_store(store);
  }

  citegraph::PolicyConfig policy;
  policy.staleness_days = staleness;
  policy.as_of = as_of.empty() ? Date{} : parse_date_arg(as_of);

  std::vector<citegraph::PolicyAction> log;
  auto index = citegraph::rebuild_citation_index(resolved, store, store.all_links(), policy,
                                                 parse_mode(mode), &log);
  for (const auto& action : log) {
    std::cerr << "policy: " << action.rule << " " << action.citing.str() << " -> "
              << action.cited.str();
    if (action.attributed_to) std::cerr << " (published " << action.attributed_to->str() << ")";
    std::cerr << "\n";
  }

  std::map<std::string, std::string> digests;
  digests["resolved"] = fnv1a_hex(resolver::render_resolved_table(resolved));
  digests["store"] = fnv1a_hex(store.serialize());
  write_file(ws.index_tsv(), citegraph::render_index_pairs(index));
  write_file(ws.index_manifest(), citegraph::render_index_manifest(index, digests));
  std::cerr << "build-index: " << index.pair_count() << " citation pairs as of "
            << policy.as_of.to_string() << "\n";
}

void cmd_query(const Workspace& ws, const std::string& direction, const std::string& bibcode,
               bool refereed, const std::string& year_range, const std::string& authors_file) {
  auto store = ws.load_store();
  auto index = ws.load_index();
  auto filter = build_filter(refereed, year_range, authors_file);
  Bibcode code = parse_bibcode_arg(bibcode);

  std::vector<Bibcode> rows;
  if (direction == "cites") {
    auto result = metrics::filtered_citations(index, store, {code}, filter);
    rows = result.per_paper.at(code);
    for (const auto& unknown : result.unknown_targets)
      std::cerr << "query: " << unknown.str() << " is not in the record store\n";
  } else {
    for (const auto& cited : citegraph::references_of(index, code))
      if (metrics::record_passes_filter(cited, store, filter)) rows.push_back(cited);
  }
  for (const auto& row : rows) std::cout << row.str() << "\n";
}

void cmd_metrics(const Workspace& ws, const std::string& which,
                 const std::vector<std::string>& bibcodes,
                 const std::vector<std::string>& search_terms, int top, bool refereed,
                 const std::string& year_range, const std::string& authors_file) {
  auto store = ws.load_store();
  auto index = ws.load_index();
  auto filter = build_filter(refereed, year_range, authors_file);
  auto set = gather_set(ws, store, bibcodes, search_terms);

  if (which == "rank") {
    std::cout << metrics::render_ranking(metrics::rank_by_citations(index, store, set, filter));
  } else if (which == "hindex") {
    std::cout << metrics::h_index(index, store, set, filter) << "\n";
  } else if (which == "useful") {
    if (top < 1) fail("--top must be >= 1");
    std::cout << metrics::render_pairs_ranking(metrics::most_useful(index, set, top));
  } else {
    if (top < 1) fail("--top must be >= 1");
    std::cout << metrics::render_pairs_ranking(metrics::most_instructive(index, set, top));
  }
}

void cmd_report(const Workspace& ws, const std::string& which, int top) {
  if (which == "sources") {
    auto counts = unwrap(resolver::parse_source_counts(read_if_exists(ws.source_counts_tsv())));
    std::cout << citegraph::render_source_coverage(citegraph::source_coverage_report(counts));
    return;
  }
  auto unresolved =
      unwrap(resolver::parse_unresolved_table(read_if_exists(ws.unresolved_tsv())));
  auto report = unwrap(citegraph::unresolved_report(unresolved, top));
  std::cout << "key\tcount\n";
  for (const auto& group : report) std::cout << group.key << "\t" << group.count << "\n";
}

void cmd_alerts_register(const Workspace& ws, const std::string& file) {
  auto registry = ws.load_queries();
  auto incoming = unwrap(alerts::QueryRegistry::parse(read_file(file)));
  size_t added = 0;
  for (const auto& query : incoming.all()) {
    unwrap(registry.register_query(query));
    ++added;
  }
  write_file(ws.queries_db(), registry.render());
  std::cerr << "alerts: " << added << " stored queries registered\n";
}

void cmd_alerts_run(const Workspace& ws, const std::string& date, bool rss) {
  auto store = ws.load_store();
  auto registry = ws.load_queries();
  auto after = ws.load_index();

  citegraph::CitationIndex before;
  if (fs::exists(ws.alerts_baseline_tsv()))
    before = unwrap(citegraph::parse_index_pairs(read_file(ws.alerts_baseline_tsv())));

  Date run_date = date.empty() ? Date{} : parse_date_arg(date);
  auto batches = alerts::run_alerts(registry, before, after, store, run_date);

  if (rss) {
    for (const auto& batch : batches) {
      std::vector<corpus::BibRecord> items;
      for (const auto& [citing, cited] : batch.new_citations) {
        if (auto rec = store.find_by_bibcode(citing)) items.push_back(*rec);
      }
      for (const auto& code : batch.new_author_papers) {
        if (auto rec = store.find_by_bibcode(code)) items.push_back(*rec);
      }
      for (const auto& ranked : batch.topic_papers_ranked) {
        if (auto rec = store.find_by_bibcode(ranked.bibcode)) items.push_back(*rec);
      }
      std::cout << exporter::export_rss(items, "alerts for " + batch.subscriber_id);
    }
  } else {
    for (const auto& batch : batches) std::cout << alerts::render_alert_text(batch);
  }

  write_file(ws.queries_db(), registry.render());
  write_file(ws.alerts_baseline_tsv(), citegraph::render_index_pairs(after));
  std::cerr << "alerts: " << batches.size() << " batch(es)\n";
}

void cmd_export(const Workspace& ws, const std::string& format,
                const std::vector<std::string>& terms, const std::string& title) {
  auto store = ws.load_store();
  auto index = ws.load_index();

  auto codes = unwrap(store.search_records(terms));
  std::vector<corpus::BibRecord> records;
  for (const auto& code : codes)
    if (auto rec = store.find_by_bibcode(code)) records.push_back(*rec);

  std::string echo;
  for (const auto& term : terms) {
    if (!echo.empty()) echo += ' ';
    echo += term;
  }

  if (format == "xml") {
    std::map<Bibcode, long> counts;
    for (const auto& rec : records)
      counts[rec.bibcode] = long(citegraph::citations_of(index, rec.bibcode).size());
    std::cout << unwrap(exporter::export_xml_abstracts(records, counts, echo));
  } else {
    std::cout << exporter::export_rss(records, title.empty() ? echo : title);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bibliographic reference resolution and citation index pipeline"};
  app.require_subcommand(1);

  std::string data_dir = "bibdata";
  app.add_option("--data", data_dir, "workspace directory")->capture_default_str();

  // ingest-records
  std::vector<std::string> record_files;
  std::string ingest_date;
  auto* ingest_records = app.add_subcommand("ingest-records", "load tagged record files");
  ingest_records->add_option("files", record_files, "record files")->required();
  ingest_records->add_option("--date", ingest_date, "ingest date for records without %I");

  // ingest-refs
  std::vector<std::string> ref_files;
  bool raw_mode = false;
  auto* ingest_refs = app.add_subcommand("ingest-refs", "load reference string files");
  ingest_refs->add_option("files", ref_files, "reference files")->required();
  ingest_refs->add_flag("--raw", raw_mode, "treat input as a full-text document");

  // resolve
  std::string config_path, venues_path, mode = "parallel";
  auto* resolve = app.add_subcommand("resolve", "match reference strings to records");
  resolve->add_option("--config", config_path, "resolution config file");
  resolve->add_option("--venues", venues_path, "venue abbreviation table")->required();
  resolve->add_option("--mode", mode, "serial|parallel")->capture_default_str();

  // build-index
  std::string as_of;
  int staleness = 365;
  bool no_match = false;
  std::string build_mode = "parallel";
  auto* build = app.add_subcommand("build-index", "invert the resolved table");
  build->add_option("--as-of", as_of, "evaluation date (ISO)");
  build->add_option("--staleness", staleness, "preprint staleness window in days")
      ->capture_default_str();
  build->add_flag("--no-match", no_match, "skip eprint/published matching");
  build->add_option("--mode", build_mode, "serial|parallel")->capture_default_str();

  // query
  std::string query_direction, query_bibcode, query_year, query_authors;
  bool query_refereed = false;
  auto* query = app.add_subcommand("query", "list citers of / references of a record");
  query->add_option("direction", query_direction, "cites|refs")
      ->required()
      ->check(CLI::IsMember({"cites", "refs"}));
  query->add_option("bibcode", query_bibcode, "target record")->required();
  query->add_flag("--refereed", query_refereed, "keep refereed records only");
  query->add_option("--year", query_year, "publication year range A:B");
  query->add_option("--exclude-self", query_authors, "authors file for self-citation removal");

  // metrics
  std::string metric_kind, metric_year, metric_authors;
  std::vector<std::string> metric_bibcodes, metric_search;
  int metric_top = 10;
  bool metric_refereed = false;
  auto* metric = app.add_subcommand("metrics", "bibliometric operators over a paper set");
  metric->add_option("kind", metric_kind, "rank|hindex|useful|instructive")
      ->required()
      ->check(CLI::IsMember({"rank", "hindex", "useful", "instructive"}));
  metric->add_option("bibcodes", metric_bibcodes, "paper set");
  metric->add_option("--search", metric_search, "build the set from search terms");
  metric->add_option("--top", metric_top, "result count for useful/instructive")
      ->capture_default_str();
  metric->add_flag("--refereed", metric_refereed, "refereed citers only");
  metric->add_option("--year", metric_year, "citing year range A:B");
  metric->add_option("--exclude-self", metric_authors, "authors file for self-citation removal");

  // report
  std::string report_kind;
  int report_top = 20;
  auto* report = app.add_subcommand("report", "coverage and unresolved-reference reports");
  report->add_option("kind", report_kind, "sources|unresolved")
      ->required()
      ->check(CLI::IsMember({"sources", "unresolved"}));
  report->add_option("--top", report_top, "group count for the unresolved report")
      ->capture_default_str();

  // alerts
  std::string alerts_action, alerts_file, alerts_date;
  bool alerts_rss = false;
  auto* alerts_cmd = app.add_subcommand("alerts", "stored-query notification");
  alerts_cmd->add_option("action", alerts_action, "register|run")
      ->required()
      ->check(CLI::IsMember({"register", "run"}));
  alerts_cmd->add_option("file", alerts_file, "stored-query file (register)");
  alerts_cmd->add_option("--date", alerts_date, "run date (ISO)");
  alerts_cmd->add_flag("--rss", alerts_rss, "emit RSS channels instead of text");

  // export
  std::string export_format, export_title;
  std::vector<std::string> export_terms;
  auto* export_cmd = app.add_subcommand("export", "machine-readable query output");
  export_cmd->add_option("format", export_format, "xml|rss")
      ->required()
      ->check(CLI::IsMember({"xml", "rss"}));
  export_cmd->add_option("terms", export_terms, "search terms")->required();
  export_cmd->add_option("--title", export_title, "feed title (rss)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  }

  Workspace ws{fs::path(data_dir)};

  try {
    if (*ingest_records) cmd_ingest_records(ws, record_files, ingest_date);
    else if (*ingest_refs) cmd_ingest_refs(ws, ref_files, raw_mode);
    else if (*resolve) cmd_resolve(ws, config_path, venues_path, mode);
    else if (*build) cmd_build_index(ws, as_of, staleness, build_mode, no_match);
    else if (*query) cmd_query(ws, query_direction, query_bibcode, query_refereed, query_year,
                               query_authors);
    else if (*metric)
      cmd_metrics(ws, metric_kind, metric_bibcodes, metric_search, metric_top, metric_refereed,
                  metric_year, metric_authors);
    else if (*report) cmd_report(ws, report_kind, report_top);
    else if (*alerts_cmd) {
      if (alerts_action == "register") {
        if (alerts_file.empty()) fail("alerts register needs a stored-query file");
        cmd_alerts_register(ws, alerts_file);
      } else {
        cmd_alerts_run(ws, alerts_date, alerts_rss);
      }
    } else if (*export_cmd) {
      cmd_export(ws, export_format, export_terms, export_title);
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
