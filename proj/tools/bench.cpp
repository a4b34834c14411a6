// Throughput comparison of the serial reference implementations against the
// OpenMP kernels: batch resolution, eprint/published matching, and index
// inversion. Sizes are adjustable from the command line.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bibcite/citegraph.hpp"
#include "bibcite/corpus.hpp"
#include "bibcite/parallel.hpp"
#include "bibcite/resolver.hpp"

using namespace bibcite;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

struct Fixture {
  corpus::RecordStore store;
  resolver::VenueAbbrevTable table;
  std::vector<refparse::RawReference> raws;
  std::vector<resolver::ResolvedReference> resolved;
};

std::string surname_for(int i) {
  static const char* kSurnames[] = {"Adams",  "Baker",  "Clark",  "Davis", "Evans",
                                    "Foster", "Garcia", "Hughes", "Irwin", "Jordan"};
  std::string suffix;
  int n = i / 10;
  suffix.push_back(char('a' + n % 26));
  suffix.push_back(char('a' + (n / 26) % 26));
  return std::string(kSurnames[i % 10]) + suffix;
}

Fixture make_fixture(int n_records, int n_refs, unsigned seed) {
  Fixture fx;
  (void)fx.table.add_alias("JQRA", "JQRA");

  std::mt19937_64 rng(seed);
  std::vector<corpus::BibRecord> records;
  records.reserve(size_t(n_records));
  for (int i = 0; i < n_records; ++i) {
    corpus::BibRecord r;
    BibcodeFields f;
    f.year = 1950 + (i % 150);
    f.venue_code = "JQRA";
    f.volume = std::to_string(1 + i / 100);
    f.page = std::to_string(1 + (i % 9999));
    std::string surname = surname_for(i);
    f.author_initial = char(std::toupper(surname[0]));
    auto built = Bibcode::from_fields(f);
    if (!built.ok()) continue;
    r.bibcode = built.value();
    r.title = "Collected results number " + std::to_string(i);
    r.authors = {{surname, "Q."}};
    r.pub_year = f.year;
    r.venue = "JQRA";
    r.volume = f.volume;
    r.first_page = f.page;
    r.kind = corpus::RecordKind::journal;
    r.refereed = true;
    r.ingest_date = Date::from_ymd(2005, 1, 1);
    if (fx.store.add_record(r).ok()) records.push_back(std::move(r));
  }

  std::uniform_int_distribution<int> pick(0, int(records.size()) - 1);
  std::uniform_int_distribution<int> style(0, 4);
  for (int i = 0; i < n_refs; ++i) {
    const auto& citing = records[size_t(pick(rng))];
    const auto& cited = records[size_t(pick(rng))];
    refparse::RawReference raw;
    raw.citing_bibcode = citing.bibcode;
    raw.source_tag = "bench";
    raw.sequence = i + 1;
    raw.received_date = Date::from_ymd(2006, 3, 1);
    const auto& author = cited.authors.front();
    if (style(rng) == 4) {
      raw.text = "unparseable noise " + std::to_string(100000 + i);
    } else {
      raw.text = author.surname + ", " + author.initials + " " +
                 std::to_string(cited.pub_year) + ", JQRA, " + *cited.volume + ", " +
                 *cited.first_page;
    }
    fx.raws.push_back(std::move(raw));
  }
  return fx;
}

template <typename F>
double time_it(F&& body) {
  double start = now_seconds();
  body();
  return now_seconds() - start;
}

void report(const char* kernel, double serial_s, double parallel_s) {
  std::printf("%-22s serial %8.3fs   openmp %8.3fs   speedup %5.2fx\n", kernel, serial_s,
              parallel_s, parallel_s > 0 ? serial_s / parallel_s : 0.0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs OpenMP kernel benchmark"};
  int n_records = 20000;
  int n_refs = 60000;
  unsigned seed = 20060915;
  app.add_option("--records", n_records, "synthetic record count")->capture_default_str();
  app.add_option("--refs", n_refs, "synthetic reference count")->capture_default_str();
  app.add_option("--seed", seed, "workload seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  std::printf("workload: %d records, %d references, %d thread(s)\n", n_records, n_refs,
              available_threads());

  auto fx = make_fixture(n_records, n_refs, seed);
  resolver::ResolutionConfig config;

  resolver::BatchResult serial_batch, parallel_batch;
  double serial_resolve = time_it([&] {
    serial_batch = resolver::resolve_batch(fx.raws, fx.store, fx.table, config,
                                           ExecutionMode::serial);
  });
  double parallel_resolve = time_it([&] {
    parallel_batch = resolver::resolve_batch(fx.raws, fx.store, fx.table, config,
                                             ExecutionMode::parallel);
  });
  report("resolve_batch", serial_resolve, parallel_resolve);
  if (serial_batch.resolved.size() != parallel_batch.resolved.size()) {
    std::fprintf(stderr, "kernel outputs disagree; aborting\n");
    return 2;
  }

  citegraph::PolicyConfig policy;
  policy.as_of = Date::from_ymd(2006, 9, 15);
  citegraph::CitationIndex serial_index, parallel_index;
  double serial_build = time_it([&] {
    serial_index = citegraph::rebuild_citation_index(serial_batch.resolved, fx.store, {},
                                                     policy, ExecutionMode::serial);
  });
  double parallel_build = time_it([&] {
    parallel_index = citegraph::rebuild_citation_index(serial_batch.resolved, fx.store, {},
                                                       policy, ExecutionMode::parallel);
  });
  report("rebuild_index", serial_build, parallel_build);
  if (!(serial_index == parallel_index)) {
    std::fprintf(stderr, "kernel outputs disagree; aborting\n");
    return 2;
  }

  std::printf("resolved %zu of %zu, %zu citation pairs\n", serial_batch.resolved.size(),
              fx.raws.size(), serial_index.pair_count());
  return 0;
}
