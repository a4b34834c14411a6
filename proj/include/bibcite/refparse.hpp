#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bibcite/bibcode.hpp"
#include "bibcite/corpus.hpp"
#include "bibcite/util.hpp"

namespace bibcite::refparse {

struct RawDocument {
  Bibcode citing_bibcode;
  std::string source_tag;
  std::string body_text;  // non-empty
  Date received_date;
};

struct RawReference {
  Bibcode citing_bibcode;
  std::string source_tag;
  int sequence = 1;  // unique per (citing, source)
  std::string text;  // non-empty after trimming
  Date received_date;

  bool operator==(const RawReference&) const = default;
};

struct ParsedReference {
  RawReference raw;
  std::vector<corpus::AuthorName> authors;
  std::optional<int> year;
  std::optional<std::string> venue_token;
  std::optional<std::string> volume;
  std::optional<std::string> page;
  double confidence = 0.0;  // extracted fields / 5
  int variant_index = 0;
};

/// Text from the last own-line "References"/"Bibliography"/"Literature
/// Cited" heading (optional numbering, trailing ':' or '.') to the end of
/// the document. Error when no heading line exists.
Result<std::string> extract_reference_section(const RawDocument& doc);

/// Splits section text on blank lines and line-initial markers ([n], n.,
/// n), bullets); indented or lowercase-initial lines continue the previous
/// entry. Markers are separators and do not appear in the texts.
std::vector<RawReference> split_reference_strings(const std::string& section,
                                                  const Bibcode& citing,
                                                  const std::string& source_tag,
                                                  const Date& received_date);

/// All alternate interpretations of one reference string, deterministic
/// order, most informative first. Empty when no template matches.
std::vector<ParsedReference> parse_variants(const RawReference& raw);

/// The variant-th alternate parse; nullopt when no template matches or the
/// variant index exceeds the available alternates.
std::optional<ParsedReference> parse_reference(const RawReference& raw, int variant);

/// Strips one leading list marker ("[3]", "12.", "7)", "-", "*") from a
/// line, if present. Exposed so splitting invariants can be checked
/// against the same separator definition.
std::string_view strip_list_marker(std::string_view line);

Result<std::vector<RawReference>> pipeline_from_document(const RawDocument& doc);

// Reference ingest file: blocks headed by
//   %%R <bibcode> %%S <source_tag> %%D <ISO date>
// followed by one reference string per line.
struct ReferenceIngestResult {
  std::vector<RawReference> references;
  std::vector<std::string> errors;
};

ReferenceIngestResult parse_reference_file(std::string_view text);
std::string render_reference_file(const std::vector<RawReference>& refs);

/// Raw-document file: the same header line followed by the full document
/// body (processed through extract + split).
Result<RawDocument> parse_raw_document_file(std::string_view text);

}  // namespace bibcite::refparse
