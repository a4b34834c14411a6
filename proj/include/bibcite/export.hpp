#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bibcite/corpus.hpp"
#include "bibcite/util.hpp"

namespace bibcite::exporter {

struct ExportEnvelope {
  std::string query_echo;
  size_t record_count = 0;
  std::optional<long> total_citations;  // only citation-bearing exports
};

/// Fielded XML document with a citation count per record and the total on
/// the root; field order is fixed and repeated runs are byte-identical.
/// Every record must have a count or the export fails.
Result<std::string> export_xml_abstracts(const std::vector<corpus::BibRecord>& records,
                                         const std::map<Bibcode, long>& counts,
                                         const std::string& query_echo);

/// RSS 2.0 channel: one item per record with title, a bibcode identifier
/// link, and the publication date. Carries no citation counts.
std::string export_rss(const std::vector<corpus::BibRecord>& records,
                       const std::string& channel_title);

}  // namespace bibcite::exporter
