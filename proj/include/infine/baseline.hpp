#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "infine/fd.hpp"
#include "infine/infine.hpp"
#include "infine/relation.hpp"
#include "infine/viewspec.hpp"

namespace infine {

// Full bottom-up evaluation of the view.
RelationInstance materialize_view(const Database& db, const ViewNode& spec,
                                  CellMeter* meter = nullptr);
// Minimal FDs of the materialized view over its projected attributes.
FDSet oracle_fds(const Database& db, const ViewNode& spec);
// Types every oracle FD by materializing each sub-query.
ProvenanceSet classify_provenance(const Database& db, const ViewNode& spec);

struct ComparisonReport {
  FDSet infine_fds;
  FDSet baseline_fds;
  FDSet matched;
  FDSet only_infine;
  FDSet only_baseline;
  double accuracy = 0;
  std::uint64_t cells_materialized_infine = 0;
  std::uint64_t cells_materialized_baseline = 0;
  int repeat = 1;
  // Mean seconds per run, keyed by stage name.
  std::map<std::string, double> timings;
  std::map<std::string, std::size_t> type_counts;
};

ComparisonReport compare(const Database& db, const ViewNode& spec, int repeat = 1);
// Matching and accuracy only; counters and timings stay empty.
ComparisonReport diff_fd_sets(const FDSet& infine_fds, const FDSet& baseline_fds);

std::string report_to_json(const ComparisonReport& report, const Catalog& catalog);
std::string report_to_text(const ComparisonReport& report, const Catalog& catalog);

}  // namespace infine
