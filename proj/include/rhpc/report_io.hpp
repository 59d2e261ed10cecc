#pragma once

#include <iosfwd>
#include <string>

#include "rhpc/analysis.hpp"
#include "rhpc/simulator.hpp"

namespace rhpc {

/// Identifier of this build, recorded in run manifests.
const char *build_id();

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

/// Columns: step, time_s, then per agent DG<id>_x1, _x2, _P, _Q, _a1, _a2,
/// then ref1, ref2, dp_pcc, mismatch (2 + 6N + 4 columns). `dp_pcc` is the
/// active PCC increment; `mismatch` is the islanded active imbalance.
void write_trace_csv(std::ostream &os, const ScenarioConfig &cfg, const SimTrace &trace);

/// One row per step and link: step, from, to, delivered, attacked, age, weight.
void write_links_csv(std::ostream &os, const ScenarioConfig &cfg, const SimTrace &trace);

/// step, error_norm.
void write_error_csv(std::ostream &os, const SimTrace &trace);

/// key=value, one per line.
void write_metrics(std::ostream &os, const Metrics &metrics, const std::string &prefix = "");

/// Resolved scenario plus a `meta` block; loadable as a scenario file.
void write_manifest(std::ostream &os, const ScenarioConfig &cfg);

/// Writes trace.csv, links.csv, error_norm.csv, metrics.txt and
/// run_manifest.yaml into `dir` (created if needed).
void write_run_outputs(const std::string &dir, const ScenarioConfig &cfg, const SimTrace &trace,
                       const Metrics &metrics);

} // namespace rhpc
