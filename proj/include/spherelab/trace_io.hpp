#pragma once

#include <string>
#include <vector>

#include "spherelab/analysis.hpp"
#include "spherelab/harness.hpp"

namespace spherelab {

// JSON-lines trace: a header object echoing the effective config, one
// object per step in fixed key order, and a footer with the correlation
// and final summary. The writer is hand-rolled with 17-significant-digit
// numbers so identical runs serialize byte for byte.
std::string render_trace_jsonl(const EditTrace& trace);

// Companion CSV with one row per step and the same fields flattened.
std::string render_trace_csv(const EditTrace& trace);

// Rebuilds an EditTrace (minus final weights) from a JSON-lines file.
EditTrace read_trace_jsonl(const std::string& path);

// Writes via a temp file plus rename; refuses to replace an existing file
// unless overwrite is set. No partial files on failure.
void write_text_atomic(const std::string& path, const std::string& content,
                       bool overwrite);

// One analyzed trace for the summary report.
struct TraceAuditRecord {
    std::string file;
    std::string method;
    std::uint64_t seed = 0;
    AuditSummary audit;
    double spearman_rho = 0.0;
    bool spearman_defined = false;
    double final_efficacy = 0.0;
    double final_generalization = 0.0;
    double final_retention = 1.0;
};

std::string render_analysis_summary_json(const std::vector<TraceAuditRecord>& audits,
                                         const MethodComparison& comparison);
std::string render_comparison_csv(const MethodComparison& comparison);

} // namespace spherelab
