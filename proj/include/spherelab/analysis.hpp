#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spherelab/harness.hpp"

namespace spherelab {

struct CorrelationResult {
    double rho = 0.0;
    std::size_t n = 0;
    bool tied = false; // any tie in either input
};

// Spearman rank correlation with average ranks on ties. Constant input
// is an error (the statistic is undefined), never a silent zero.
CorrelationResult spearman(const std::vector<double>& x, const std::vector<double>& y);

struct AuditSummary {
    std::size_t n_steps = 0;
    std::size_t linearized_bound_violations = 0; // expected 0: the bound is algebraic
    double max_exact_ratio = 0.0;     // max |delta_he_exact| / bound_rhs over steps
    double cumulative_abs_delta_he = 0.0; // sum of |raw energy change| over steps
    std::optional<std::size_t> collapse_flag_step; // first step below the peak fraction
};

// Aggregates a run's bound reports and flags efficacy collapse: the first
// step whose efficacy falls below collapse_frac times the peak so far.
AuditSummary audit_trace(const EditTrace& trace, double collapse_frac = 0.5);

struct MethodSummary {
    std::string method;
    std::size_t n_runs = 0;
    double mean_final_retention = 0.0;
    double mean_final_efficacy = 0.0;
    double mean_cumulative_abs_delta_he = 0.0;
};

struct PairSummary {
    std::string method; // the "+sphere" variant
    std::string base;
    std::size_t n_pairs = 0;          // aligned seeds
    double win_rate_retention = 0.0;  // higher final retention wins; ties split
    double win_rate_delta_he = 0.0;   // lower cumulative |energy change| wins
    double win_rate_dominant = 0.0;   // strictly better on both = 1, worse on both = 0,
                                      // mixed or tied = 0.5
};

struct MethodComparison {
    std::vector<MethodSummary> methods; // ranked by mean final retention, descending
    std::vector<PairSummary> pairs;
};

// Groups traces by method, averages finals, and scores each "+sphere"
// variant against its base per aligned seed.
MethodComparison compare_methods(const std::vector<EditTrace>& traces);

} // namespace spherelab
