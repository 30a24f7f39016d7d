#include "spherelab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace spherelab {

namespace {

std::vector<double> average_ranks(const std::vector<double>& v, bool& any_tie) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0; // mean of i+1 .. j+1
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        if (j > i) any_tie = true;
        i = j + 1;
    }
    return ranks;
}

} // namespace

CorrelationResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) {
        throw Error(ErrorCode::LengthMismatch,
                    "spearman: inputs have lengths " + std::to_string(x.size()) +
                        " and " + std::to_string(y.size()));
    }
    if (x.size() < 2) {
        throw Error(ErrorCode::TooShort, "spearman: need at least 2 observations");
    }
    for (double v : x)
        if (!std::isfinite(v))
            throw Error(ErrorCode::NonFinite, "spearman: non-finite entry in x");
    for (double v : y)
        if (!std::isfinite(v))
            throw Error(ErrorCode::NonFinite, "spearman: non-finite entry in y");

    CorrelationResult res;
    res.n = x.size();
    const std::vector<double> rx = average_ranks(x, res.tied);
    const std::vector<double> ry = average_ranks(y, res.tied);

    const std::size_t n = x.size();
    bool same = true;
    bool reversed = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (rx[i] != ry[i]) same = false;
        if (rx[i] + ry[i] != static_cast<double>(n + 1)) reversed = false;
    }

    double mean = 0.5 * static_cast<double>(n + 1);
    double cov = 0.0, varx = 0.0, vary = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = rx[i] - mean;
        const double dy = ry[i] - mean;
        cov += dx * dy;
        varx += dx * dx;
        vary += dy * dy;
    }
    if (!(varx > 0.0) || !(vary > 0.0)) {
        throw Error(ErrorCode::ZeroVariance,
                    "spearman: an input is constant, correlation undefined");
    }
    // perfectly aligned / reversed rank vectors get the exact limit values
    if (same) {
        res.rho = 1.0;
    } else if (reversed) {
        res.rho = -1.0;
    } else {
        res.rho = cov / std::sqrt(varx * vary);
    }
    return res;
}

AuditSummary audit_trace(const EditTrace& trace, double collapse_frac) {
    if (trace.steps.empty()) {
        throw Error(ErrorCode::EmptyTrace, "audit_trace: trace has no steps");
    }
    if (!(collapse_frac >= 0.0) || !std::isfinite(collapse_frac)) {
        throw Error(ErrorCode::ConfigInvalid,
                    "audit_trace: collapse fraction must be finite and >= 0");
    }
    AuditSummary summary;
    summary.n_steps = trace.steps.size();
    double peak = 0.0;
    for (const StepMetrics& s : trace.steps) {
        if (s.bound_report) {
            if (!s.bound_report->satisfied_linearized) ++summary.linearized_bound_violations;
            summary.max_exact_ratio =
                std::max(summary.max_exact_ratio, s.bound_report->ratio_exact);
            summary.cumulative_abs_delta_he += std::fabs(s.bound_report->delta_he_exact);
        }
        peak = std::max(peak, s.efficacy);
        if (!summary.collapse_flag_step && s.efficacy < collapse_frac * peak) {
            summary.collapse_flag_step = s.step;
        }
    }
    return summary;
}

namespace {

struct RunDigest {
    double final_retention = 1.0; // no edits leaves preserved knowledge intact
    double final_efficacy = 0.0;
    double cumulative_abs_delta_he = 0.0;
};

RunDigest digest(const EditTrace& trace) {
    RunDigest d;
    if (!trace.steps.empty()) {
        d.final_retention = trace.steps.back().retention;
        d.final_efficacy = trace.steps.back().efficacy;
        d.cumulative_abs_delta_he = audit_trace(trace).cumulative_abs_delta_he;
    }
    return d;
}

// ties split evenly so win(A over B) + win(B over A) = 1
double win_score(double a, double b, bool higher_wins) {
    if (a == b) return 0.5;
    return (a > b) == higher_wins ? 1.0 : 0.0;
}

} // namespace

MethodComparison compare_methods(const std::vector<EditTrace>& traces) {
    if (traces.empty()) {
        throw Error(ErrorCode::EmptyInput, "compare_methods: no traces given");
    }
    const ExperimentConfig& ref = traces.front().config;
    std::map<std::string, std::map<std::uint64_t, RunDigest>> groups;
    for (const EditTrace& t : traces) {
        if (t.config.d0 != ref.d0 || t.config.d1 != ref.d1 ||
            t.config.n_batches != ref.n_batches) {
            throw Error(ErrorCode::IncompatibleTraces,
                        "compare_methods: traces disagree on d0/d1/n_batches");
        }
        const std::string name = edit_method_name(t.config.method);
        if (!groups[name].emplace(t.config.seed, digest(t)).second) {
            throw Error(ErrorCode::IncompatibleTraces,
                        "compare_methods: duplicate trace for method '" + name +
                            "' seed " + std::to_string(t.config.seed));
        }
    }

    MethodComparison cmp;
    for (const auto& [name, runs] : groups) {
        MethodSummary s;
        s.method = name;
        s.n_runs = runs.size();
        for (const auto& [seed, d] : runs) {
            s.mean_final_retention += d.final_retention;
            s.mean_final_efficacy += d.final_efficacy;
            s.mean_cumulative_abs_delta_he += d.cumulative_abs_delta_he;
        }
        const double n = static_cast<double>(runs.size());
        s.mean_final_retention /= n;
        s.mean_final_efficacy /= n;
        s.mean_cumulative_abs_delta_he /= n;
        cmp.methods.push_back(std::move(s));
    }
    std::stable_sort(cmp.methods.begin(), cmp.methods.end(),
                     [](const MethodSummary& a, const MethodSummary& b) {
                         if (a.mean_final_retention != b.mean_final_retention)
                             return a.mean_final_retention > b.mean_final_retention;
                         return a.method < b.method;
                     });

    for (const auto& [name, runs] : groups) {
        const std::size_t pos = name.rfind("+sphere");
        if (pos == std::string::npos || pos + 7 != name.size()) continue;
        const std::string base_name = name.substr(0, pos);
        const auto base_it = groups.find(base_name);
        if (base_it == groups.end()) continue;
        const auto& base_runs = base_it->second;
        if (base_runs.size() != runs.size() ||
            !std::equal(runs.begin(), runs.end(), base_runs.begin(),
                        [](const auto& a, const auto& b) { return a.first == b.first; })) {
            throw Error(ErrorCode::IncompatibleTraces,
                        "compare_methods: seed sets of '" + name + "' and '" +
                            base_name + "' are not aligned");
        }

        PairSummary p;
        p.method = name;
        p.base = base_name;
        p.n_pairs = runs.size();
        for (const auto& [seed, d] : runs) {
            const RunDigest& bd = base_runs.at(seed);
            p.win_rate_retention += win_score(d.final_retention, bd.final_retention, true);
            p.win_rate_delta_he +=
                win_score(d.cumulative_abs_delta_he, bd.cumulative_abs_delta_he, false);
            const bool better_both = d.final_retention > bd.final_retention &&
                                     d.cumulative_abs_delta_he < bd.cumulative_abs_delta_he;
            const bool worse_both = d.final_retention < bd.final_retention &&
                                    d.cumulative_abs_delta_he > bd.cumulative_abs_delta_he;
            p.win_rate_dominant += better_both ? 1.0 : (worse_both ? 0.0 : 0.5);
        }
        const double n = static_cast<double>(p.n_pairs);
        p.win_rate_retention /= n;
        p.win_rate_delta_he /= n;
        p.win_rate_dominant /= n;
        cmp.pairs.push_back(std::move(p));
    }
    return cmp;
}

} // namespace spherelab
