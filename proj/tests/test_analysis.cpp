#include <doctest.h>

#include <cmath>
#include <functional>

#include "oracles.hpp"
#include "spherelab/analysis.hpp"

using namespace spherelab;

namespace {

ErrorCode thrown_code(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::ConfigInvalid;
}

EditTrace trace_with_efficacies(const std::vector<double>& efficacies) {
    EditTrace t;
    t.config.n_batches = efficacies.size();
    for (std::size_t i = 0; i < efficacies.size(); ++i) {
        StepMetrics s;
        s.step = i + 1;
        s.efficacy = efficacies[i];
        s.retention = 1.0;
        t.steps.push_back(s);
    }
    return t;
}

EditTrace run_digest(EditMethod method, std::uint64_t seed, double final_retention,
                     double cumulative_he) {
    EditTrace t;
    t.config.method = method;
    t.config.seed = seed;
    t.config.n_batches = 1;
    StepMetrics s;
    s.step = 1;
    s.retention = final_retention;
    s.efficacy = 1.0;
    BoundReport b;
    b.delta_he_exact = cumulative_he;
    b.satisfied_linearized = true;
    s.bound_report = b;
    t.steps.push_back(s);
    return t;
}

} // namespace

TEST_CASE("rank correlation reproduces hand-computed examples") {
    CHECK(spearman({1, 2, 3}, {10, 20, 30}).rho == 1.0);
    CHECK(spearman({1, 2, 3}, {30, 20, 10}).rho == -1.0);
    CHECK(spearman({1, 5, 2, 8}, {3, 9, 4, 20}).rho == 1.0); // monotone, not linear

    // tie case: x ranks (1, 2.5, 2.5, 4), y ranks (1, 3, 2, 4)
    const CorrelationResult tied = spearman({1, 2, 2, 4}, {1, 3, 2, 4});
    CHECK(tied.tied);
    CHECK(tied.n == 4);
    CHECK(tied.rho == doctest::Approx(3.0 / std::sqrt(10.0)).epsilon(1e-14));
}

TEST_CASE("rank correlation matches the counting oracle on random data") {
    auto g = oracle::rng(501);
    std::normal_distribution<double> n01(0.0, 1.0);
    std::uniform_int_distribution<int> coarse(0, 4);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 3 + static_cast<std::size_t>(rep % 20);
        std::vector<double> x(n), y(n);
        const bool with_ties = rep % 2 == 0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = with_ties ? static_cast<double>(coarse(g)) : n01(g);
            y[i] = with_ties ? static_cast<double>(coarse(g)) : n01(g);
        }
        CorrelationResult r;
        try {
            r = spearman(x, y);
        } catch (const Error& e) {
            // constant columns are possible with coarse ties; that case is
            // a legitimate rejection, not a mismatch
            CHECK(e.code() == ErrorCode::ZeroVariance);
            continue;
        }
        const double ref = oracle::spearman_ref(x, y);
        CHECK(std::fabs(r.rho - ref) <= 1e-12);
        CHECK(r.rho >= -1.0);
        CHECK(r.rho <= 1.0);
    }
}

TEST_CASE("rank correlation is invariant under monotone transforms") {
    auto g = oracle::rng(502);
    std::normal_distribution<double> n01(0.0, 1.0);
    std::vector<double> x(15), y(15), fx(15), gy(15);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = n01(g);
        y[i] = n01(g);
        fx[i] = std::exp(x[i]);
        gy[i] = y[i] * y[i] * y[i];
    }
    CHECK(spearman(x, y).rho == spearman(fx, gy).rho);
}

TEST_CASE("rank correlation rejects undefined inputs") {
    CHECK(thrown_code([] { spearman({1, 2}, {1, 2, 3}); }) ==
          ErrorCode::LengthMismatch);
    CHECK(thrown_code([] { spearman({1}, {2}); }) == ErrorCode::TooShort);
    CHECK(thrown_code([] { spearman({2, 2, 2}, {1, 2, 3}); }) ==
          ErrorCode::ZeroVariance);
    CHECK(thrown_code([] {
              spearman({1, std::nan(""), 3}, {1, 2, 3});
          }) == ErrorCode::NonFinite);
}

TEST_CASE("trace audit flags the first efficacy collapse") {
    const AuditSummary drop = audit_trace(trace_with_efficacies({1.0, 1.0, 0.4}), 0.5);
    REQUIRE(drop.collapse_flag_step.has_value());
    CHECK(*drop.collapse_flag_step == 3);

    const AuditSummary gentle =
        audit_trace(trace_with_efficacies({1.0, 0.9, 0.8, 0.7}), 0.5);
    CHECK(!gentle.collapse_flag_step.has_value());

    // the peak is a running maximum: early low efficacy is not a collapse
    const AuditSummary ramp = audit_trace(trace_with_efficacies({0.2, 1.0, 0.45}), 0.5);
    REQUIRE(ramp.collapse_flag_step.has_value());
    CHECK(*ramp.collapse_flag_step == 3);

    const AuditSummary recovered =
        audit_trace(trace_with_efficacies({1.0, 0.4, 1.0, 0.4}), 0.5);
    REQUIRE(recovered.collapse_flag_step.has_value());
    CHECK(*recovered.collapse_flag_step == 2); // first crossing wins

    CHECK(thrown_code([] { audit_trace(EditTrace{}, 0.5); }) == ErrorCode::EmptyTrace);
}

TEST_CASE("trace audit aggregates bound reports") {
    EditTrace t = trace_with_efficacies({1.0, 1.0, 1.0});
    BoundReport b0;
    b0.delta_he_exact = -0.25;
    b0.bound_rhs = 1.0;
    b0.ratio_exact = 0.25;
    b0.satisfied_linearized = true;
    t.steps[0].bound_report = b0;
    BoundReport b1;
    b1.delta_he_exact = 0.5;
    b1.bound_rhs = 1.0;
    b1.ratio_exact = 0.5;
    b1.satisfied_linearized = false; // pretend a violation was recorded
    t.steps[1].bound_report = b1;
    // step 3 has no report (degenerate geometry path)

    const AuditSummary a = audit_trace(t, 0.5);
    CHECK(a.n_steps == 3);
    CHECK(a.linearized_bound_violations == 1);
    CHECK(a.max_exact_ratio == 0.5);
    CHECK(a.cumulative_abs_delta_he == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("method comparison summarizes a single run") {
    const std::vector<EditTrace> traces = {run_digest(EditMethod::ClosedForm, 0, 0.75, 2.0)};
    const MethodComparison c = compare_methods(traces);
    REQUIRE(c.methods.size() == 1);
    CHECK(c.methods[0].method == "closed_form");
    CHECK(c.methods[0].n_runs == 1);
    CHECK(c.methods[0].mean_final_retention == 0.75);
    CHECK(c.methods[0].mean_final_efficacy == 1.0);
    CHECK(c.methods[0].mean_cumulative_abs_delta_he == 2.0);
    CHECK(c.pairs.empty());
}

TEST_CASE("method comparison scores sphere variants against their base") {
    const std::vector<EditTrace> traces = {
        run_digest(EditMethod::ClosedForm, 0, 0.50, 4.0),
        run_digest(EditMethod::ClosedForm, 1, 0.60, 4.0),
        run_digest(EditMethod::ClosedForm, 2, 0.70, 4.0),
        run_digest(EditMethod::ClosedFormSphere, 0, 0.80, 1.0), // wins both
        run_digest(EditMethod::ClosedFormSphere, 1, 0.40, 1.0), // splits
        run_digest(EditMethod::ClosedFormSphere, 2, 0.70, 4.0), // ties both
    };
    const MethodComparison c = compare_methods(traces);
    REQUIRE(c.methods.size() == 2);
    // ranking is by mean final retention, descending
    CHECK(c.methods[0].method == "closed_form+sphere");
    CHECK(c.methods[0].mean_final_retention ==
          doctest::Approx((0.8 + 0.4 + 0.7) / 3.0).epsilon(1e-15));

    REQUIRE(c.pairs.size() == 1);
    const PairSummary& p = c.pairs[0];
    CHECK(p.method == "closed_form+sphere");
    CHECK(p.base == "closed_form");
    CHECK(p.n_pairs == 3);
    // retention: win, loss, tie -> (1 + 0 + 0.5) / 3
    CHECK(p.win_rate_retention == doctest::Approx(1.5 / 3.0).epsilon(1e-15));
    // energy: win, win, tie -> (1 + 1 + 0.5) / 3
    CHECK(p.win_rate_delta_he == doctest::Approx(2.5 / 3.0).epsilon(1e-15));
    // dominance: strictly better on both, mixed, tied -> (1 + 0.5 + 0.5) / 3
    CHECK(p.win_rate_dominant == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("identical finals split every pairwise score in half") {
    const std::vector<EditTrace> traces = {
        run_digest(EditMethod::Nullspace, 0, 0.9, 2.0),
        run_digest(EditMethod::Nullspace, 1, 0.8, 3.0),
        run_digest(EditMethod::NullspaceSphere, 0, 0.9, 2.0),
        run_digest(EditMethod::NullspaceSphere, 1, 0.8, 3.0),
    };
    const MethodComparison c = compare_methods(traces);
    REQUIRE(c.pairs.size() == 1);
    CHECK(c.pairs[0].win_rate_retention == 0.5);
    CHECK(c.pairs[0].win_rate_delta_he == 0.5);
    CHECK(c.pairs[0].win_rate_dominant == 0.5);
    // tied mean retention ranks by name, ascending
    CHECK(c.methods[0].method == "nullspace");
    CHECK(c.methods[1].method == "nullspace+sphere");
}

TEST_CASE("method comparison validates its inputs") {
    CHECK(thrown_code([] { compare_methods({}); }) == ErrorCode::EmptyInput);

    CHECK(thrown_code([] {
              compare_methods({run_digest(EditMethod::ClosedForm, 0, 0.5, 1.0),
                               run_digest(EditMethod::ClosedForm, 0, 0.6, 1.0)});
          }) == ErrorCode::IncompatibleTraces);

    EditTrace bigger = run_digest(EditMethod::ClosedForm, 1, 0.5, 1.0);
    bigger.config.d0 = 128;
    CHECK(thrown_code([&] {
              compare_methods({run_digest(EditMethod::ClosedForm, 0, 0.5, 1.0), bigger});
          }) == ErrorCode::IncompatibleTraces);

    // a sphere variant whose seeds do not align with its base
    CHECK(thrown_code([] {
              compare_methods({run_digest(EditMethod::ClosedForm, 0, 0.5, 1.0),
                               run_digest(EditMethod::ClosedFormSphere, 7, 0.5, 1.0)});
          }) == ErrorCode::IncompatibleTraces);
}

TEST_CASE("an empty-step trace contributes its conventional finals") {
    EditTrace empty;
    empty.config.method = EditMethod::Ft;
    empty.config.n_batches = 0;
    const MethodComparison c = compare_methods({empty});
    REQUIRE(c.methods.size() == 1);
    CHECK(c.methods[0].mean_final_retention == 1.0);
    CHECK(c.methods[0].mean_final_efficacy == 0.0);
    CHECK(c.methods[0].mean_cumulative_abs_delta_he == 0.0);
}
