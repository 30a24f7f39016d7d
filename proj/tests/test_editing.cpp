#include <doctest.h>

#include <cmath>
#include <functional>
#include <optional>

#include "oracles.hpp"
#include "spherelab/editing.hpp"
#include "spherelab/linalg.hpp"

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

// Random instance whose preserved set is exactly stored: V0 = W K0.
struct Instance {
    Matrix w;
    KnowledgeSet new_ks;
    KnowledgeSet preserved;
};

Instance make_instance(std::mt19937_64& g, std::size_t d0, std::size_t d1,
                       std::size_t m0, std::size_t m1) {
    const Matrix w = oracle::random_matrix(g, d1, d0);
    const Matrix k0 = oracle::random_matrix(g, d0, m0);
    const Matrix v0 = oracle::matmul(w, k0);
    const Matrix k1 = oracle::random_matrix(g, d0, m1);
    const Matrix v1 = oracle::random_matrix(g, d1, m1);
    return {w, {k1, v1}, {k0, v0}};
}

// Stacked least-squares reference: minimize ||dW Kall - Rall||_F column by
// column through Householder QR on Kall^T.
Matrix lstsq_edit(const Matrix& w, const KnowledgeSet& new_ks,
                  const KnowledgeSet& preserved) {
    const Matrix kall = hstack(new_ks.keys, preserved.keys);
    const Matrix r1 = subtract(new_ks.values, oracle::matmul(w, new_ks.keys));
    const Matrix r0 = subtract(preserved.values, oracle::matmul(w, preserved.keys));
    const Matrix rall = hstack(r1, r0);
    return transpose(oracle::lstsq(transpose(kall), transpose(rall)));
}

} // namespace

TEST_CASE("closed-form edit solves the two-key identity example exactly") {
    const Matrix w = Matrix::identity(2);
    const KnowledgeSet new_ks{Matrix(2, 1, {1.0, 0.0}), Matrix(2, 1, {2.0, 0.0})};
    const KnowledgeSet preserved{Matrix(2, 1, {0.0, 1.0}), Matrix(2, 1, {0.0, 1.0})};
    const EditSolution s = solve_edit(w, new_ks, preserved, std::nullopt);
    CHECK(s.delta_w(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(s.delta_w(0, 1)) < 1e-12);
    CHECK(std::fabs(s.delta_w(1, 0)) < 1e-12);
    CHECK(std::fabs(s.delta_w(1, 1)) < 1e-12);
    CHECK(s.residual_new < 1e-12);
    CHECK(s.residual_preserved < 1e-12);
    CHECK(s.gradient_norm < 1e-12);
}

TEST_CASE("closed-form edit matches the stacked least-squares reference") {
    auto g = oracle::rng(201);
    for (int rep = 0; rep < 25; ++rep) {
        const Instance in = make_instance(g, 10, 5, 8, 6);
        const EditSolution s = solve_edit(in.w, in.new_ks, in.preserved, std::nullopt);
        const Matrix ref = lstsq_edit(in.w, in.new_ks, in.preserved);
        CHECK(oracle::fro(subtract(s.delta_w, ref)) <= 1e-8 * oracle::fro(ref));

        const double scale_v = oracle::fro(in.new_ks.values) + oracle::fro(in.preserved.values);
        CHECK(s.gradient_norm <= 1e-8 * scale_v);

        // reported residuals match direct recomputation
        const Matrix w1 = add(in.w, s.delta_w);
        CHECK(s.residual_new ==
              doctest::Approx(oracle::fro(subtract(oracle::matmul(w1, in.new_ks.keys),
                                                   in.new_ks.values)))
                  .epsilon(1e-10));
        CHECK(s.residual_preserved ==
              doctest::Approx(oracle::fro(subtract(oracle::matmul(w1, in.preserved.keys),
                                                   in.preserved.values)))
                  .epsilon(1e-10));
    }
}

TEST_CASE("prior knowledge enters the solve like extra preserved keys") {
    auto g = oracle::rng(202);
    const Instance in = make_instance(g, 8, 4, 5, 3);
    const Matrix kp = oracle::random_matrix(g, 8, 4);
    const Matrix vp = oracle::matmul(in.w, kp);
    const KnowledgeSet prior{kp, vp};

    const EditSolution with_prior = solve_edit(in.w, in.new_ks, in.preserved, prior);
    // equivalent formulation: fold the prior into the preserved set
    const KnowledgeSet folded = concat_knowledge(in.preserved, prior);
    const EditSolution merged = solve_edit(in.w, in.new_ks, folded, std::nullopt);
    CHECK(oracle::fro(subtract(with_prior.delta_w, merged.delta_w)) <=
          1e-10 * (1.0 + oracle::fro(merged.delta_w)));
}

TEST_CASE("accumulated-gram solve agrees with the direct formulation") {
    auto g = oracle::rng(203);
    const Instance in = make_instance(g, 8, 4, 5, 3);
    const Matrix kp = oracle::random_matrix(g, 8, 4);
    const Matrix vp = oracle::matmul(in.w, kp);

    Matrix base_gram = multiply_nt(in.preserved.keys, in.preserved.keys);
    accumulate(base_gram, multiply_nt(kp, kp));
    Matrix base_cross = multiply_nt(in.preserved.values, in.preserved.keys);
    accumulate(base_cross, multiply_nt(vp, kp));

    const EditSolution direct =
        solve_edit(in.w, in.new_ks, in.preserved, KnowledgeSet{kp, vp});
    const EditSolution accum = solve_edit_accumulated(in.w, in.new_ks, in.preserved,
                                                      base_gram, base_cross);
    CHECK(oracle::fro(subtract(direct.delta_w, accum.delta_w)) <=
          1e-10 * (1.0 + oracle::fro(direct.delta_w)));
    CHECK(accum.gradient_norm == doctest::Approx(direct.gradient_norm).epsilon(1e-8));
}

TEST_CASE("rank-deficient gram is an error unless ridged") {
    auto g = oracle::rng(204);
    // 4-dimensional keys but only 2 total associations: gram rank 2
    const Matrix w = oracle::random_matrix(g, 3, 4);
    const Matrix k0 = oracle::random_matrix(g, 4, 1);
    const KnowledgeSet preserved{k0, oracle::matmul(w, k0)};
    const KnowledgeSet new_ks{oracle::random_matrix(g, 4, 1),
                              oracle::random_matrix(g, 3, 1)};
    CHECK(thrown_code([&] {
              solve_edit(w, new_ks, preserved, std::nullopt);
          }) == ErrorCode::SingularGram);
    CHECK_NOTHROW(solve_edit(w, new_ks, preserved, std::nullopt, 1e-6));
}

TEST_CASE("a tiny ridge barely moves a well-posed solution") {
    auto g = oracle::rng(205);
    const Instance in = make_instance(g, 8, 4, 7, 4);
    const EditSolution exact = solve_edit(in.w, in.new_ks, in.preserved, std::nullopt);
    const EditSolution ridged =
        solve_edit(in.w, in.new_ks, in.preserved, std::nullopt, 1e-12);
    CHECK(oracle::fro(subtract(exact.delta_w, ridged.delta_w)) <=
          1e-9 * (1.0 + oracle::fro(exact.delta_w)));
}

TEST_CASE("nullspace projector annihilates the preserved keys") {
    // axis-aligned case: keys along e1 leave the projector diag(0, 1)
    const Matrix k0(2, 1, {1.0, 0.0});
    const Matrix p = nullspace_projector(k0);
    CHECK(std::fabs(p(0, 0)) < 1e-12);
    CHECK(std::fabs(p(0, 1)) < 1e-12);
    CHECK(std::fabs(p(1, 0)) < 1e-12);
    CHECK(p(1, 1) == doctest::Approx(1.0).epsilon(1e-12));

    auto g = oracle::rng(206);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix keys = oracle::random_matrix(g, 12, 5);
        const Matrix proj = nullspace_projector(keys);
        // symmetric and idempotent
        CHECK(oracle::max_abs_diff(proj, transpose(proj)) < 1e-12);
        CHECK(oracle::max_abs_diff(oracle::matmul(proj, proj), proj) < 1e-11);
        // annihilation
        CHECK(oracle::fro(oracle::matmul(proj, keys)) <= 1e-9 * oracle::fro(keys));
        // locality of a projected update
        const Matrix dw = oracle::random_matrix(g, 6, 12);
        const Matrix local = oracle::matmul(dw, proj);
        CHECK(oracle::fro(oracle::matmul(local, keys)) <=
              1e-8 * oracle::fro(dw) * oracle::fro(keys));
    }
}

TEST_CASE("descent edit obeys its stated contracts") {
    auto g = oracle::rng(207);
    const Matrix w = oracle::random_matrix(g, 4, 6);
    const Matrix k1 = oracle::random_matrix(g, 6, 3);
    const Matrix v1 = oracle::random_matrix(g, 4, 3);
    const KnowledgeSet new_ks{k1, v1};

    SUBCASE("zero steps or zero rate leave the weights untouched") {
        for (auto [lr, steps] : {std::pair<double, std::size_t>{0.1, 0},
                                 std::pair<double, std::size_t>{0.0, 50}}) {
            const EditSolution s = ft_edit(w, new_ks, lr, steps);
            CHECK(oracle::fro(s.delta_w) == 0.0);
        }
    }

    SUBCASE("a single key converges geometrically at lr = 0.5/||k||^2") {
        const Matrix k(6, 1, {1.0, 2.0, 0.5, -1.0, 0.25, 3.0});
        const Matrix v = oracle::random_matrix(g, 4, 1);
        double k2 = 0.0;
        for (std::size_t i = 0; i < 6; ++i) k2 += k(i, 0) * k(i, 0);
        const EditSolution s = ft_edit(w, {k, v}, 0.5 / k2, 500);
        CHECK(s.residual_new <= 1e-6 * oracle::fro(v));
    }

    SUBCASE("residual is non-increasing in the step count below the stability rate") {
        const EigenResult eig = sym_eigh(multiply_tn(k1, k1));
        const double lr = 1.0 / eig.eigenvalues.back();
        double previous = oracle::fro(subtract(oracle::matmul(w, k1), v1));
        for (std::size_t steps = 1; steps <= 12; ++steps) {
            const EditSolution s = ft_edit(w, new_ks, lr, steps);
            CHECK(s.residual_new <= previous * (1.0 + 1e-12));
            previous = s.residual_new;
        }
    }

    SUBCASE("a wildly large rate is flagged as divergence") {
        const EigenResult eig = sym_eigh(multiply_tn(k1, k1));
        const double lr = 50.0 / eig.eigenvalues.back();
        CHECK(thrown_code([&] { ft_edit(w, new_ks, lr, 500); }) ==
              ErrorCode::DivergenceDetected);
    }
}

TEST_CASE("output perturbation is the squared Frobenius norm of dW K") {
    auto g = oracle::rng(208);
    const Matrix dw = oracle::random_matrix(g, 4, 7);
    const Matrix keys = oracle::random_matrix(g, 7, 3);
    const double f = oracle::fro(oracle::matmul(dw, keys));
    CHECK(output_perturbation(dw, keys) == doctest::Approx(f * f).epsilon(1e-12));
}

TEST_CASE("knowledge stacking validates its input") {
    const KnowledgeSet ks = stack_knowledge({{{1.0, 0.0}, {2.0, 0.0, 1.0}},
                                             {{0.0, 1.0}, {0.0, 1.0, -1.0}}});
    CHECK(ks.keys.rows() == 2);
    CHECK(ks.keys.cols() == 2);
    CHECK(ks.values.rows() == 3);
    CHECK(ks.values.cols() == 2);
    CHECK(ks.keys(0, 1) == 0.0);
    CHECK(ks.values(2, 1) == -1.0);

    CHECK(thrown_code([] { stack_knowledge({}); }) == ErrorCode::EmptyInput);
    CHECK(thrown_code([] {
              stack_knowledge({{{1.0}, {1.0}}, {{1.0, 2.0}, {1.0}}});
          }) == ErrorCode::RaggedDimensions);

    const KnowledgeSet a{Matrix(2, 1), Matrix(3, 1)};
    const KnowledgeSet mismatched{Matrix(4, 1), Matrix(3, 1)};
    CHECK(thrown_code([&] { concat_knowledge(a, mismatched); }) ==
          ErrorCode::DimensionMismatch);
    CHECK(thrown_code([&] {
              validate_knowledge(KnowledgeSet{Matrix(2, 2), Matrix(3, 1)}, "test");
          }) == ErrorCode::DimensionMismatch);
}
