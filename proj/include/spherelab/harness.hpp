#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spherelab/editing.hpp"
#include "spherelab/energy.hpp"
#include "spherelab/matrix.hpp"

namespace spherelab {

enum class EditMethod {
    ClosedForm,
    ClosedFormSphere,
    Nullspace,
    NullspaceSphere,
    Ft,
    FtSphere,
};

EditMethod edit_method_from_string(const std::string& name);
const char* edit_method_name(EditMethod m);
bool method_uses_sphere(EditMethod m);
EditMethod method_base(EditMethod m); // strips the projection composition

struct ExperimentConfig {
    std::size_t d0 = 64;          // key dimension
    std::size_t d1 = 32;          // value dimension (weight rows)
    std::size_t n_preserved = 48; // preserved associations, <= d0
    std::size_t n_batches = 200;
    std::size_t batch_size = 8;
    EditMethod method = EditMethod::ClosedForm;
    double eta = 0.5;     // cumulative eigenvalue ratio for the principal space
    double alpha = -1.0;  // suppression strength; -1 = auto (0.5 for the
                          // null-space pairing, 0.8 otherwise)
    double kernel_s = 2.0;
    std::uint64_t seed = 0;
    double key_overlap = 0.5; // fraction of new-key energy in principal directions
    bool recompute_principal = false;
    double rank_tol = 1e-10;
    double min_pair_dist = 1e-12;
    double success_tol = 0.05;
    double gram_ridge = 1e-6; // sequential-solve regularization; see README
    double gen_radius = 0.01; // generalization probe perturbation, relative
    double ft_lr = 0.0;       // 0 = auto: 1/lambda_max(K1^T K1) per batch
    std::size_t ft_steps = 200;
};

void validate_config(const ExperimentConfig& config);
double effective_alpha(const ExperimentConfig& config);

// A synthetic linear associative memory plus the edit request stream.
// w0 K0 = V0 holds exactly by construction.
struct World {
    Matrix w0;                            // d1 x d0
    KnowledgeSet preserved;               // K0 (orthonormal columns), V0
    std::vector<KnowledgeSet> edit_stream; // n_batches entries, batch_size columns
    std::vector<Matrix> gen_keys;          // perturbed copies of each batch's keys
    std::uint64_t rng_seed = 0;            // generator state the world was drawn from
};

struct StepMetrics {
    std::size_t step = 0; // 1-indexed
    bool he_ok = true;    // false when energy evaluation hit degenerate geometry
    std::optional<double> he_normalized;
    std::optional<double> he_raw;
    std::optional<double> delta_he; // normalized-energy drop, previous minus current
    double delta_v_preserved = 0.0;
    double efficacy = 0.0;
    double generalization = 0.0;
    double retention = 0.0;
    double dw_fro = 0.0;
    std::optional<BoundReport> bound_report; // raw s=2 audit; absent when !he_ok
};

struct EditTrace {
    ExperimentConfig config; // effective values (alpha resolved)
    std::vector<StepMetrics> steps;
    std::optional<Matrix> final_w; // absent on traces loaded from disk
    double spearman_he_vs_retention = 0.0;
    bool spearman_defined = false;
};

World generate_world(const ExperimentConfig& config);

// Metrics of one state transition. edits_so_far must be the prefix of the
// world's edit stream applied so far (the matching generalization keys are
// taken from the world by position); pass nullopt before any edit.
StepMetrics evaluate_step(const Matrix& w_current, const World& world,
                          const std::optional<KnowledgeSet>& edits_so_far,
                          const Matrix& w_previous, const ExperimentConfig& config,
                          std::size_t step_index);

using StepCallback = std::function<void(const StepMetrics&)>;

EditTrace run_sequence(const World& world, const ExperimentConfig& config,
                       const StepCallback& on_step = {});

// Pairwise cosine similarity of rows; diagonal set to exactly 1.
Matrix cosine_similarity_matrix(const Matrix& w);

} // namespace spherelab
