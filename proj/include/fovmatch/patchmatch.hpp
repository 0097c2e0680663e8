#pragma once

#include "fovmatch/mask.hpp"
#include "fovmatch/metric.hpp"
#include "fovmatch/rng.hpp"
#include "fovmatch/volume.hpp"

#include <cstdint>
#include <vector>

namespace fovmatch {

/// Per-voxel integer patch shift (u,v,w) on the working grid, plus the
/// current metric score at each voxel. Invariant: r + shift(r) stays inside
/// the SearchBox used to build the field.
struct ShiftField {
    Eigen::Vector3i dims{0, 0, 0};
    std::vector<Eigen::Vector3i> shifts;
    std::vector<double> scores;

    std::size_t size() const {
        return static_cast<std::size_t>(dims.x()) * dims.y() * dims.z();
    }
    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims.x()) * (y + static_cast<std::size_t>(dims.y()) * z);
    }
};

/// All pipeline tunables. Defaults follow the calibration defaults.
struct PMParams {
    int downsample_factor = 8;
    PatchSpec patch{4};          // 9x9x9
    int iterations = 2;
    double alpha = 0.5;
    int realizations = 8;
    std::uint64_t seed = 0;
    MetricKind metric = MetricKind::EA;
    double hist_lo_mm = -100.0;
    double hist_hi_mm = 100.0;
    int bins = 50;
    double target_spacing_mm = 1.0;
    int threads = 0;             // 0 = hardware concurrency
    bool pooled_histogram = false;

    void validate() const;
};

/// Bundles the (immutable) working-grid inputs the metric needs. Gradients
/// are only required for the EA metric.
struct MetricContext {
    const Volume* I = nullptr;
    const Volume* J = nullptr;
    const VectorField* grad_i = nullptr;
    const VectorField* grad_j = nullptr;
    // optional per-voxel gradient-norm caches; results are identical with or
    // without them
    const Eigen::VectorXf* norm_i = nullptr;
    const Eigen::VectorXf* norm_j = nullptr;
    MetricKind kind = MetricKind::EA;
    PatchSpec patch;

    Eigen::Vector3i dims() const { return I->dims; }
    double evaluate(const Eigen::Vector3i& center, const Eigen::Vector3i& shift) const;
};

/// Per-voxel Euclidean norms of a vector field.
Eigen::VectorXf gradient_norms(const VectorField& g);

/// Random initialization: every voxel r gets shift q - r with q uniform over
/// the box; scores are evaluated immediately.
ShiftField init_field(const MetricContext& ctx, const SearchBox& box, RngStream& rng);

/// One full X-fastest raster pass of propagation (already-visited -x/-y/-z
/// neighbors) followed by exponentially decaying random search. Candidates
/// leaving the box are skipped; only strict improvements are accepted, so
/// per-voxel scores never increase.
void sweep(ShiftField& field, const MetricContext& ctx, const SearchBox& box,
           double alpha, RngStream& rng);

/// init_field + params.iterations sweeps, on the RNG stream derived from
/// (params.seed, realization_index).
ShiftField run_realization(const MetricContext& ctx, const SearchBox& box,
                           const PMParams& params, int realization_index);

} // namespace fovmatch
