#pragma once

#include "fovmatch/patchmatch.hpp"

#include <array>
#include <vector>

namespace fovmatch {

/// Per-axis shift occurrence histogram (uniform bins over [lo, hi] mm;
/// out-of-range values clamp into the boundary bins).
struct ShiftHistogram {
    int axis = 0;  // 0=X 1=Y 2=Z
    double lo_mm = -100.0;
    double hi_mm = 100.0;
    std::vector<long> counts;

    int bins() const { return static_cast<int>(counts.size()); }
    double bin_width() const { return (hi_mm - lo_mm) / bins(); }
    double center(int b) const { return lo_mm + (b + 0.5) * bin_width(); }
};

/// The estimated global translation (mm) plus the evidence behind it.
struct GlobalShift {
    Eigen::Vector3d shift_mm{0.0, 0.0, 0.0};
    Eigen::Vector3<long> per_axis_mode_count{0, 0, 0};
    std::array<ShiftHistogram, 3> histograms;
};

/// Per voxel, the realization vector minimizing the sum of Euclidean
/// distances to all realization vectors at that voxel (vector median over
/// the candidate set); ties go to the lowest realization index. Scores are
/// not carried over.
ShiftField median_field(const std::vector<ShiftField>& realizations);

/// Tallies each component of V (converted voxels -> mm with the working
/// spacing) over the true voxels of the mask.
std::array<ShiftHistogram, 3> shift_histogram(const ShiftField& field,
                                              const BinaryMask& mask,
                                              const Eigen::Vector3d& working_spacing_mm,
                                              double lo_mm, double hi_mm, int bins);

/// Like shift_histogram but accumulating into existing histograms (pooled
/// across realizations).
void accumulate_histogram(std::array<ShiftHistogram, 3>& hists, const ShiftField& field,
                          const BinaryMask& mask, const Eigen::Vector3d& working_spacing_mm);

/// Per axis, the center of the maximal-count bin; ties resolve to the
/// smallest-magnitude center, then the lower one.
GlobalShift mode_shift(const std::array<ShiftHistogram, 3>& histograms);

/// The full pipeline: resample I, J, M onto the fixed image's isotropic
/// grid, down-sample, compute the search box, run the PatchMatch
/// realizations (in parallel), aggregate by vector median, histogram within
/// M and pick the per-axis modes. Deterministic given params.seed.
GlobalShift estimate_global_shift(const Volume& I, const Volume& J,
                                  const BinaryMask& M, const PMParams& params);

} // namespace fovmatch
