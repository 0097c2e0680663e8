#pragma once

#include "fovmatch/aggregate.hpp"
#include "fovmatch/mask.hpp"

namespace fovmatch {

struct EvalReport {
    double dsc_before = 0.0;
    double dsc_after = 0.0;
    Eigen::Vector3d shift_error_mm{0.0, 0.0, 0.0};
    bool has_truth = false;
    double runtime_seconds = 0.0;
};

/// Dice similarity coefficient 2|A∩B| / (|A|+|B|). Requires matching dims
/// and at least one true voxel overall.
double dice(const BinaryMask& a, const BinaryMask& b);

/// Componentwise absolute difference in mm.
Eigen::Vector3d shift_error(const GlobalShift& estimated, const Eigen::Vector3d& truth_mm);

/// Translates a mask (trilinear on the 0/1 field, then > 0.5).
BinaryMask translate_mask(const BinaryMask& m, const Eigen::Vector3d& shift_mm);

} // namespace fovmatch
