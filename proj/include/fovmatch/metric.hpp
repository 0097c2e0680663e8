#pragma once

#include "fovmatch/volume.hpp"

namespace fovmatch {

/// Cubic patch of edge 2*radius+1 voxels.
struct PatchSpec {
    int radius = 4;  // 9^3 default
    int edge() const { return 2 * radius + 1; }
};

enum class MetricKind { EA, L2 };

/// Edge-alignment patch distance between the patch centered at `center` in
/// the gI grid and the patch centered at `center + shift` in the gJ grid:
///
///   -(sum |gI(r) . gJ(r+shift)|) / (sum |gI(r)| |gJ(r+shift)|)
///
/// summed over patch voxels where both positions are in-grid. Always in
/// [-1, 0]; -1 means perfectly (anti-)parallel gradients. A zero denominator
/// or an empty overlap scores 0, the worst value, so flat patches never win.
double ea_distance(const VectorField& gI, const VectorField& gJ,
                   const Eigen::Vector3i& center, const Eigen::Vector3i& shift,
                   const PatchSpec& p);

/// Mean squared intensity difference over the in-grid patch overlap; +inf
/// when the overlap is empty so such candidates are never preferred.
double l2_distance(const Volume& I, const Volume& J,
                   const Eigen::Vector3i& center, const Eigen::Vector3i& shift,
                   const PatchSpec& p);

} // namespace fovmatch
