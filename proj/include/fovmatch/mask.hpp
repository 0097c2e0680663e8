#pragma once

#include "fovmatch/volume.hpp"

#include <cstdint>
#include <vector>

namespace fovmatch {

/// Dense 3D boolean field on a Volume grid.
struct BinaryMask {
    Eigen::Vector3i dims{0, 0, 0};
    Eigen::Vector3d spacing{1.0, 1.0, 1.0};
    Eigen::Vector3d origin{0.0, 0.0, 0.0};
    std::vector<std::uint8_t> data;

    BinaryMask() = default;
    BinaryMask(const Eigen::Vector3i& d, const Eigen::Vector3d& sp,
               const Eigen::Vector3d& org)
        : dims(d), spacing(sp), origin(org),
          data(static_cast<std::size_t>(d.x()) * d.y() * d.z(), 0) {}

    std::size_t size() const {
        return static_cast<std::size_t>(dims.x()) * dims.y() * dims.z();
    }
    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims.x()) * (y + static_cast<std::size_t>(dims.y()) * z);
    }
    bool at(int x, int y, int z) const { return data[index(x, y, z)] != 0; }
    void set(int x, int y, int z, bool v) { data[index(x, y, z)] = v ? 1 : 0; }

    std::size_t count() const;
};

/// Axis-aligned inclusive voxel box on the working grid.
struct SearchBox {
    Eigen::Vector3i lo{0, 0, 0};
    Eigen::Vector3i hi{-1, -1, -1};

    bool contains(const Eigen::Vector3i& p) const {
        return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
    }
    bool empty() const { return (hi.array() < lo.array()).any(); }
};

/// true where sample > t.
BinaryMask threshold_mask(const Volume& v, float t);

/// Mask as a 0/1 float volume (for file I/O and interpolation).
Volume mask_to_volume(const BinaryMask& m);

/// Cubic structuring element of the given odd edge; out-of-domain voxels
/// count as false, so erosion shrinks at image borders.
BinaryMask erode(const BinaryMask& m, int kernel_edge);
BinaryMask dilate(const BinaryMask& m, int kernel_edge);

/// Resamples a mask onto a grid: trilinear on the 0/1 field, then > 0.5.
BinaryMask resample_mask_to_grid(const BinaryMask& m, const Eigen::Vector3i& dims,
                                 const Eigen::Vector3d& spacing,
                                 const Eigen::Vector3d& origin);

/// Block-mean down-sampling followed by >= 0.5 binarization.
BinaryMask downsample_mask(const BinaryMask& m, int factor);

/// Nonzero support of a volume as a mask.
BinaryMask support(const Volume& v);

/// Tightest box containing every true voxel of mask ∪ j_support; both masks
/// live on the common working grid. Throws on an empty union.
SearchBox search_box(const BinaryMask& mask, const BinaryMask& j_support);

} // namespace fovmatch
