#pragma once

#include <Eigen/Core>

#include <string>

namespace fovmatch {

/// Dense 3D scalar image. Data is stored X-fastest; voxel (0,0,0) sits at
/// `origin` in world (mm) coordinates and voxel centers are spaced by
/// `spacing` along each axis.
struct Volume {
    Eigen::Vector3i dims{0, 0, 0};
    Eigen::Vector3d spacing{1.0, 1.0, 1.0};
    Eigen::Vector3d origin{0.0, 0.0, 0.0};
    Eigen::VectorXf data;

    Volume() = default;
    Volume(const Eigen::Vector3i& d, const Eigen::Vector3d& sp,
           const Eigen::Vector3d& org)
        : dims(d), spacing(sp), origin(org),
          data(Eigen::VectorXf::Zero(static_cast<Eigen::Index>(d.x()) * d.y() * d.z())) {}

    Eigen::Index size() const {
        return static_cast<Eigen::Index>(dims.x()) * dims.y() * dims.z();
    }
    Eigen::Index index(int x, int y, int z) const {
        return static_cast<Eigen::Index>(x) +
               static_cast<Eigen::Index>(dims.x()) * (y + static_cast<Eigen::Index>(dims.y()) * z);
    }
    float& at(int x, int y, int z) { return data[index(x, y, z)]; }
    float at(int x, int y, int z) const { return data[index(x, y, z)]; }

    Eigen::Vector3d world(int x, int y, int z) const {
        return origin + Eigen::Vector3d(x * spacing.x(), y * spacing.y(), z * spacing.z());
    }
    bool contains(const Eigen::Vector3i& p) const {
        return (p.array() >= 0).all() && (p.array() < dims.array()).all();
    }
};

/// Dense field of 3-vectors on a Volume grid (e.g. image gradients,
/// intensity / mm per component).
struct VectorField {
    Eigen::Vector3i dims{0, 0, 0};
    Eigen::Vector3d spacing{1.0, 1.0, 1.0};
    Eigen::Vector3d origin{0.0, 0.0, 0.0};
    Eigen::Matrix<float, 3, Eigen::Dynamic> data;  // one column per voxel

    Eigen::Index size() const {
        return static_cast<Eigen::Index>(dims.x()) * dims.y() * dims.z();
    }
    Eigen::Index index(int x, int y, int z) const {
        return static_cast<Eigen::Index>(x) +
               static_cast<Eigen::Index>(dims.x()) * (y + static_cast<Eigen::Index>(dims.y()) * z);
    }
    bool contains(const Eigen::Vector3i& p) const {
        return (p.array() >= 0).all() && (p.array() < dims.array()).all();
    }
};

/// Reads a MetaImage header/raw pair. Integer element types are widened to
/// float. Throws std::runtime_error on missing files, malformed headers or
/// element-count mismatches.
Volume load_volume(const std::string& path);

/// Writes a MetaImage pair (header at `path`, raw data alongside it, always
/// MET_FLOAT little-endian). load_volume inverts it exactly.
void save_volume(const Volume& v, const std::string& path);

/// Trilinear sample at a world position; 0 outside the source extent.
float sample_world(const Volume& v, const Eigen::Vector3d& p);

/// Resamples onto an explicitly given grid by trilinear interpolation in
/// world coordinates.
Volume resample_to_grid(const Volume& v, const Eigen::Vector3i& dims,
                        const Eigen::Vector3d& spacing, const Eigen::Vector3d& origin);

/// Resamples to an isotropic grid of the given spacing covering the source
/// extent (output dims are rounded up, never cropping the physical extent).
Volume resample_isotropic(const Volume& v, double target_spacing);

/// Block-mean down-sampling by an integer factor; partial edge blocks
/// average the available samples. Output spacing scales by the factor.
Volume downsample(const Volume& v, int factor);

/// Spacing-normalized finite-difference gradient: central differences on
/// interior voxels, one-sided at the boundaries. Requires dims >= 2 per axis.
VectorField gradient(const Volume& v);

/// translate(v, s)(p) = v sampled at world position p - s; content moves by
/// +s. Outside the source extent the result is 0.
Volume translate(const Volume& v, const Eigen::Vector3d& shift_mm);

} // namespace fovmatch
