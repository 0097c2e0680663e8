#include "fovmatch/mask.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace fovmatch {

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(
        std::count(data.begin(), data.end(), std::uint8_t{1}));
}

BinaryMask threshold_mask(const Volume& v, float t) {
    BinaryMask m(v.dims, v.spacing, v.origin);
    for (Eigen::Index i = 0; i < v.size(); ++i)
        m.data[static_cast<std::size_t>(i)] = v.data[i] > t ? 1 : 0;
    return m;
}

Volume mask_to_volume(const BinaryMask& m) {
    Volume v(m.dims, m.spacing, m.origin);
    for (std::size_t i = 0; i < m.size(); ++i)
        v.data[static_cast<Eigen::Index>(i)] = m.data[i] ? 1.0f : 0.0f;
    return v;
}

namespace {

// Separable 1D min/max pass along one axis; exact for a cubic structuring
// element. `erode_pass` treats out-of-domain as false.
BinaryMask axis_pass(const BinaryMask& m, int axis, int radius, bool erode_pass) {
    BinaryMask out(m.dims, m.spacing, m.origin);
    for (int z = 0; z < m.dims.z(); ++z)
        for (int y = 0; y < m.dims.y(); ++y)
            for (int x = 0; x < m.dims.x(); ++x) {
                Eigen::Vector3i p(x, y, z);
                bool acc = erode_pass;
                for (int d = -radius; d <= radius; ++d) {
                    Eigen::Vector3i q = p;
                    q[axis] += d;
                    const bool val =
                        (q[axis] >= 0 && q[axis] < m.dims[axis]) ? m.at(q.x(), q.y(), q.z()) : false;
                    if (erode_pass)
                        acc = acc && val;
                    else
                        acc = acc || val;
                }
                out.set(x, y, z, acc);
            }
    return out;
}

BinaryMask morph(const BinaryMask& m, int kernel_edge, bool erode_op) {
    if (kernel_edge < 1 || kernel_edge % 2 == 0)
        throw std::invalid_argument("morphology kernel edge must be odd and positive");
    const int radius = kernel_edge / 2;
    if (radius == 0) return m;
    BinaryMask out = m;
    for (int axis = 0; axis < 3; ++axis)
        out = axis_pass(out, axis, radius, erode_op);
    return out;
}

} // namespace

BinaryMask erode(const BinaryMask& m, int kernel_edge) { return morph(m, kernel_edge, true); }
BinaryMask dilate(const BinaryMask& m, int kernel_edge) { return morph(m, kernel_edge, false); }

BinaryMask resample_mask_to_grid(const BinaryMask& m, const Eigen::Vector3i& dims,
                                 const Eigen::Vector3d& spacing,
                                 const Eigen::Vector3d& origin) {
    return threshold_mask(resample_to_grid(mask_to_volume(m), dims, spacing, origin), 0.5f);
}

BinaryMask downsample_mask(const BinaryMask& m, int factor) {
    Volume v = downsample(mask_to_volume(m), factor);
    BinaryMask out(v.dims, v.spacing, v.origin);
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.data[static_cast<std::size_t>(i)] = v.data[i] >= 0.5f ? 1 : 0;
    return out;
}

BinaryMask support(const Volume& v) {
    BinaryMask m(v.dims, v.spacing, v.origin);
    for (Eigen::Index i = 0; i < v.size(); ++i)
        m.data[static_cast<std::size_t>(i)] = v.data[i] != 0.0f ? 1 : 0;
    return m;
}

SearchBox search_box(const BinaryMask& mask, const BinaryMask& j_support) {
    if (mask.dims != j_support.dims)
        throw std::invalid_argument("search_box inputs must share the working grid");
    SearchBox box;
    box.lo = mask.dims;
    box.hi = Eigen::Vector3i(-1, -1, -1);
    auto absorb = [&](const BinaryMask& m) {
        for (int z = 0; z < m.dims.z(); ++z)
            for (int y = 0; y < m.dims.y(); ++y)
                for (int x = 0; x < m.dims.x(); ++x)
                    if (m.at(x, y, z)) {
                        box.lo = box.lo.cwiseMin(Eigen::Vector3i(x, y, z));
                        box.hi = box.hi.cwiseMax(Eigen::Vector3i(x, y, z));
                    }
    };
    absorb(mask);
    absorb(j_support);
    if (box.empty())
        throw std::invalid_argument("search_box: no true voxel in either input");
    return box;
}

} // namespace fovmatch
