#include "fovmatch/metric.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fovmatch {

namespace {

// In-grid overlap of the patch at `center` with its shifted counterpart;
// returns false when empty.
bool overlap_range(const Eigen::Vector3i& dims_i, const Eigen::Vector3i& dims_j,
                   const Eigen::Vector3i& center, const Eigen::Vector3i& shift,
                   int radius, Eigen::Vector3i& lo, Eigen::Vector3i& hi) {
    for (int a = 0; a < 3; ++a) {
        lo[a] = std::max({center[a] - radius, 0, -shift[a]});
        hi[a] = std::min({center[a] + radius, dims_i[a] - 1, dims_j[a] - 1 - shift[a]});
        if (lo[a] > hi[a]) return false;
    }
    return true;
}

} // namespace

double ea_distance(const VectorField& gI, const VectorField& gJ,
                   const Eigen::Vector3i& center, const Eigen::Vector3i& shift,
                   const PatchSpec& p) {
    if (!gI.contains(center))
        throw std::invalid_argument("ea_distance: center outside grid");

    Eigen::Vector3i lo, hi;
    if (!overlap_range(gI.dims, gJ.dims, center, shift, p.radius, lo, hi))
        return 0.0;

    double num = 0.0, den = 0.0;
    for (int z = lo.z(); z <= hi.z(); ++z)
        for (int y = lo.y(); y <= hi.y(); ++y) {
            Eigen::Index ii = gI.index(lo.x(), y, z);
            Eigen::Index ij = gJ.index(lo.x() + shift.x(), y + shift.y(), z + shift.z());
            for (int x = lo.x(); x <= hi.x(); ++x, ++ii, ++ij) {
                const Eigen::Vector3f a = gI.data.col(ii);
                const Eigen::Vector3f b = gJ.data.col(ij);
                num += std::abs(static_cast<double>(a.dot(b)));
                den += static_cast<double>(a.norm()) * static_cast<double>(b.norm());
            }
        }
    if (den == 0.0) return 0.0;
    return -num / den;
}

double l2_distance(const Volume& I, const Volume& J,
                   const Eigen::Vector3i& center, const Eigen::Vector3i& shift,
                   const PatchSpec& p) {
    if (!I.contains(center))
        throw std::invalid_argument("l2_distance: center outside grid");

    Eigen::Vector3i lo, hi;
    if (!overlap_range(I.dims, J.dims, center, shift, p.radius, lo, hi))
        return std::numeric_limits<double>::infinity();

    double sum = 0.0;
    long n = 0;
    for (int z = lo.z(); z <= hi.z(); ++z)
        for (int y = lo.y(); y <= hi.y(); ++y) {
            Eigen::Index ii = I.index(lo.x(), y, z);
            Eigen::Index ij = J.index(lo.x() + shift.x(), y + shift.y(), z + shift.z());
            for (int x = lo.x(); x <= hi.x(); ++x, ++ii, ++ij) {
                const double d = static_cast<double>(I.data[ii]) - static_cast<double>(J.data[ij]);
                sum += d * d;
                ++n;
            }
        }
    return sum / static_cast<double>(n);
}

} // namespace fovmatch
