#include "fovmatch/evaluation.hpp"

#include <stdexcept>

namespace fovmatch {

double dice(const BinaryMask& a, const BinaryMask& b) {
    if (a.dims != b.dims)
        throw std::invalid_argument("dice: dimension mismatch");
    std::size_t inter = 0, ca = 0, cb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool va = a.data[i] != 0, vb = b.data[i] != 0;
        inter += (va && vb) ? 1 : 0;
        ca += va ? 1 : 0;
        cb += vb ? 1 : 0;
    }
    if (ca + cb == 0)
        throw std::invalid_argument("dice: both masks are empty");
    return 2.0 * static_cast<double>(inter) / static_cast<double>(ca + cb);
}

Eigen::Vector3d shift_error(const GlobalShift& estimated, const Eigen::Vector3d& truth_mm) {
    return (estimated.shift_mm - truth_mm).cwiseAbs();
}

BinaryMask translate_mask(const BinaryMask& m, const Eigen::Vector3d& shift_mm) {
    return threshold_mask(translate(mask_to_volume(m), shift_mm), 0.5f);
}

} // namespace fovmatch
