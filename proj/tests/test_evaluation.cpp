#include "fovmatch/evaluation.hpp"

#include <doctest.h>

#include <algorithm>

using namespace fovmatch;

namespace {

BinaryMask box_mask(const Eigen::Vector3i& dims, const Eigen::Vector3i& lo,
                    const Eigen::Vector3i& hi) {
    BinaryMask m(dims, Eigen::Vector3d::Ones(), Eigen::Vector3d::Zero());
    for (int z = lo.z(); z <= hi.z(); ++z)
        for (int y = lo.y(); y <= hi.y(); ++y)
            for (int x = lo.x(); x <= hi.x(); ++x)
                m.set(x, y, z, true);
    return m;
}

} // namespace

TEST_CASE("dice identities") {
    const Eigen::Vector3i dims(10, 10, 10);
    const BinaryMask a = box_mask(dims, {2, 2, 2}, {5, 5, 5});

    CHECK(dice(a, a) == doctest::Approx(1.0));

    const BinaryMask disjoint = box_mask(dims, {7, 7, 7}, {9, 9, 9});
    CHECK(dice(a, disjoint) == doctest::Approx(0.0));

    // equal volumes (4x4x4 each) overlapping in half: 2*(32)/(64+64) = 0.5
    const BinaryMask b = box_mask(dims, {2, 2, 4}, {5, 5, 7});
    CHECK(dice(a, b) == doctest::Approx(0.5));
}

TEST_CASE("dice is symmetric and permutation-invariant") {
    const Eigen::Vector3i dims(8, 8, 8);
    const BinaryMask a = box_mask(dims, {1, 1, 1}, {4, 4, 4});
    const BinaryMask b = box_mask(dims, {3, 2, 1}, {6, 6, 5});
    CHECK(dice(a, b) == dice(b, a));

    // apply the same voxel permutation (a reversal) to both masks
    BinaryMask ra = a, rb = b;
    std::reverse(ra.data.begin(), ra.data.end());
    std::reverse(rb.data.begin(), rb.data.end());
    CHECK(dice(ra, rb) == doctest::Approx(dice(a, b)));
}

TEST_CASE("dice error cases") {
    const Eigen::Vector3i dims(4, 4, 4);
    BinaryMask empty(dims, Eigen::Vector3d::Ones(), Eigen::Vector3d::Zero());
    CHECK_THROWS_AS(dice(empty, empty), std::invalid_argument);

    BinaryMask other(Eigen::Vector3i(5, 4, 4), Eigen::Vector3d::Ones(), Eigen::Vector3d::Zero());
    CHECK_THROWS_AS(dice(empty, other), std::invalid_argument);
}

TEST_CASE("shift_error is the componentwise absolute difference") {
    GlobalShift g;
    g.shift_mm = Eigen::Vector3d(12, 0, 0);
    CHECK(shift_error(g, Eigen::Vector3d(12, 0, 0)) == Eigen::Vector3d(0, 0, 0));
    CHECK(shift_error(g, Eigen::Vector3d(8, 0, 0)) == Eigen::Vector3d(4, 0, 0));

    GlobalShift h;
    h.shift_mm = Eigen::Vector3d(8, 0, 0);
    CHECK(shift_error(g, h.shift_mm) == shift_error(h, g.shift_mm));
}

TEST_CASE("translate_mask moves support by the shift") {
    const Eigen::Vector3i dims(16, 16, 16);
    const BinaryMask m = box_mask(dims, {4, 4, 4}, {7, 7, 7});
    const BinaryMask t = translate_mask(m, Eigen::Vector3d(3, 0, 0));
    CHECK(t.at(8, 5, 5));
    CHECK_FALSE(t.at(4, 5, 5));
    CHECK(t.count() == m.count());
}
