#include "fovmatch/metric.hpp"

#include "fovmatch/rng.hpp"

#include <doctest.h>

#include <limits>

using namespace fovmatch;

namespace {

VectorField constant_field(const Eigen::Vector3i& dims, const Eigen::Vector3f& v) {
    VectorField f;
    f.dims = dims;
    f.data.resize(3, f.size());
    f.data.colwise() = v;
    return f;
}

VectorField random_field(const Eigen::Vector3i& dims, std::uint64_t seed) {
    VectorField f;
    f.dims = dims;
    f.data.resize(3, f.size());
    RngStream rng(seed, 0);
    for (Eigen::Index i = 0; i < f.size(); ++i)
        for (int a = 0; a < 3; ++a)
            f.data(a, i) = static_cast<float>(rng.uniform_symmetric());
    return f;
}

} // namespace

TEST_CASE("ea_distance saturates at -1 for identical gradients") {
    const Eigen::Vector3i dims(9, 9, 9);
    const VectorField g = random_field(dims, 7);
    const double d = ea_distance(g, g, Eigen::Vector3i(4, 4, 4), Eigen::Vector3i::Zero(),
                                 PatchSpec{2});
    CHECK(d == doctest::Approx(-1.0));
}

TEST_CASE("ea_distance saturates at -1 under contrast reversal") {
    const Eigen::Vector3i dims(9, 9, 9);
    const VectorField g = random_field(dims, 8);
    VectorField neg = g;
    neg.data = -neg.data;
    const double d = ea_distance(g, neg, Eigen::Vector3i(4, 4, 4), Eigen::Vector3i::Zero(),
                                 PatchSpec{2});
    CHECK(d == doctest::Approx(-1.0));
}

TEST_CASE("ea_distance of orthogonal gradients is 0") {
    const Eigen::Vector3i dims(7, 7, 7);
    const VectorField gi = constant_field(dims, Eigen::Vector3f(1, 0, 0));
    const VectorField gj = constant_field(dims, Eigen::Vector3f(0, 1, 0));
    CHECK(ea_distance(gi, gj, Eigen::Vector3i(3, 3, 3), Eigen::Vector3i::Zero(), PatchSpec{1}) ==
          doctest::Approx(0.0));
}

TEST_CASE("ea_distance is exactly invariant under positive scaling") {
    const Eigen::Vector3i dims(9, 9, 9);
    const VectorField gi = random_field(dims, 9);
    const VectorField gj = random_field(dims, 10);
    // power-of-two scale: exact in floating point
    VectorField scaled = gj;
    scaled.data *= 4.0f;

    const Eigen::Vector3i center(4, 4, 4), shift(1, -1, 0);
    const double a = ea_distance(gi, gj, center, shift, PatchSpec{2});
    const double b = ea_distance(gi, scaled, center, shift, PatchSpec{2});
    CHECK(a == b);

    VectorField scaled_odd = gj;
    scaled_odd.data *= 3.25f;
    CHECK(ea_distance(gi, scaled_odd, center, shift, PatchSpec{2}) ==
          doctest::Approx(a).epsilon(1e-6));

    VectorField negated = gj;
    negated.data = -negated.data;
    CHECK(ea_distance(gi, negated, center, shift, PatchSpec{2}) == a);
}

TEST_CASE("ea_distance stays within [-1, 0] for random inputs") {
    const Eigen::Vector3i dims(12, 12, 12);
    const VectorField gi = random_field(dims, 21);
    const VectorField gj = random_field(dims, 22);
    RngStream rng(23, 0);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::Vector3i center, shift;
        for (int a = 0; a < 3; ++a) {
            center[a] = static_cast<int>(rng.uniform_int(0, dims[a] - 1));
            shift[a] = static_cast<int>(rng.uniform_int(-15, 15));
        }
        const double d = ea_distance(gi, gj, center, shift, PatchSpec{2});
        CHECK(d <= 0.0);
        CHECK(d >= -1.0 - 1e-12);
    }
}

TEST_CASE("ea_distance of flat patches is the worst score") {
    const Eigen::Vector3i dims(5, 5, 5);
    const VectorField flat = constant_field(dims, Eigen::Vector3f::Zero());
    const VectorField g = random_field(dims, 3);
    CHECK(ea_distance(flat, g, Eigen::Vector3i(2, 2, 2), Eigen::Vector3i::Zero(), PatchSpec{1}) ==
          0.0);
}

TEST_CASE("ea_distance with empty overlap is 0 and center checks throw") {
    const Eigen::Vector3i dims(5, 5, 5);
    const VectorField g = random_field(dims, 4);
    CHECK(ea_distance(g, g, Eigen::Vector3i(2, 2, 2), Eigen::Vector3i(100, 0, 0), PatchSpec{1}) ==
          0.0);
    CHECK_THROWS_AS(
        ea_distance(g, g, Eigen::Vector3i(9, 0, 0), Eigen::Vector3i::Zero(), PatchSpec{1}),
        std::invalid_argument);
}

TEST_CASE("l2_distance basics") {
    const Eigen::Vector3i dims(7, 7, 7);
    Volume I(dims, Eigen::Vector3d::Ones(), Eigen::Vector3d::Zero());
    RngStream rng(11, 0);
    for (Eigen::Index i = 0; i < I.size(); ++i)
        I.data[i] = static_cast<float>(rng.uniform01());

    SUBCASE("aligned identical patches score 0") {
        CHECK(l2_distance(I, I, Eigen::Vector3i(3, 3, 3), Eigen::Vector3i::Zero(), PatchSpec{2}) ==
              doctest::Approx(0.0));
    }
    SUBCASE("constant difference d scores d^2") {
        Volume J = I;
        J.data.array() += 0.25f;
        CHECK(l2_distance(I, J, Eigen::Vector3i(3, 3, 3), Eigen::Vector3i::Zero(), PatchSpec{1}) ==
              doctest::Approx(0.0625).epsilon(1e-6));
    }
    SUBCASE("empty overlap is the +inf sentinel") {
        CHECK(l2_distance(I, I, Eigen::Vector3i(3, 3, 3), Eigen::Vector3i(50, 0, 0),
                          PatchSpec{1}) == std::numeric_limits<double>::infinity());
    }
    SUBCASE("non-negative for random shifts") {
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::Vector3i shift;
            for (int a = 0; a < 3; ++a)
                shift[a] = static_cast<int>(rng.uniform_int(-8, 8));
            CHECK(l2_distance(I, I, Eigen::Vector3i(3, 3, 3), shift, PatchSpec{2}) >= 0.0);
        }
    }
}

TEST_CASE("metrics depend only on the declared patch overlap") {
    // changing a voxel outside the patch must not change either score
    const Eigen::Vector3i dims(9, 9, 9);
    Volume I(dims, Eigen::Vector3d::Ones(), Eigen::Vector3d::Zero());
    RngStream rng(31, 0);
    for (Eigen::Index i = 0; i < I.size(); ++i)
        I.data[i] = static_cast<float>(rng.uniform01());
    Volume J = I;

    const Eigen::Vector3i center(4, 4, 4);
    const PatchSpec p{1};
    const double before = l2_distance(I, J, center, Eigen::Vector3i::Zero(), p);
    J.at(0, 0, 0) += 100.0f;  // far outside the 3^3 patch
    CHECK(l2_distance(I, J, center, Eigen::Vector3i::Zero(), p) == before);

    const VectorField gi = random_field(dims, 32);
    VectorField gj = random_field(dims, 33);
    const double ea_before = ea_distance(gi, gj, center, Eigen::Vector3i::Zero(), p);
    gj.data.col(gj.index(8, 8, 8)) += Eigen::Vector3f(50, 0, 0);
    CHECK(ea_distance(gi, gj, center, Eigen::Vector3i::Zero(), p) == ea_before);
}
