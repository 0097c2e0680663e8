#pragma once

#include "fovmatch/mask.hpp"
#include "fovmatch/volume.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fovmatch {

/// Vessel/lesion surrogates giving patches discriminative edges.
struct SpherePrim {
    Eigen::Vector3d center_mm;
    double radius_mm = 5.0;
    float intensity = 0.2f;
};

struct TubePrim {
    Eigen::Vector3d a_mm, b_mm;
    double radius_mm = 3.0;
    float intensity = 0.2f;
};

enum class Transfer { Identity, AffineGainBias, Inverted, Gamma };

std::string transfer_name(Transfer t);
Transfer transfer_from_name(const std::string& name);

/// Parameters of a synthetic multi-modal pair with known ground-truth
/// translation. The moving image is the scene translated by truth_shift_mm,
/// rendered through the modality-B transfer, then optionally
/// cylinder-cropped, streaked, noised and FOV-cropped.
struct PhantomSpec {
    Eigen::Vector3i dims{192, 192, 192};
    Eigen::Vector3d spacing_mm{1.0, 1.0, 1.0};
    Eigen::Vector3d organ_center_mm{96.0, 96.0, 96.0};
    Eigen::Vector3d organ_radii_mm{55.0, 45.0, 50.0};
    float organ_intensity = 0.5f;
    std::vector<SpherePrim> spheres;
    std::vector<TubePrim> tubes;
    Eigen::Vector3d truth_shift_mm{0.0, 0.0, 0.0};
    Transfer transfer = Transfer::Identity;
    double gain = 1.0;
    double bias = 0.0;
    double gamma = 1.0;
    double noise_sigma = 0.0;
    double cylinder_radius_mm = 0.0;   // 0 disables the circular FOV crop
    int needles = 0;                   // streak artifact generators
    Eigen::Vector3i crop_lo{0, 0, 0};  // moving-image FOV margins, voxels
    Eigen::Vector3i crop_hi{0, 0, 0};
    std::uint64_t seed = 0;

    void validate() const;
};

struct PhantomPair {
    Volume fixed_image;
    Volume moving;
    BinaryMask mask;  // organ support on the fixed grid
    Eigen::Vector3d truth_mm;
};

/// Deterministic given spec.seed.
PhantomPair generate(const PhantomSpec& spec);

/// A spec pre-populated with randomly placed spheres and tubes inside the
/// organ, deterministic given the seed.
PhantomSpec make_textured_spec(std::uint64_t seed);

/// Copies of `base` with the named numeric field substituted per value;
/// seeds offset per item. Recognized fields: noise_sigma, needles, gain,
/// bias, gamma, cylinder_radius_mm. Throws on an unknown field name.
std::vector<PhantomSpec> sweep_specs(const PhantomSpec& base, const std::string& field,
                                     const std::vector<double>& values);

/// Plain-text key=value (de)serialization; sphere/tube lines repeat.
void save_phantom_spec(const PhantomSpec& spec, const std::string& path);
PhantomSpec load_phantom_spec(const std::string& path);

} // namespace fovmatch
