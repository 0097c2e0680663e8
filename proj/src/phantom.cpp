#include "fovmatch/phantom.hpp"

#include "fovmatch/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fovmatch {

std::string transfer_name(Transfer t) {
    switch (t) {
        case Transfer::Identity: return "identity";
        case Transfer::AffineGainBias: return "affine_gain_bias";
        case Transfer::Inverted: return "inverted";
        case Transfer::Gamma: return "gamma";
    }
    return "identity";
}

Transfer transfer_from_name(const std::string& name) {
    if (name == "identity") return Transfer::Identity;
    if (name == "affine_gain_bias") return Transfer::AffineGainBias;
    if (name == "inverted") return Transfer::Inverted;
    if (name == "gamma") return Transfer::Gamma;
    throw std::invalid_argument("unknown transfer: " + name);
}

void PhantomSpec::validate() const {
    if ((dims.array() <= 0).any())
        throw std::invalid_argument("phantom dims must be positive");
    if ((spacing_mm.array() <= 0.0).any())
        throw std::invalid_argument("phantom spacing must be positive");
    if ((organ_radii_mm.array() <= 0.0).any())
        throw std::invalid_argument("organ radii must be positive");
    if (noise_sigma < 0.0)
        throw std::invalid_argument("noise sigma must be non-negative");
    if (needles < 0)
        throw std::invalid_argument("needle count must be non-negative");
    // the shifted organ must still fit on the grid
    const Eigen::Vector3d extent = dims.cast<double>().cwiseProduct(spacing_mm);
    for (int a = 0; a < 3; ++a) {
        const double lo = organ_center_mm[a] - organ_radii_mm[a] + std::min(0.0, truth_shift_mm[a]);
        const double hi = organ_center_mm[a] + organ_radii_mm[a] + std::max(0.0, truth_shift_mm[a]);
        if (lo < 0.0 || hi > extent[a])
            throw std::invalid_argument("grid too small for organ plus truth shift");
    }
}

namespace {

double point_segment_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                              const Eigen::Vector3d& b) {
    const Eigen::Vector3d ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

float scene_value(const PhantomSpec& spec, const Eigen::Vector3d& p) {
    float v = 0.0f;
    const Eigen::Vector3d q = (p - spec.organ_center_mm).cwiseQuotient(spec.organ_radii_mm);
    if (q.squaredNorm() <= 1.0) v += spec.organ_intensity;
    for (const auto& s : spec.spheres)
        if ((p - s.center_mm).squaredNorm() <= s.radius_mm * s.radius_mm) v += s.intensity;
    for (const auto& t : spec.tubes)
        if (point_segment_distance(p, t.a_mm, t.b_mm) <= t.radius_mm) v += t.intensity;
    return v;
}

float apply_transfer(const PhantomSpec& spec, float v) {
    switch (spec.transfer) {
        case Transfer::Identity: return v;
        case Transfer::AffineGainBias:
            return static_cast<float>(spec.gain * v + spec.bias);
        case Transfer::Inverted:
            return static_cast<float>(spec.gain * (-v) + spec.bias);
        case Transfer::Gamma:
            return static_cast<float>(std::pow(std::clamp(static_cast<double>(v), 0.0, 1.0), spec.gamma));
    }
    return v;
}

} // namespace

PhantomPair generate(const PhantomSpec& spec) {
    spec.validate();

    PhantomPair out;
    out.truth_mm = spec.truth_shift_mm;

    // modality A: the scene as-is
    out.fixed_image = Volume(spec.dims, spec.spacing_mm, Eigen::Vector3d::Zero());
    for (int z = 0; z < spec.dims.z(); ++z)
        for (int y = 0; y < spec.dims.y(); ++y)
            for (int x = 0; x < spec.dims.x(); ++x)
                out.fixed_image.at(x, y, z) =
                    scene_value(spec, out.fixed_image.world(x, y, z));

    // organ support on the fixed grid
    out.mask = BinaryMask(spec.dims, spec.spacing_mm, Eigen::Vector3d::Zero());
    for (int z = 0; z < spec.dims.z(); ++z)
        for (int y = 0; y < spec.dims.y(); ++y)
            for (int x = 0; x < spec.dims.x(); ++x) {
                const Eigen::Vector3d p = out.fixed_image.world(x, y, z);
                const Eigen::Vector3d q = (p - spec.organ_center_mm).cwiseQuotient(spec.organ_radii_mm);
                out.mask.set(x, y, z, q.squaredNorm() <= 1.0);
            }

    // modality B: translated scene through the transfer
    const Eigen::Vector3i mdims = spec.dims - spec.crop_lo - spec.crop_hi;
    if ((mdims.array() <= 0).any())
        throw std::invalid_argument("crop margins consume the whole moving grid");
    const Eigen::Vector3d morigin = spec.crop_lo.cast<double>().cwiseProduct(spec.spacing_mm);
    out.moving = Volume(mdims, spec.spacing_mm, morigin);
    for (int z = 0; z < mdims.z(); ++z)
        for (int y = 0; y < mdims.y(); ++y)
            for (int x = 0; x < mdims.x(); ++x) {
                const Eigen::Vector3d p = out.moving.world(x, y, z);
                out.moving.at(x, y, z) =
                    apply_transfer(spec, scene_value(spec, p - spec.truth_shift_mm));
            }

    // needle streaks: bright line segments through random points inside the
    // (translated) organ
    if (spec.needles > 0) {
        RngStream rng(spec.seed, 1);
        const Eigen::Vector3d organ_b = spec.organ_center_mm + spec.truth_shift_mm;
        const float streak_intensity = 1.0f;
        const double streak_radius = 1.5 * spec.spacing_mm.minCoeff();
        const double streak_len = 120.0;
        std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>> segments;
        for (int n = 0; n < spec.needles; ++n) {
            Eigen::Vector3d tip;
            do {
                for (int a = 0; a < 3; ++a)
                    tip[a] = organ_b[a] + rng.uniform_symmetric() * spec.organ_radii_mm[a];
            } while (((tip - organ_b).cwiseQuotient(spec.organ_radii_mm)).squaredNorm() > 1.0);
            Eigen::Vector3d dir;
            do {
                for (int a = 0; a < 3; ++a) dir[a] = rng.uniform_symmetric();
            } while (dir.squaredNorm() < 1e-6);
            dir.normalize();
            segments.emplace_back(tip - 0.5 * streak_len * dir, tip + 0.5 * streak_len * dir);
        }
        // streaks overlay the anatomy only: outside the (translated) organ
        // there is no tissue to scatter in, so the segments are clipped to it
        const Eigen::Vector3d clip_radii = spec.organ_radii_mm + Eigen::Vector3d::Constant(4.0);
        for (int z = 0; z < mdims.z(); ++z)
            for (int y = 0; y < mdims.y(); ++y)
                for (int x = 0; x < mdims.x(); ++x) {
                    const Eigen::Vector3d p = out.moving.world(x, y, z);
                    if (((p - organ_b).cwiseQuotient(clip_radii)).squaredNorm() > 1.0) continue;
                    for (const auto& [a, b] : segments)
                        if (point_segment_distance(p, a, b) <= streak_radius)
                            out.moving.at(x, y, z) += streak_intensity;
                }
    }

    if (spec.noise_sigma > 0.0) {
        RngStream rng(spec.seed, 2);
        for (Eigen::Index i = 0; i < out.moving.size(); ++i)
            out.moving.data[i] += static_cast<float>(rng.gaussian(spec.noise_sigma));
    }

    // circular FOV in the transversal (X-Y) plane, centered on the moving grid
    if (spec.cylinder_radius_mm > 0.0) {
        const Eigen::Vector3d center =
            out.moving.origin +
            0.5 * (out.moving.dims.cast<double>() - Eigen::Vector3d::Ones().eval())
                      .cwiseProduct(out.moving.spacing);
        for (int z = 0; z < mdims.z(); ++z)
            for (int y = 0; y < mdims.y(); ++y)
                for (int x = 0; x < mdims.x(); ++x) {
                    const Eigen::Vector3d p = out.moving.world(x, y, z);
                    const double dx = p.x() - center.x(), dy = p.y() - center.y();
                    if (dx * dx + dy * dy > spec.cylinder_radius_mm * spec.cylinder_radius_mm)
                        out.moving.at(x, y, z) = 0.0f;
                }
    }

    return out;
}

PhantomSpec make_textured_spec(std::uint64_t seed) {
    PhantomSpec spec;
    spec.seed = seed;
    RngStream rng(seed, 0);
    auto point_inside_organ = [&]() {
        Eigen::Vector3d p;
        do {
            for (int a = 0; a < 3; ++a)
                p[a] = spec.organ_center_mm[a] + rng.uniform_symmetric() * spec.organ_radii_mm[a];
        } while (((p - spec.organ_center_mm).cwiseQuotient(spec.organ_radii_mm)).squaredNorm() > 0.8);
        return p;
    };
    for (int i = 0; i < 14; ++i) {
        SpherePrim s;
        s.center_mm = point_inside_organ();
        s.radius_mm = 4.0 + 8.0 * rng.uniform01();
        s.intensity = static_cast<float>((rng.uniform01() < 0.5 ? -1.0 : 1.0) *
                                         (0.15 + 0.2 * rng.uniform01()));
        spec.spheres.push_back(s);
    }
    for (int i = 0; i < 5; ++i) {
        TubePrim t;
        t.a_mm = point_inside_organ();
        t.b_mm = point_inside_organ();
        t.radius_mm = 2.0 + 2.0 * rng.uniform01();
        t.intensity = static_cast<float>(0.2 + 0.15 * rng.uniform01());
        spec.tubes.push_back(t);
    }
    return spec;
}

std::vector<PhantomSpec> sweep_specs(const PhantomSpec& base, const std::string& field,
                                     const std::vector<double>& values) {
    std::vector<PhantomSpec> out;
    out.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        PhantomSpec s = base;
        const double v = values[i];
        if (field == "noise_sigma")
            s.noise_sigma = v;
        else if (field == "needles")
            s.needles = static_cast<int>(v);
        else if (field == "gain")
            s.gain = v;
        else if (field == "bias")
            s.bias = v;
        else if (field == "gamma")
            s.gamma = v;
        else if (field == "cylinder_radius_mm")
            s.cylinder_radius_mm = v;
        else
            throw std::invalid_argument("sweep_specs: unknown field " + field);
        s.seed = base.seed + i + 1;
        out.push_back(s);
    }
    return out;
}

namespace {

std::ostream& put3(std::ostream& os, const char* key, const Eigen::Vector3d& v) {
    return os << key << " = " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
}

} // namespace

void save_phantom_spec(const PhantomSpec& spec, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write phantom spec: " + path);
    f.precision(17);
    f << "dims = " << spec.dims.x() << ' ' << spec.dims.y() << ' ' << spec.dims.z() << '\n';
    put3(f, "spacing_mm", spec.spacing_mm);
    put3(f, "organ_center_mm", spec.organ_center_mm);
    put3(f, "organ_radii_mm", spec.organ_radii_mm);
    f << "organ_intensity = " << spec.organ_intensity << '\n';
    put3(f, "truth_shift_mm", spec.truth_shift_mm);
    f << "transfer = " << transfer_name(spec.transfer) << '\n'
      << "gain = " << spec.gain << '\n'
      << "bias = " << spec.bias << '\n'
      << "gamma = " << spec.gamma << '\n'
      << "noise_sigma = " << spec.noise_sigma << '\n'
      << "cylinder_radius_mm = " << spec.cylinder_radius_mm << '\n'
      << "needles = " << spec.needles << '\n'
      << "crop_lo = " << spec.crop_lo.x() << ' ' << spec.crop_lo.y() << ' ' << spec.crop_lo.z() << '\n'
      << "crop_hi = " << spec.crop_hi.x() << ' ' << spec.crop_hi.y() << ' ' << spec.crop_hi.z() << '\n'
      << "seed = " << spec.seed << '\n';
    for (const auto& s : spec.spheres)
        f << "sphere = " << s.center_mm.x() << ' ' << s.center_mm.y() << ' ' << s.center_mm.z()
          << ' ' << s.radius_mm << ' ' << s.intensity << '\n';
    for (const auto& t : spec.tubes)
        f << "tube = " << t.a_mm.x() << ' ' << t.a_mm.y() << ' ' << t.a_mm.z() << ' '
          << t.b_mm.x() << ' ' << t.b_mm.y() << ' ' << t.b_mm.z() << ' ' << t.radius_mm << ' '
          << t.intensity << '\n';
}

PhantomSpec load_phantom_spec(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open phantom spec: " + path);
    PhantomSpec spec;
    spec.spheres.clear();
    spec.tubes.clear();
    std::string line;
    while (std::getline(f, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        key.erase(key.find_last_not_of(" \t") + 1);
        key.erase(0, key.find_first_not_of(" \t"));
        std::istringstream val(line.substr(eq + 1));
        if (key == "dims")
            val >> spec.dims.x() >> spec.dims.y() >> spec.dims.z();
        else if (key == "spacing_mm")
            val >> spec.spacing_mm.x() >> spec.spacing_mm.y() >> spec.spacing_mm.z();
        else if (key == "organ_center_mm")
            val >> spec.organ_center_mm.x() >> spec.organ_center_mm.y() >> spec.organ_center_mm.z();
        else if (key == "organ_radii_mm")
            val >> spec.organ_radii_mm.x() >> spec.organ_radii_mm.y() >> spec.organ_radii_mm.z();
        else if (key == "organ_intensity")
            val >> spec.organ_intensity;
        else if (key == "truth_shift_mm")
            val >> spec.truth_shift_mm.x() >> spec.truth_shift_mm.y() >> spec.truth_shift_mm.z();
        else if (key == "transfer") {
            std::string name;
            val >> name;
            spec.transfer = transfer_from_name(name);
        } else if (key == "gain")
            val >> spec.gain;
        else if (key == "bias")
            val >> spec.bias;
        else if (key == "gamma")
            val >> spec.gamma;
        else if (key == "noise_sigma")
            val >> spec.noise_sigma;
        else if (key == "cylinder_radius_mm")
            val >> spec.cylinder_radius_mm;
        else if (key == "needles")
            val >> spec.needles;
        else if (key == "crop_lo")
            val >> spec.crop_lo.x() >> spec.crop_lo.y() >> spec.crop_lo.z();
        else if (key == "crop_hi")
            val >> spec.crop_hi.x() >> spec.crop_hi.y() >> spec.crop_hi.z();
        else if (key == "seed")
            val >> spec.seed;
        else if (key == "sphere") {
            SpherePrim s;
            val >> s.center_mm.x() >> s.center_mm.y() >> s.center_mm.z() >> s.radius_mm >> s.intensity;
            spec.spheres.push_back(s);
        } else if (key == "tube") {
            TubePrim t;
            val >> t.a_mm.x() >> t.a_mm.y() >> t.a_mm.z() >> t.b_mm.x() >> t.b_mm.y() >> t.b_mm.z()
                >> t.radius_mm >> t.intensity;
            spec.tubes.push_back(t);
        } else {
            throw std::runtime_error("unknown phantom spec key: " + key);
        }
        if (!val)
            throw std::runtime_error("malformed phantom spec value for " + key);
    }
    return spec;
}

} // namespace fovmatch
