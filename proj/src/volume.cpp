#include "fovmatch/volume.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fovmatch {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <typename T>
void read_raw(std::ifstream& f, Eigen::VectorXf& out, Eigen::Index n) {
    std::vector<T> buf(static_cast<std::size_t>(n));
    f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * sizeof(T)));
    if (f.gcount() != static_cast<std::streamsize>(n * sizeof(T)))
        throw std::runtime_error("element count mismatch in raw data file");
    // no extra trailing data allowed either
    char probe;
    f.read(&probe, 1);
    if (!f.eof())
        throw std::runtime_error("element count mismatch in raw data file (extra data)");
    out.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        out[i] = static_cast<float>(buf[static_cast<std::size_t>(i)]);
}

} // namespace

Volume load_volume(const std::string& path) {
    std::ifstream header(path);
    if (!header)
        throw std::runtime_error("cannot open volume file: " + path);

    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(header, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    auto need = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end())
            throw std::runtime_error("malformed MetaImage header, missing " + key + ": " + path);
        return it->second;
    };

    if (kv.count("ObjectType") && need("ObjectType") != "Image")
        throw std::runtime_error("unsupported ObjectType in " + path);
    if (std::stoi(need("NDims")) != 3)
        throw std::runtime_error("only 3D volumes are supported: " + path);
    if (kv.count("BinaryDataByteOrderMSB") && kv["BinaryDataByteOrderMSB"] == "True")
        throw std::runtime_error("big-endian data is not supported: " + path);

    Volume v;
    {
        std::istringstream ss(need("DimSize"));
        ss >> v.dims.x() >> v.dims.y() >> v.dims.z();
        if (!ss || (v.dims.array() <= 0).any())
            throw std::runtime_error("malformed DimSize in " + path);
    }
    if (kv.count("ElementSpacing")) {
        std::istringstream ss(kv["ElementSpacing"]);
        ss >> v.spacing.x() >> v.spacing.y() >> v.spacing.z();
        if (!ss || (v.spacing.array() <= 0).any() || !v.spacing.allFinite())
            throw std::runtime_error("malformed ElementSpacing in " + path);
    }
    if (kv.count("Offset")) {
        std::istringstream ss(kv["Offset"]);
        ss >> v.origin.x() >> v.origin.y() >> v.origin.z();
        if (!ss)
            throw std::runtime_error("malformed Offset in " + path);
    }

    const std::string data_file = need("ElementDataFile");
    std::filesystem::path raw_path = std::filesystem::path(path).parent_path() / data_file;
    std::ifstream raw(raw_path, std::ios::binary);
    if (!raw)
        throw std::runtime_error("cannot open raw data file: " + raw_path.string());

    const Eigen::Index n = v.size();
    const std::string etype = need("ElementType");
    if (etype == "MET_UCHAR")
        read_raw<std::uint8_t>(raw, v.data, n);
    else if (etype == "MET_SHORT")
        read_raw<std::int16_t>(raw, v.data, n);
    else if (etype == "MET_USHORT")
        read_raw<std::uint16_t>(raw, v.data, n);
    else if (etype == "MET_FLOAT")
        read_raw<float>(raw, v.data, n);
    else if (etype == "MET_DOUBLE")
        read_raw<double>(raw, v.data, n);
    else
        throw std::runtime_error("unsupported ElementType " + etype + " in " + path);

    if (!v.data.allFinite())
        throw std::runtime_error("non-finite samples in " + path);
    return v;
}

void save_volume(const Volume& v, const std::string& path) {
    std::filesystem::path header_path(path);
    std::filesystem::path raw_path = header_path;
    raw_path.replace_extension(".raw");

    std::ofstream header(header_path);
    if (!header)
        throw std::runtime_error("cannot write volume header: " + path);
    header << "ObjectType = Image\n"
           << "NDims = 3\n"
           << "BinaryData = True\n"
           << "BinaryDataByteOrderMSB = False\n"
           << "DimSize = " << v.dims.x() << ' ' << v.dims.y() << ' ' << v.dims.z() << '\n';
    header.precision(17);
    header << "ElementSpacing = " << v.spacing.x() << ' ' << v.spacing.y() << ' ' << v.spacing.z() << '\n'
           << "Offset = " << v.origin.x() << ' ' << v.origin.y() << ' ' << v.origin.z() << '\n'
           << "ElementType = MET_FLOAT\n"
           << "ElementDataFile = " << raw_path.filename().string() << '\n';
    if (!header)
        throw std::runtime_error("I/O failure writing header: " + path);

    std::ofstream raw(raw_path, std::ios::binary);
    if (!raw)
        throw std::runtime_error("cannot write raw data file: " + raw_path.string());
    raw.write(reinterpret_cast<const char*>(v.data.data()),
              static_cast<std::streamsize>(v.size() * sizeof(float)));
    if (!raw)
        throw std::runtime_error("I/O failure writing raw data: " + raw_path.string());
}

float sample_world(const Volume& v, const Eigen::Vector3d& p) {
    const Eigen::Vector3d idx = (p - v.origin).cwiseQuotient(v.spacing);
    if ((idx.array() < 0.0).any() ||
        (idx.array() > (v.dims.cast<double>().array() - 1.0)).any())
        return 0.0f;

    const int x0 = std::min(static_cast<int>(idx.x()), v.dims.x() - 1);
    const int y0 = std::min(static_cast<int>(idx.y()), v.dims.y() - 1);
    const int z0 = std::min(static_cast<int>(idx.z()), v.dims.z() - 1);
    const int x1 = std::min(x0 + 1, v.dims.x() - 1);
    const int y1 = std::min(y0 + 1, v.dims.y() - 1);
    const int z1 = std::min(z0 + 1, v.dims.z() - 1);
    const double fx = idx.x() - x0;
    const double fy = idx.y() - y0;
    const double fz = idx.z() - z0;

    const double c00 = v.at(x0, y0, z0) * (1 - fx) + v.at(x1, y0, z0) * fx;
    const double c10 = v.at(x0, y1, z0) * (1 - fx) + v.at(x1, y1, z0) * fx;
    const double c01 = v.at(x0, y0, z1) * (1 - fx) + v.at(x1, y0, z1) * fx;
    const double c11 = v.at(x0, y1, z1) * (1 - fx) + v.at(x1, y1, z1) * fx;
    const double c0 = c00 * (1 - fy) + c10 * fy;
    const double c1 = c01 * (1 - fy) + c11 * fy;
    return static_cast<float>(c0 * (1 - fz) + c1 * fz);
}

Volume resample_to_grid(const Volume& v, const Eigen::Vector3i& dims,
                        const Eigen::Vector3d& spacing, const Eigen::Vector3d& origin) {
    Volume out(dims, spacing, origin);
    for (int z = 0; z < dims.z(); ++z)
        for (int y = 0; y < dims.y(); ++y)
            for (int x = 0; x < dims.x(); ++x)
                out.at(x, y, z) = sample_world(v, out.world(x, y, z));
    return out;
}

Volume resample_isotropic(const Volume& v, double target_spacing) {
    if (!(target_spacing > 0.0))
        throw std::invalid_argument("target spacing must be positive");
    Eigen::Vector3i dims;
    for (int a = 0; a < 3; ++a)
        dims[a] = static_cast<int>(std::ceil(v.dims[a] * v.spacing[a] / target_spacing));
    return resample_to_grid(v, dims, Eigen::Vector3d::Constant(target_spacing), v.origin);
}

Volume downsample(const Volume& v, int factor) {
    if (factor < 1)
        throw std::invalid_argument("down-sampling factor must be >= 1");
    if (factor == 1) return v;

    Eigen::Vector3i dims;
    for (int a = 0; a < 3; ++a)
        dims[a] = (v.dims[a] + factor - 1) / factor;
    Volume out(dims, v.spacing * factor, v.origin);
    for (int z = 0; z < dims.z(); ++z) {
        const int z0 = z * factor, z1 = std::min(z0 + factor, v.dims.z());
        for (int y = 0; y < dims.y(); ++y) {
            const int y0 = y * factor, y1 = std::min(y0 + factor, v.dims.y());
            for (int x = 0; x < dims.x(); ++x) {
                const int x0 = x * factor, x1 = std::min(x0 + factor, v.dims.x());
                double sum = 0.0;
                for (int zz = z0; zz < z1; ++zz)
                    for (int yy = y0; yy < y1; ++yy)
                        for (int xx = x0; xx < x1; ++xx)
                            sum += v.at(xx, yy, zz);
                const int n = (x1 - x0) * (y1 - y0) * (z1 - z0);
                out.at(x, y, z) = static_cast<float>(sum / n);
            }
        }
    }
    return out;
}

VectorField gradient(const Volume& v) {
    if ((v.dims.array() < 2).any())
        throw std::invalid_argument("gradient requires at least 2 voxels per axis");

    VectorField g;
    g.dims = v.dims;
    g.spacing = v.spacing;
    g.origin = v.origin;
    g.data.resize(3, v.size());

    auto diff = [&](int x, int y, int z, int axis) -> double {
        Eigen::Vector3i lo(x, y, z), hi(x, y, z);
        double denom = 2.0 * v.spacing[axis];
        if (lo[axis] == 0) {
            hi[axis] += 1;
            denom = v.spacing[axis];
        } else if (hi[axis] == v.dims[axis] - 1) {
            lo[axis] -= 1;
            denom = v.spacing[axis];
        } else {
            lo[axis] -= 1;
            hi[axis] += 1;
        }
        return (v.at(hi.x(), hi.y(), hi.z()) - v.at(lo.x(), lo.y(), lo.z())) / denom;
    };

    for (int z = 0; z < v.dims.z(); ++z)
        for (int y = 0; y < v.dims.y(); ++y)
            for (int x = 0; x < v.dims.x(); ++x) {
                const Eigen::Index i = v.index(x, y, z);
                for (int a = 0; a < 3; ++a)
                    g.data(a, i) = static_cast<float>(diff(x, y, z, a));
            }
    return g;
}

Volume translate(const Volume& v, const Eigen::Vector3d& shift_mm) {
    if (!shift_mm.allFinite())
        throw std::invalid_argument("shift must be finite");
    Volume out(v.dims, v.spacing, v.origin);
    for (int z = 0; z < v.dims.z(); ++z)
        for (int y = 0; y < v.dims.y(); ++y)
            for (int x = 0; x < v.dims.x(); ++x)
                out.at(x, y, z) = sample_world(v, out.world(x, y, z) - shift_mm);
    return out;
}

} // namespace fovmatch
