#include "fovmatch/patchmatch.hpp"

#include <cmath>
#include <stdexcept>

namespace fovmatch {

void PMParams::validate() const {
    if (downsample_factor < 1)
        throw std::invalid_argument("down-sampling factor must be >= 1");
    if (patch.radius < 0)
        throw std::invalid_argument("patch radius must be >= 0");
    if (iterations < 1)
        throw std::invalid_argument("iterations must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0, 1)");
    if (realizations < 1)
        throw std::invalid_argument("realizations must be >= 1");
    if (bins < 1)
        throw std::invalid_argument("bins must be >= 1");
    if (!(hist_lo_mm < hist_hi_mm))
        throw std::invalid_argument("histogram lower bound must be below upper bound");
    if (!(target_spacing_mm > 0.0))
        throw std::invalid_argument("target spacing must be positive");
}

Eigen::VectorXf gradient_norms(const VectorField& g) {
    Eigen::VectorXf norms(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i)
        norms[i] = g.data.col(i).norm();
    return norms;
}

namespace {

// ea_distance with the sqrt per voxel served from the norm caches; the
// accumulation order matches ea_distance exactly.
double ea_distance_cached(const VectorField& gI, const VectorField& gJ,
                          const Eigen::VectorXf& ni, const Eigen::VectorXf& nj,
                          const Eigen::Vector3i& center, const Eigen::Vector3i& shift,
                          const PatchSpec& p) {
    Eigen::Vector3i lo, hi;
    for (int a = 0; a < 3; ++a) {
        lo[a] = std::max({center[a] - p.radius, 0, -shift[a]});
        hi[a] = std::min({center[a] + p.radius, gI.dims[a] - 1, gJ.dims[a] - 1 - shift[a]});
        if (lo[a] > hi[a]) return 0.0;
    }
    double num = 0.0, den = 0.0;
    for (int z = lo.z(); z <= hi.z(); ++z)
        for (int y = lo.y(); y <= hi.y(); ++y) {
            Eigen::Index ii = gI.index(lo.x(), y, z);
            Eigen::Index ij = gJ.index(lo.x() + shift.x(), y + shift.y(), z + shift.z());
            for (int x = lo.x(); x <= hi.x(); ++x, ++ii, ++ij) {
                num += std::abs(static_cast<double>(gI.data.col(ii).dot(gJ.data.col(ij))));
                den += static_cast<double>(ni[ii]) * static_cast<double>(nj[ij]);
            }
        }
    if (den == 0.0) return 0.0;
    return -num / den;
}

} // namespace

double MetricContext::evaluate(const Eigen::Vector3i& center,
                               const Eigen::Vector3i& shift) const {
    if (kind == MetricKind::EA) {
        if (norm_i && norm_j)
            return ea_distance_cached(*grad_i, *grad_j, *norm_i, *norm_j, center, shift, patch);
        return ea_distance(*grad_i, *grad_j, center, shift, patch);
    }
    return l2_distance(*I, *J, center, shift, patch);
}

ShiftField init_field(const MetricContext& ctx, const SearchBox& box, RngStream& rng) {
    if (box.empty())
        throw std::invalid_argument("init_field: empty search box");

    ShiftField field;
    field.dims = ctx.dims();
    field.shifts.resize(field.size());
    field.scores.resize(field.size());

    for (int z = 0; z < field.dims.z(); ++z)
        for (int y = 0; y < field.dims.y(); ++y)
            for (int x = 0; x < field.dims.x(); ++x) {
                const Eigen::Vector3i r(x, y, z);
                Eigen::Vector3i q;
                for (int a = 0; a < 3; ++a)
                    q[a] = static_cast<int>(rng.uniform_int(box.lo[a], box.hi[a]));
                const std::size_t i = field.index(x, y, z);
                field.shifts[i] = q - r;
                field.scores[i] = ctx.evaluate(r, field.shifts[i]);
            }
    return field;
}

void sweep(ShiftField& field, const MetricContext& ctx, const SearchBox& box,
           double alpha, RngStream& rng) {
    const Eigen::Vector3i dims = field.dims;
    const double w = static_cast<double>(dims.maxCoeff());

    for (int z = 0; z < dims.z(); ++z)
        for (int y = 0; y < dims.y(); ++y)
            for (int x = 0; x < dims.x(); ++x) {
                const Eigen::Vector3i r(x, y, z);
                const std::size_t i = field.index(x, y, z);
                Eigen::Vector3i best = field.shifts[i];
                double best_score = field.scores[i];

                auto consider = [&](const Eigen::Vector3i& cand) {
                    if (!box.contains(r + cand)) return;
                    const double s = ctx.evaluate(r, cand);
                    if (s < best_score) {  // ties keep the incumbent
                        best_score = s;
                        best = cand;
                    }
                };

                // propagation from the three already-visited 6-neighbors
                if (x > 0) consider(field.shifts[field.index(x - 1, y, z)]);
                if (y > 0) consider(field.shifts[field.index(x, y - 1, z)]);
                if (z > 0) consider(field.shifts[field.index(x, y, z - 1)]);

                // random search at exponentially decaying radii
                for (double radius = w; radius >= 1.0; radius *= alpha) {
                    Eigen::Vector3i cand;
                    for (int a = 0; a < 3; ++a)
                        cand[a] = best[a] +
                                  static_cast<int>(std::lround(radius * rng.uniform_symmetric()));
                    if (cand == best) continue;
                    consider(cand);
                }

                field.shifts[i] = best;
                field.scores[i] = best_score;
            }
}

ShiftField run_realization(const MetricContext& ctx, const SearchBox& box,
                           const PMParams& params, int realization_index) {
    RngStream rng(params.seed, static_cast<std::uint64_t>(realization_index));
    ShiftField field = init_field(ctx, box, rng);
    for (int it = 0; it < params.iterations; ++it)
        sweep(field, ctx, box, params.alpha, rng);
    return field;
}

} // namespace fovmatch
