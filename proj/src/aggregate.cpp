#include "fovmatch/aggregate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace fovmatch {

ShiftField median_field(const std::vector<ShiftField>& realizations) {
    if (realizations.empty())
        throw std::invalid_argument("median_field: no realizations");
    const Eigen::Vector3i dims = realizations.front().dims;
    for (const auto& r : realizations)
        if (r.dims != dims)
            throw std::invalid_argument("median_field: realization grid mismatch");

    ShiftField out;
    out.dims = dims;
    out.shifts.resize(realizations.front().size());
    out.scores.assign(realizations.front().size(), 0.0);

    const std::size_t n = out.shifts.size();
    const std::size_t k = realizations.size();
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best_j = 0;
        double best_sum = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) {
            const Eigen::Vector3i& cand = realizations[j].shifts[i];
            double sum = 0.0;
            for (std::size_t l = 0; l < k; ++l)
                sum += (cand - realizations[l].shifts[i]).cast<double>().norm();
            if (sum < best_sum) {
                best_sum = sum;
                best_j = j;
            }
        }
        out.shifts[i] = realizations[best_j].shifts[i];
    }
    return out;
}

namespace {

int bin_of(double value_mm, double lo, double width, int bins) {
    const int b = static_cast<int>(std::floor((value_mm - lo) / width));
    return std::clamp(b, 0, bins - 1);
}

} // namespace

void accumulate_histogram(std::array<ShiftHistogram, 3>& hists, const ShiftField& field,
                          const BinaryMask& mask, const Eigen::Vector3d& working_spacing_mm) {
    if (mask.dims != field.dims)
        throw std::invalid_argument("shift_histogram: mask grid mismatch");
    for (int z = 0; z < field.dims.z(); ++z)
        for (int y = 0; y < field.dims.y(); ++y)
            for (int x = 0; x < field.dims.x(); ++x) {
                if (!mask.at(x, y, z)) continue;
                const Eigen::Vector3i& v = field.shifts[field.index(x, y, z)];
                for (int a = 0; a < 3; ++a) {
                    auto& h = hists[a];
                    const double mm = v[a] * working_spacing_mm[a];
                    ++h.counts[bin_of(mm, h.lo_mm, h.bin_width(), h.bins())];
                }
            }
}

std::array<ShiftHistogram, 3> shift_histogram(const ShiftField& field,
                                              const BinaryMask& mask,
                                              const Eigen::Vector3d& working_spacing_mm,
                                              double lo_mm, double hi_mm, int bins) {
    if (mask.count() == 0)
        throw std::invalid_argument("shift_histogram: empty mask");
    std::array<ShiftHistogram, 3> hists;
    for (int a = 0; a < 3; ++a) {
        hists[a].axis = a;
        hists[a].lo_mm = lo_mm;
        hists[a].hi_mm = hi_mm;
        hists[a].counts.assign(static_cast<std::size_t>(bins), 0);
    }
    accumulate_histogram(hists, field, mask, working_spacing_mm);
    return hists;
}

GlobalShift mode_shift(const std::array<ShiftHistogram, 3>& histograms) {
    GlobalShift out;
    out.histograms = histograms;
    for (int a = 0; a < 3; ++a) {
        const auto& h = histograms[a];
        if (h.counts.empty() ||
            std::all_of(h.counts.begin(), h.counts.end(), [](long c) { return c == 0; }))
            throw std::invalid_argument("mode_shift: empty histogram");
        int best = 0;
        for (int b = 1; b < h.bins(); ++b) {
            if (h.counts[b] > h.counts[best]) {
                best = b;
            } else if (h.counts[b] == h.counts[best]) {
                const double cb = std::abs(h.center(b)), cbest = std::abs(h.center(best));
                if (cb < cbest || (cb == cbest && h.center(b) < h.center(best)))
                    best = b;
            }
        }
        out.shift_mm[a] = h.center(best);
        out.per_axis_mode_count[a] = h.counts[best];
    }
    return out;
}

GlobalShift estimate_global_shift(const Volume& I, const Volume& J,
                                  const BinaryMask& M, const PMParams& params) {
    params.validate();

    // Common grid: the fixed image's extent at the target isotropic spacing.
    const double t = params.target_spacing_mm;
    Eigen::Vector3i dims1;
    for (int a = 0; a < 3; ++a)
        dims1[a] = static_cast<int>(std::ceil(I.dims[a] * I.spacing[a] / t));
    const Eigen::Vector3d sp1 = Eigen::Vector3d::Constant(t);

    Volume I1 = resample_to_grid(I, dims1, sp1, I.origin);
    Volume J1 = resample_to_grid(J, dims1, sp1, I.origin);
    BinaryMask M1 = resample_mask_to_grid(M, dims1, sp1, I.origin);

    Volume Iw = downsample(I1, params.downsample_factor);
    Volume Jw = downsample(J1, params.downsample_factor);
    BinaryMask Mw = downsample_mask(M1, params.downsample_factor);
    if (Mw.count() == 0)
        throw std::runtime_error("mask is empty on the working grid");

    const SearchBox box = search_box(Mw, support(Jw));

    VectorField grad_i, grad_j;
    Eigen::VectorXf norm_i, norm_j;
    MetricContext ctx;
    ctx.I = &Iw;
    ctx.J = &Jw;
    ctx.kind = params.metric;
    ctx.patch = params.patch;
    if (params.metric == MetricKind::EA) {
        grad_i = gradient(Iw);
        grad_j = gradient(Jw);
        ctx.grad_i = &grad_i;
        ctx.grad_j = &grad_j;
        norm_i = gradient_norms(grad_i);
        norm_j = gradient_norms(grad_j);
        ctx.norm_i = &norm_i;
        ctx.norm_j = &norm_j;
    }

    std::vector<ShiftField> fields(static_cast<std::size_t>(params.realizations));
    unsigned n_threads = params.threads > 0 ? static_cast<unsigned>(params.threads)
                                            : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(params.realizations));
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (unsigned tdx = 0; tdx < n_threads; ++tdx)
        pool.emplace_back([&]() {
            for (int j = next.fetch_add(1); j < params.realizations; j = next.fetch_add(1))
                fields[static_cast<std::size_t>(j)] = run_realization(ctx, box, params, j);
        });
    for (auto& th : pool) th.join();

    const Eigen::Vector3d wsp = Jw.spacing;
    if (params.pooled_histogram) {
        std::array<ShiftHistogram, 3> hists;
        for (int a = 0; a < 3; ++a) {
            hists[a].axis = a;
            hists[a].lo_mm = params.hist_lo_mm;
            hists[a].hi_mm = params.hist_hi_mm;
            hists[a].counts.assign(static_cast<std::size_t>(params.bins), 0);
        }
        for (const auto& f : fields)
            accumulate_histogram(hists, f, Mw, wsp);
        return mode_shift(hists);
    }

    const ShiftField median = median_field(fields);
    return mode_shift(shift_histogram(median, Mw, wsp, params.hist_lo_mm,
                                      params.hist_hi_mm, params.bins));
}

} // namespace fovmatch
