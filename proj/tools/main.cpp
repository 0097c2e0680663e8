#include "fovmatch/aggregate.hpp"
#include "fovmatch/evaluation.hpp"
#include "fovmatch/phantom.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace fovmatch;

namespace {

struct PMOptions {
    PMParams params;
    int patch_edge = 9;

    void attach(CLI::App* cmd) {
        cmd->add_option("--downsample", params.downsample_factor,
                        "Down-sampling factor applied after isotropic resampling")
            ->capture_default_str();
        cmd->add_option("--patch-size", patch_edge, "Cubic patch edge in voxels (odd)")
            ->capture_default_str();
        cmd->add_option("--iterations", params.iterations, "PatchMatch sweeps per realization")
            ->capture_default_str();
        cmd->add_option("--alpha", params.alpha, "Random-search decay ratio in (0,1)")
            ->capture_default_str();
        cmd->add_option("--realizations", params.realizations,
                        "Independent PatchMatch realizations")
            ->capture_default_str();
        cmd->add_option("--seed", params.seed, "RNG seed")->capture_default_str();
        cmd->add_option("--metric", metric_name, "Patch metric: ea or l2")
            ->check(CLI::IsMember({"ea", "l2"}))
            ->capture_default_str();
        cmd->add_option("--hist-lo", params.hist_lo_mm, "Histogram lower bound (mm)")
            ->capture_default_str();
        cmd->add_option("--hist-hi", params.hist_hi_mm, "Histogram upper bound (mm)")
            ->capture_default_str();
        cmd->add_option("--bins", params.bins, "Histogram bin count")->capture_default_str();
        cmd->add_option("--spacing", params.target_spacing_mm,
                        "Common isotropic grid spacing (mm)")
            ->capture_default_str();
        cmd->add_option("--threads", params.threads,
                        "Worker threads for realizations (0 = all cores)")
            ->capture_default_str();
        cmd->add_flag("--pooled-histogram", params.pooled_histogram,
                      "Histogram all realizations pooled instead of the median field");
    }

    PMParams resolve() const {
        PMParams p = params;
        if (patch_edge < 1 || patch_edge % 2 == 0)
            throw CLI::ValidationError("--patch-size", "patch edge must be odd and positive");
        p.patch.radius = patch_edge / 2;
        p.metric = metric_name == "l2" ? MetricKind::L2 : MetricKind::EA;
        p.validate();
        return p;
    }

    std::string metric_name = "ea";
};

void write_report(const fs::path& path, const GlobalShift& g, const PMParams& p,
                  const std::string& metric_name, double runtime_seconds,
                  const EvalReport* eval) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write report: " + path.string());
    f.precision(10);
    f << "shift_x_mm: " << g.shift_mm.x() << '\n'
      << "shift_y_mm: " << g.shift_mm.y() << '\n'
      << "shift_z_mm: " << g.shift_mm.z() << '\n'
      << "mode_count_x: " << g.per_axis_mode_count.x() << '\n'
      << "mode_count_y: " << g.per_axis_mode_count.y() << '\n'
      << "mode_count_z: " << g.per_axis_mode_count.z() << '\n'
      << "runtime_seconds: " << runtime_seconds << '\n'
      << "downsample_factor: " << p.downsample_factor << '\n'
      << "patch_edge: " << p.patch.edge() << '\n'
      << "iterations: " << p.iterations << '\n'
      << "alpha: " << p.alpha << '\n'
      << "realizations: " << p.realizations << '\n'
      << "seed: " << p.seed << '\n'
      << "metric: " << metric_name << '\n'
      << "hist_lo_mm: " << p.hist_lo_mm << '\n'
      << "hist_hi_mm: " << p.hist_hi_mm << '\n'
      << "bins: " << p.bins << '\n'
      << "target_spacing_mm: " << p.target_spacing_mm << '\n'
      << "threads: " << p.threads << '\n'
      << "pooled_histogram: " << (p.pooled_histogram ? 1 : 0) << '\n';
    if (eval) {
        f << "dsc_before: " << eval->dsc_before << '\n'
          << "dsc_after: " << eval->dsc_after << '\n';
        if (eval->has_truth)
            f << "shift_error_x_mm: " << eval->shift_error_mm.x() << '\n'
              << "shift_error_y_mm: " << eval->shift_error_mm.y() << '\n'
              << "shift_error_z_mm: " << eval->shift_error_mm.z() << '\n';
    }
    if (!f) throw std::runtime_error("I/O failure writing report: " + path.string());
}

void write_histograms(const fs::path& path, const GlobalShift& g) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write histogram CSV: " + path.string());
    f << "axis,bin_center_mm,count\n";
    const char* axes = "xyz";
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < g.histograms[a].bins(); ++b)
            f << axes[a] << ',' << g.histograms[a].center(b) << ','
              << g.histograms[a].counts[b] << '\n';
    if (!f) throw std::runtime_error("I/O failure writing histogram CSV: " + path.string());
}

void write_truth(const fs::path& path, const Eigen::Vector3d& truth) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write truth file: " + path.string());
    f.precision(10);
    f << "truth_x_mm: " << truth.x() << '\n'
      << "truth_y_mm: " << truth.y() << '\n'
      << "truth_z_mm: " << truth.z() << '\n';
}

int cmd_register(const PMOptions& pm, const std::string& fixed_path,
                 const std::string& moving_path, const std::string& mask_path,
                 const std::string& out_dir, bool write_shifted) {
    const PMParams params = pm.resolve();
    const Volume fixed = load_volume(fixed_path);
    const Volume moving = load_volume(moving_path);
    const BinaryMask mask = threshold_mask(load_volume(mask_path), 0.5f);
    if (mask.count() == 0)
        throw std::runtime_error("mask has no voxels above 0.5: " + mask_path);

    const auto t0 = std::chrono::steady_clock::now();
    const GlobalShift g = estimate_global_shift(fixed, moving, mask, params);
    const double runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    fs::create_directories(out_dir);
    write_report(fs::path(out_dir) / "report.txt", g, params, pm.metric_name, runtime, nullptr);
    write_histograms(fs::path(out_dir) / "histograms.csv", g);
    if (write_shifted)
        save_volume(translate(moving, -g.shift_mm),
                    (fs::path(out_dir) / "moving_shifted.mhd").string());

    std::cout << "shift_mm: " << g.shift_mm.transpose() << "  runtime_s: " << runtime << '\n';
    return 0;
}

int cmd_phantom(PhantomSpec spec, const std::string& out_dir) {
    const PhantomPair p = generate(spec);
    fs::create_directories(out_dir);
    save_volume(p.fixed_image, (fs::path(out_dir) / "fixed.mhd").string());
    save_volume(p.moving, (fs::path(out_dir) / "moving.mhd").string());
    save_volume(mask_to_volume(p.mask), (fs::path(out_dir) / "mask.mhd").string());
    write_truth(fs::path(out_dir) / "truth.txt", p.truth_mm);
    save_phantom_spec(spec, (fs::path(out_dir) / "spec.cfg").string());
    std::cout << "phantom written to " << out_dir << '\n';
    return 0;
}

int cmd_dice(const std::string& a_path, const std::string& b_path) {
    const BinaryMask a = threshold_mask(load_volume(a_path), 0.5f);
    const BinaryMask b = threshold_mask(load_volume(b_path), 0.5f);
    std::cout << dice(a, b) << '\n';
    return 0;
}

struct BenchCell {
    std::string sweep;
    double value = 0.0;
    int case_index = 0;
    Eigen::Vector3d truth, est, err;
    double dsc_before = 0.0, dsc_after = 0.0, runtime_seconds = 0.0;
};

int cmd_bench(const PMOptions& pm, const std::string& sweep, int cases,
              const std::string& out_csv, std::uint64_t phantom_seed, int grid) {
    const PMParams base = pm.resolve();

    std::vector<double> values;
    if (sweep == "downsample")
        values = {2, 4, 8};
    else if (sweep == "patch")
        values = {3, 5, 7, 9, 11};
    else if (sweep == "bins")
        values = {10, 30, 50, 70, 90};
    else if (sweep == "mask")
        values = {-3, -2, -1, 0, 1, 2, 3};  // <0: erosions, >0: dilations, 5^3 kernel
    else
        throw std::runtime_error("unknown sweep: " + sweep +
                                 " (expected downsample|patch|bins|mask)");

    std::vector<BenchCell> rows;
    for (int c = 0; c < cases; ++c) {
        PhantomSpec spec = make_textured_spec(phantom_seed + static_cast<std::uint64_t>(c));
        const double scale = grid / 192.0;
        spec.dims = Eigen::Vector3i::Constant(grid);
        spec.organ_center_mm *= scale;
        spec.organ_radii_mm *= scale;
        for (auto& s : spec.spheres) s.center_mm *= scale, s.radius_mm *= scale;
        for (auto& t : spec.tubes) t.a_mm *= scale, t.b_mm *= scale, t.radius_mm *= scale;
        spec.transfer = Transfer::AffineGainBias;
        spec.gain = 1.4;
        spec.bias = 0.1;
        spec.noise_sigma = 0.02;
        RngStream rng(phantom_seed, 1000 + static_cast<std::uint64_t>(c));
        const double max_shift = 0.3 * grid * scale;
        for (int a = 0; a < 3; ++a)
            spec.truth_shift_mm[a] = std::floor(max_shift * rng.uniform_symmetric());
        const PhantomPair p = generate(spec);
        const BinaryMask moving_mask = translate_mask(p.mask, p.truth_mm);

        for (double v : values) {
            PMParams params = base;
            BinaryMask mask = p.mask;
            if (sweep == "downsample")
                params.downsample_factor = static_cast<int>(v);
            else if (sweep == "patch")
                params.patch.radius = static_cast<int>(v) / 2;
            else if (sweep == "bins")
                params.bins = static_cast<int>(v);
            else if (sweep == "mask") {
                const int n = static_cast<int>(v);
                for (int i = 0; i < std::abs(n); ++i)
                    mask = n < 0 ? erode(mask, 5) : dilate(mask, 5);
            }

            const auto t0 = std::chrono::steady_clock::now();
            const GlobalShift g = estimate_global_shift(p.fixed_image, p.moving, mask, params);
            const double runtime =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

            BenchCell cell;
            cell.sweep = sweep;
            cell.value = v;
            cell.case_index = c;
            cell.truth = p.truth_mm;
            cell.est = g.shift_mm;
            cell.err = shift_error(g, p.truth_mm);
            cell.dsc_before = dice(p.mask, moving_mask);
            cell.dsc_after = dice(p.mask, translate_mask(moving_mask, -g.shift_mm));
            cell.runtime_seconds = runtime;
            rows.push_back(cell);
            std::cout << sweep << '=' << v << " case=" << c
                      << " err=" << cell.err.transpose() << " dsc_after=" << cell.dsc_after
                      << " t=" << runtime << "s\n";
        }
    }

    if (!out_csv.empty()) {
        fs::create_directories(fs::path(out_csv).parent_path().empty()
                                   ? "."
                                   : fs::path(out_csv).parent_path().string());
        std::ofstream f(out_csv);
        if (!f) throw std::runtime_error("cannot write bench CSV: " + out_csv);
        f << "sweep,value,case,truth_x_mm,truth_y_mm,truth_z_mm,est_x_mm,est_y_mm,est_z_mm,"
             "err_x_mm,err_y_mm,err_z_mm,dsc_before,dsc_after,runtime_seconds\n";
        f.precision(10);
        for (const auto& r : rows)
            f << r.sweep << ',' << r.value << ',' << r.case_index << ',' << r.truth.x() << ','
              << r.truth.y() << ',' << r.truth.z() << ',' << r.est.x() << ',' << r.est.y() << ','
              << r.est.z() << ',' << r.err.x() << ',' << r.err.y() << ',' << r.err.z() << ','
              << r.dsc_before << ',' << r.dsc_after << ',' << r.runtime_seconds << '\n';
        if (!f) throw std::runtime_error("I/O failure writing bench CSV: " + out_csv);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Global 3D translation estimation between multi-modal volumes "
                 "via patch correspondences"};
    app.require_subcommand(1);

    // register
    auto* reg = app.add_subcommand("register", "Estimate the shift aligning two volumes");
    reg->set_config("--config");
    std::string fixed_path, moving_path, mask_path, out_dir = ".";
    bool write_shifted = false;
    reg->add_option("--fixed", fixed_path, "Fixed (reference) volume, MetaImage")->required();
    reg->add_option("--moving", moving_path, "Moving volume, MetaImage")->required();
    reg->add_option("--mask", mask_path, "Organ mask on the fixed grid, MetaImage")->required();
    reg->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
    reg->add_flag("--write-shifted", write_shifted,
                  "Also write the moving volume translated by the recovered shift");
    PMOptions reg_pm;
    reg_pm.attach(reg);

    // phantom
    auto* pha = app.add_subcommand("phantom", "Generate a synthetic multi-modal pair");
    pha->set_config("--config");
    std::string spec_path, pha_out = "phantom_out", transfer = "identity";
    std::uint64_t pha_seed = 0;
    int pha_grid = 192, needles = 0;
    std::vector<double> truth{0, 0, 0};
    double gain = 1.0, bias = 0.0, gamma = 1.0, noise = 0.0, cylinder = 0.0;
    pha->add_option("--spec", spec_path, "Phantom spec file (overrides other flags)");
    pha->add_option("--out-dir", pha_out, "Output directory")->capture_default_str();
    pha->add_option("--seed", pha_seed, "Phantom seed")->capture_default_str();
    pha->add_option("--grid", pha_grid, "Cubic grid edge, voxels")->capture_default_str();
    pha->add_option("--truth", truth, "Ground-truth shift (mm, 3 values)")->expected(3);
    pha->add_option("--transfer", transfer, "identity|affine_gain_bias|inverted|gamma")
        ->capture_default_str();
    pha->add_option("--gain", gain)->capture_default_str();
    pha->add_option("--bias", bias)->capture_default_str();
    pha->add_option("--gamma", gamma)->capture_default_str();
    pha->add_option("--noise-sigma", noise, "Additive Gaussian noise sigma")
        ->capture_default_str();
    pha->add_option("--cylinder-radius", cylinder, "Circular FOV radius (mm, 0 = off)")
        ->capture_default_str();
    pha->add_option("--needles", needles, "Streak artifact generators")->capture_default_str();

    // dice
    auto* dic = app.add_subcommand("dice", "Dice coefficient of two mask files");
    std::string a_path, b_path;
    dic->add_option("--a", a_path, "First mask, MetaImage")->required();
    dic->add_option("--b", b_path, "Second mask, MetaImage")->required();

    // bench
    auto* ben = app.add_subcommand("bench", "Calibration sweep over a phantom family");
    ben->set_config("--config");
    std::string sweep = "downsample", bench_csv = "bench.csv";
    int cases = 3, bench_grid = 192;
    std::uint64_t bench_seed = 1;
    ben->add_option("--sweep", sweep, "downsample|patch|bins|mask")->capture_default_str();
    ben->add_option("--cases", cases, "Phantom cases per sweep value")->capture_default_str();
    ben->add_option("--out", bench_csv, "Results CSV path")->capture_default_str();
    ben->add_option("--phantom-seed", bench_seed)->capture_default_str();
    ben->add_option("--grid", bench_grid, "Phantom grid edge, voxels")->capture_default_str();
    PMOptions ben_pm;
    ben_pm.attach(ben);

    CLI11_PARSE(app, argc, argv);

    try {
        if (reg->parsed())
            return cmd_register(reg_pm, fixed_path, moving_path, mask_path, out_dir,
                                write_shifted);
        if (pha->parsed()) {
            PhantomSpec spec;
            if (!spec_path.empty()) {
                spec = load_phantom_spec(spec_path);
            } else {
                spec = make_textured_spec(pha_seed);
                const double scale = pha_grid / 192.0;
                spec.dims = Eigen::Vector3i::Constant(pha_grid);
                spec.organ_center_mm *= scale;
                spec.organ_radii_mm *= scale;
                for (auto& s : spec.spheres) s.center_mm *= scale, s.radius_mm *= scale;
                for (auto& t : spec.tubes) t.a_mm *= scale, t.b_mm *= scale, t.radius_mm *= scale;
                spec.truth_shift_mm = Eigen::Vector3d(truth[0], truth[1], truth[2]);
                spec.transfer = transfer_from_name(transfer);
                spec.gain = gain;
                spec.bias = bias;
                spec.gamma = gamma;
                spec.noise_sigma = noise;
                spec.cylinder_radius_mm = cylinder;
                spec.needles = needles;
            }
            return cmd_phantom(spec, pha_out);
        }
        if (dic->parsed()) return cmd_dice(a_path, b_path);
        if (ben->parsed())
            return cmd_bench(ben_pm, sweep, cases, bench_csv, bench_seed, bench_grid);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
