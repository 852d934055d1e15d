// rcpd: robust orthogonal CP decomposition toolkit.
//
// Subcommands: synth, decompose, bench, video, video-gen. Every run writes a
// manifest.txt into its output directory before any results, so a run can be
// reproduced from its outputs alone.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "rcpd/als.hpp"
#include "rcpd/errors.hpp"
#include "rcpd/hq_admm.hpp"
#include "rcpd/kernels.hpp"
#include "rcpd/pgm.hpp"
#include "rcpd/rng.hpp"
#include "rcpd/synth.hpp"
#include "rcpd/tensor_io.hpp"
#include "rcpd/video.hpp"

namespace fs = std::filesystem;
using namespace rcpd;

namespace {

// stable exit code contract (0 = success/converged)
constexpr int kExitNotConverged = 2;
constexpr int kExitParseError = 3;
constexpr int kExitIoError = 4;
constexpr int kExitNumericalError = 5;

using Manifest = std::vector<std::pair<std::string, std::string>>;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_manifest(const fs::path& dir, const std::string& subcommand, const Manifest& fields) {
    fs::create_directories(dir);
    std::ofstream os(dir / "manifest.txt");
    if (!os) throw io_error("cannot write manifest in " + dir.string());
    os << "subcommand=" << subcommand << "\n";
    for (const auto& [key, value] : fields) os << key << "=" << value << "\n";
    os.flush();
    if (!os) throw io_error("manifest write failed in " + dir.string());
}

struct SolverFlags {
    SolverConfig config;
    void attach(CLI::App* cmd) {
        cmd->add_option("--tau", config.tau, "penalty weight on the slack constraint");
        cmd->add_option("--alpha", config.alpha, "proximal weight in the factor updates");
        cmd->add_option("--delta", config.delta, "Cauchy loss scale");
        cmd->add_option("--tol", config.tol, "stop when the fit change drops below this");
        cmd->add_option("--max-iter", config.max_iter, "iteration cap");
        cmd->add_flag("--warn-theory", config.warn_tau_below_theory,
                      "warn when tau is below sqrt(10)");
    }
    Manifest manifest() const {
        return {{"tau", fmt(config.tau)},   {"alpha", fmt(config.alpha)},
                {"delta", fmt(config.delta)}, {"tol", fmt(config.tol)},
                {"max_iter", std::to_string(config.max_iter)}};
    }
};

struct NoiseFlags {
    std::string kind = "cauchy";
    double beta = -1.0; // resolved per kind when unset
    double scale = 0.05;
    double density = 0.1;
    double low = 1.0;
    double high = 10.0;

    void attach(CLI::App* cmd, bool allow_none) {
        auto kinds = allow_none
                         ? std::vector<std::string>{"none", "cauchy", "outliers", "gaussian"}
                         : std::vector<std::string>{"cauchy", "outliers", "gaussian"};
        cmd->add_option("--noise", kind, "noise model")
            ->check(CLI::IsMember(kinds))
            ->capture_default_str();
        cmd->add_option("--beta", beta, "mixing weight (default 0.5 cauchy, 0.1 gaussian)");
        cmd->add_option("--scale", scale, "Cauchy noise scale")->capture_default_str();
        cmd->add_option("--density", density, "outlier density")->capture_default_str();
        cmd->add_option("--low", low, "outlier magnitude lower bound")->capture_default_str();
        cmd->add_option("--high", high, "outlier magnitude upper bound")->capture_default_str();
    }

    bool none() const { return kind == "none"; }

    synth::NoiseSpec spec() const {
        if (kind == "cauchy") return synth::CauchyNoise{scale, beta < 0 ? 0.5 : beta};
        if (kind == "outliers") return synth::OutlierNoise{density, low, high};
        if (kind == "gaussian" || kind == "none")
            return synth::GaussianNoise{none() ? 0.0 : (beta < 0 ? 0.1 : beta)};
        throw CLI::ValidationError("--noise", "unknown noise kind");
    }
};

int run_synth(int n, int d, int t, int R, const NoiseFlags& noise, std::uint64_t seed,
              const fs::path& out_dir) {
    Manifest m = {{"n", std::to_string(n)},   {"d", std::to_string(d)},
                  {"t", std::to_string(t)},   {"rank", std::to_string(R)},
                  {"noise", noise.none() ? "none" : synth::noise_label(noise.spec())},
                  {"seed", std::to_string(seed)}};
    write_manifest(out_dir, "synth", m);

    Rng rng(seed);
    auto [truth, A0] = synth::gen_ground_truth(n, d, t, R, rng);
    const DenseTensor A = synth::add_noise(A0, noise.spec(), rng);
    write_tensor_file(out_dir / "A.rcpd", A);
    write_tensor_file(out_dir / "A0.rcpd", A0);
    std::cout << "wrote " << (out_dir / "A.rcpd").string() << " (observed) and "
              << (out_dir / "A0.rcpd").string() << " (ground truth)\n";
    return 0;
}

int run_decompose(const fs::path& input, int R, int t, const std::string& solver,
                  SolverFlags& flags, std::uint64_t seed, const fs::path& out_dir,
                  const fs::path& truth_path, bool diagnostics) {
    flags.config.seed = seed;
    flags.config.diagnostics = diagnostics;

    Manifest m = flags.manifest();
    m.insert(m.begin(), {{"input", input.string()},
                         {"rank", std::to_string(R)},
                         {"t", std::to_string(t)},
                         {"solver", solver},
                         {"seed", std::to_string(seed)}});
    if (!truth_path.empty()) m.emplace_back("truth", truth_path.string());
    write_manifest(out_dir, "decompose", m);

    const DenseTensor A = read_tensor_file(input);
    SolveResult res;
    if (solver == "als") {
        res = als::solve(A, R, t, flags.config.max_iter, flags.config.tol, seed);
    } else {
        res = hq_admm::solve(A, R, t, flags.config);
    }

    write_matrix_file(out_dir / "sigma.rcpd", res.model.sigma);
    for (int j = 0; j < res.model.order(); ++j)
        write_matrix_file(out_dir / ("factor_" + std::to_string(j) + ".rcpd"),
                          res.model.factors[static_cast<std::size_t>(j)]);
    {
        std::ofstream os(out_dir / "trace.csv");
        write_trace_csv(os, res.trace);
    }

    const DenseTensor& reference = truth_path.empty() ? A : read_tensor_file(truth_path);
    const double err = synth::err_metric(reference, res.model);
    std::cout << "converged=" << (res.converged ? "true" : "false") << "\n"
              << "iterations=" << res.iterations << "\n"
              << "fit=" << fmt(res.final_fit) << "\n"
              << "err=" << fmt(err) << (truth_path.empty() ? " (vs input)" : " (vs truth)")
              << "\n";
    return res.converged ? 0 : kExitNotConverged;
}

int run_bench(const std::vector<int>& ns, int d, int t, int R, const NoiseFlags& noise,
              int instances, std::uint64_t seed, const std::vector<std::string>& solver_names,
              SolverFlags& flags, int jobs, const fs::path& out_dir) {
    Manifest m = flags.manifest();
    std::string n_list;
    for (int n : ns) n_list += (n_list.empty() ? "" : ",") + std::to_string(n);
    m.insert(m.begin(),
             {{"n", n_list},
              {"d", std::to_string(d)},
              {"t", std::to_string(t)},
              {"rank", std::to_string(R)},
              {"noise", synth::noise_label(noise.spec())},
              {"instances", std::to_string(instances)},
              {"seed", std::to_string(seed)},
              {"jobs", std::to_string(jobs)}});
    write_manifest(out_dir, "bench", m);

    std::vector<synth::BenchCase> cases;
    for (std::size_t ci = 0; ci < ns.size(); ++ci) {
        synth::BenchCase cs;
        cs.n = ns[ci];
        cs.d = d;
        cs.t = t;
        cs.R = R;
        cs.noise = noise.spec();
        cs.instances = instances;
        cs.seed = derive_seed(seed, ci);
        cases.push_back(cs);
    }
    std::vector<synth::SolverTag> solvers;
    for (const auto& s : solver_names)
        solvers.push_back(s == "als" ? synth::SolverTag::Als : synth::SolverTag::HqAdmm);

    const auto results = synth::run_bench(cases, solvers, flags.config, jobs);
    {
        std::ofstream os(out_dir / "results.csv");
        if (!os) throw io_error("cannot write results.csv in " + out_dir.string());
        synth::write_bench_csv(os, results);
    }

    std::printf("%4s %3s %3s %3s  %-8s %12s %12s %10s %10s\n", "n", "d", "t", "R", "solver",
                "err_median", "err_mean", "iter_mean", "time_s");
    for (const auto& r : results) {
        std::printf("%4d %3d %3d %3d  %-8s %12.4e %12.4e %10.1f %10.3f\n", r.bench_case.n,
                    r.bench_case.d, r.bench_case.t, r.bench_case.R,
                    synth::solver_label(r.solver).c_str(), r.err_median, r.err_mean, r.iter_mean,
                    r.time_mean_s);
        if (r.failures > 0)
            std::fprintf(stderr, "warning: %d instance(s) failed for %s\n", r.failures,
                         synth::solver_label(r.solver).c_str());
    }
    std::cout << "wrote " << (out_dir / "results.csv").string() << "\n";
    return 0;
}

int run_video(const fs::path& frames_dir, int R, SolverFlags& flags, std::uint64_t seed,
              const fs::path& out_dir, const std::string& fg_render,
              const std::string& normalize, bool diagnostics, bool dump_tensor) {
    flags.config.seed = seed;
    flags.config.diagnostics = diagnostics;

    Manifest m = flags.manifest();
    m.insert(m.begin(), {{"frames", frames_dir.string()},
                         {"rank", std::to_string(R)},
                         {"seed", std::to_string(seed)},
                         {"fg_render", fg_render},
                         {"normalize", normalize}});
    write_manifest(out_dir, "video", m);

    const video::VideoTensor v = video::load_frames(frames_dir);
    if (dump_tensor) write_tensor_file(out_dir / "tensor.rcpd", v.data);
    video::ExtractOptions opts;
    opts.config = flags.config;
    opts.unit_frobenius = normalize == "frobenius";
    const auto fb = video::extract(v, R, opts);

    write_matrix_file(out_dir / "D.rcpd", fb.D);
    write_matrix_file(out_dir / "U.rcpd", fb.U);
    write_matrix_file(out_dir / "V.rcpd", fb.V);
    video::ExportOptions ex;
    ex.fg_render = fg_render == "offset" ? video::ForegroundRender::SignedOffset
                                         : video::ForegroundRender::AbsMax;
    video::export_frames(fb, v, out_dir, ex);

    std::cout << "frames=" << v.frames() << " size=" << v.height() << "x" << v.width() << "\n"
              << "converged=" << (fb.converged ? "true" : "false") << "\n"
              << "iterations=" << fb.iterations << "\n"
              << "fit=" << fmt(fb.final_fit) << "\n"
              << "compression_ratio="
              << video::format_compression_ratio(v.frames(), v.height(), v.width(), R) << "\n";
    return fb.converged ? 0 : kExitNotConverged;
}

int run_video_gen(int l, int mh, int mw, int bg_rank, int bh, int bw, double contrast,
                  int row_step, int col_step, std::uint64_t seed, const fs::path& out_dir,
                  const fs::path& mask_dir) {
    Manifest m = {{"l", std::to_string(l)},
                  {"height", std::to_string(mh)},
                  {"width", std::to_string(mw)},
                  {"bg_rank", std::to_string(bg_rank)},
                  {"block_h", std::to_string(bh)},
                  {"block_w", std::to_string(bw)},
                  {"contrast", fmt(contrast)},
                  {"row_step", std::to_string(row_step)},
                  {"col_step", std::to_string(col_step)},
                  {"seed", std::to_string(seed)}};
    write_manifest(out_dir, "video-gen", m);

    Rng rng(seed);
    video::MotionPath path;
    path.row_step = row_step;
    path.col_step = col_step;
    const auto sv = video::gen_synthetic_video(l, mh, mw, bg_rank, bh, bw, contrast, path, rng);

    pgm::Image img;
    img.rows = mh;
    img.cols = mw;
    img.pixels.resize(static_cast<std::size_t>(mh) * static_cast<std::size_t>(mw));
    const double* src = sv.video.data.data();
    char name[32];
    for (int r = 0; r < l; ++r) {
        const double* frame = src + static_cast<std::size_t>(r) * img.pixels.size();
        for (std::size_t p = 0; p < img.pixels.size(); ++p)
            img.pixels[p] = static_cast<std::uint8_t>(
                std::lround(std::clamp(frame[p], 0.0, 1.0) * 255.0));
        std::snprintf(name, sizeof(name), "frame_%05d.pgm", r);
        pgm::write(out_dir / name, img);
        if (!mask_dir.empty()) {
            fs::create_directories(mask_dir);
            const std::uint8_t* mrow = sv.fg_mask.data() + static_cast<std::size_t>(r) * img.pixels.size();
            for (std::size_t p = 0; p < img.pixels.size(); ++p)
                img.pixels[p] = mrow[p] ? 255 : 0;
            pgm::write(mask_dir / name, img);
        }
    }
    std::cout << "wrote " << l << " frames to " << out_dir.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"robust orthogonal tensor CP approximation toolkit"};
    app.require_subcommand(1);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a noisy synthetic tensor");
    int s_n = 20, s_d = 3, s_t = 1, s_R = 5;
    std::uint64_t s_seed = 0;
    fs::path s_out;
    NoiseFlags s_noise;
    synth_cmd->add_option("--n", s_n, "mode size")->capture_default_str();
    synth_cmd->add_option("--d", s_d, "tensor order")->capture_default_str();
    synth_cmd->add_option("--orth,-t", s_t, "trailing orthonormal modes")->capture_default_str();
    synth_cmd->add_option("--rank,-R", s_R, "CP rank")->capture_default_str();
    synth_cmd->add_option("--seed", s_seed, "master seed")->capture_default_str();
    synth_cmd->add_option("--out-dir", s_out, "output directory")->required();
    s_noise.attach(synth_cmd, /*allow_none=*/true);

    // decompose
    auto* dec_cmd = app.add_subcommand("decompose", "decompose an RCPD1 tensor file");
    fs::path d_input, d_out, d_truth;
    int d_R = 5, d_t = 1;
    std::string d_solver = "hq-admm";
    std::uint64_t d_seed = 0;
    bool d_diag = true;
    SolverFlags d_flags;
    dec_cmd->add_option("--input,-i", d_input, "input tensor (RCPD1)")->required();
    dec_cmd->add_option("--rank,-R", d_R, "CP rank")->capture_default_str();
    dec_cmd->add_option("--orth,-t", d_t, "trailing orthonormal modes")->capture_default_str();
    dec_cmd->add_option("--solver", d_solver, "solver")
        ->check(CLI::IsMember({"hq-admm", "als"}))
        ->capture_default_str();
    dec_cmd->add_option("--seed", d_seed, "initialization seed")->capture_default_str();
    dec_cmd->add_option("--out-dir", d_out, "output directory")->required();
    dec_cmd->add_option("--truth", d_truth, "ground-truth tensor for the error metric");
    dec_cmd->add_flag("--diagnostics,!--no-diagnostics", d_diag,
                      "record Lagrangian/KKT trace columns");
    d_flags.attach(dec_cmd);

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "synthetic noise benchmark grid");
    std::vector<int> b_ns;
    int b_d = 3, b_t = 1, b_R = 5, b_instances = 20, b_jobs = 1;
    std::uint64_t b_seed = 0;
    fs::path b_out;
    std::vector<std::string> b_solvers = {"hq-admm", "als"};
    NoiseFlags b_noise;
    SolverFlags b_flags;
    bench_cmd->add_option("--n", b_ns, "mode sizes (repeatable); empty grid allowed");
    bench_cmd->add_option("--d", b_d, "tensor order")->capture_default_str();
    bench_cmd->add_option("--orth,-t", b_t, "trailing orthonormal modes")->capture_default_str();
    bench_cmd->add_option("--rank,-R", b_R, "CP rank")->capture_default_str();
    bench_cmd->add_option("--instances", b_instances, "instances per case")
        ->capture_default_str();
    bench_cmd->add_option("--seed", b_seed, "master seed")->capture_default_str();
    bench_cmd->add_option("--jobs", b_jobs, "parallel instances")->capture_default_str();
    bench_cmd->add_option("--solver", b_solvers, "solvers to run (repeatable)")
        ->check(CLI::IsMember({"hq-admm", "als"}));
    bench_cmd->add_option("--out-dir", b_out, "output directory")->required();
    b_noise.attach(bench_cmd, /*allow_none=*/false);
    b_flags.attach(bench_cmd);

    // video
    auto* vid_cmd = app.add_subcommand("video", "foreground/background extraction from frames");
    fs::path v_frames, v_out;
    int v_R = 30;
    std::uint64_t v_seed = 0;
    std::string v_fg = "abs", v_norm = "maxval";
    bool v_diag = false, v_dump = false;
    SolverFlags v_flags;
    vid_cmd->add_option("--frames", v_frames, "directory of PGM frames")->required();
    vid_cmd->add_option("--rank,-R", v_R, "background rank")->capture_default_str();
    vid_cmd->add_option("--seed", v_seed, "initialization seed")->capture_default_str();
    vid_cmd->add_option("--out-dir", v_out, "output directory")->required();
    vid_cmd->add_option("--fg-render", v_fg, "foreground rendering")
        ->check(CLI::IsMember({"abs", "offset"}))
        ->capture_default_str();
    vid_cmd->add_option("--normalize", v_norm, "input normalization")
        ->check(CLI::IsMember({"maxval", "frobenius"}))
        ->capture_default_str();
    vid_cmd->add_flag("--diagnostics", v_diag, "record Lagrangian/KKT trace columns");
    vid_cmd->add_flag("--dump-tensor", v_dump, "also write the stacked frames as tensor.rcpd");
    v_flags.attach(vid_cmd);

    // video-gen
    auto* gen_cmd = app.add_subcommand("video-gen", "generate a synthetic surveillance clip");
    int g_l = 100, g_h = 48, g_w = 64, g_bg = 3, g_bh = 8, g_bw = 8, g_rs = 1, g_cs = 2;
    double g_contrast = 0.8;
    std::uint64_t g_seed = 0;
    fs::path g_out, g_mask;
    gen_cmd->add_option("--frames,-l", g_l, "frame count")->capture_default_str();
    gen_cmd->add_option("--height", g_h, "frame height")->capture_default_str();
    gen_cmd->add_option("--width", g_w, "frame width")->capture_default_str();
    gen_cmd->add_option("--bg-rank", g_bg, "background rank")->capture_default_str();
    gen_cmd->add_option("--block-h", g_bh, "block height")->capture_default_str();
    gen_cmd->add_option("--block-w", g_bw, "block width")->capture_default_str();
    gen_cmd->add_option("--contrast", g_contrast, "block brightness over background")
        ->capture_default_str();
    gen_cmd->add_option("--row-step", g_rs, "block rows per frame")->capture_default_str();
    gen_cmd->add_option("--col-step", g_cs, "block cols per frame")->capture_default_str();
    gen_cmd->add_option("--seed", g_seed, "seed")->capture_default_str();
    gen_cmd->add_option("--out-dir", g_out, "output directory")->required();
    gen_cmd->add_option("--mask-dir", g_mask, "also write foreground masks here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth_cmd->parsed())
            return run_synth(s_n, s_d, s_t, s_R, s_noise, s_seed, s_out);
        if (dec_cmd->parsed())
            return run_decompose(d_input, d_R, d_t, d_solver, d_flags, d_seed, d_out, d_truth,
                                 d_diag);
        if (bench_cmd->parsed())
            return run_bench(b_ns, b_d, b_t, b_R, b_noise, b_instances, b_seed, b_solvers,
                             b_flags, b_jobs, b_out);
        if (vid_cmd->parsed())
            return run_video(v_frames, v_R, v_flags, v_seed, v_out, v_fg, v_norm, v_diag,
                             v_dump);
        if (gen_cmd->parsed())
            return run_video_gen(g_l, g_h, g_w, g_bg, g_bh, g_bw, g_contrast, g_rs, g_cs, g_seed,
                                 g_out, g_mask);
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParseError;
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const numerical_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
