#include "rcpd/video.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "rcpd/errors.hpp"
#include "rcpd/hq_admm.hpp"
#include "rcpd/kernels.hpp"
#include "rcpd/pgm.hpp"

namespace rcpd::video {

namespace fs = std::filesystem;

VideoTensor load_frames(const fs::path& directory) {
    if (!fs::is_directory(directory))
        throw io_error("not a directory: " + directory.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().extension() == ".pgm") files.push_back(entry.path());
    }
    if (files.empty()) throw io_error("no .pgm frames in " + directory.string());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

    const pgm::Image first = pgm::read(files.front());
    const auto l = files.size();
    const auto m = static_cast<std::size_t>(first.rows);
    const auto n = static_cast<std::size_t>(first.cols);

    VideoTensor video;
    video.data = DenseTensor({l, m, n});
    video.original_max = first.maxval;
    double* dst = video.data.data();

    for (std::size_t r = 0; r < l; ++r) {
        const pgm::Image img = (r == 0) ? first : pgm::read(files[r]);
        if (static_cast<std::size_t>(img.rows) != m || static_cast<std::size_t>(img.cols) != n)
            throw io_error("frame size mismatch in " + files[r].string());
        const double scale = 1.0 / img.maxval;
        double* frame = dst + r * m * n;
        for (std::size_t p = 0; p < m * n; ++p) frame[p] = img.pixels[p] * scale;
    }
    return video;
}

FbResult extract(const VideoTensor& video, int R, const ExtractOptions& opts) {
    const auto m = video.height();
    const auto n = video.width();
    if (R < 1) throw std::invalid_argument("extract: rank must be >= 1");
    if (static_cast<std::size_t>(R) > std::min(m, n))
        throw std::invalid_argument("extract: rank exceeds min(height, width)");

    const DenseTensor* A = &video.data;
    DenseTensor scaled;
    double back_scale = 1.0;
    if (opts.unit_frobenius) {
        const double nrm = kernels::frob_norm(video.data);
        if (nrm == 0.0) throw std::invalid_argument("extract: zero video tensor");
        scaled = video.data;
        double* p = scaled.data();
        for (std::size_t i = 0; i < scaled.size(); ++i) p[i] /= nrm;
        A = &scaled;
        back_scale = nrm;
    }

    const auto res = hq_admm::solve(*A, R, /*t=*/2, opts.config);

    FbResult out;
    // the frame mode carries unit columns; folding sigma into it gives D
    out.D = back_scale * res.model.factors[0] * res.model.sigma.asDiagonal();
    out.U = res.model.factors[1];
    out.V = res.model.factors[2];
    out.iterations = res.iterations;
    out.converged = res.converged;
    out.final_fit = res.final_fit;
    return out;
}

SyntheticVideo gen_synthetic_video(int l, int m, int n, int bg_rank, int block_h, int block_w,
                                   double contrast, const MotionPath& path, Rng& rng) {
    if (l < 1 || m < 1 || n < 1) throw std::invalid_argument("gen_synthetic_video: empty video");
    if (bg_rank < 1 || bg_rank > std::min(m, n))
        throw std::invalid_argument("gen_synthetic_video: bg_rank out of range");
    if (block_h > m || block_w > n)
        throw std::invalid_argument("gen_synthetic_video: block exceeds frame bounds");
    if (block_h < 0 || block_w < 0)
        throw std::invalid_argument("gen_synthetic_video: negative block size");
    if (contrast < 0.0 || contrast > 1.0)
        throw std::invalid_argument("gen_synthetic_video: contrast must be in [0, 1]");

    Eigen::MatrixXd bg = Eigen::MatrixXd::Zero(m, n);
    for (int q = 0; q < bg_rank; ++q) {
        Eigen::VectorXd a(m), b(n);
        for (int r = 0; r < m; ++r) a(r) = rng.uniform01();
        for (int c = 0; c < n; ++c) b(c) = rng.uniform01();
        bg += a * b.transpose();
    }
    const double peak = bg.maxCoeff();
    if (peak > 0.0) bg *= (1.0 - contrast) / peak; // keep bg + contrast within [0, 1]

    SyntheticVideo out;
    out.background = bg;
    out.video.data = DenseTensor({static_cast<std::size_t>(l), static_cast<std::size_t>(m),
                                  static_cast<std::size_t>(n)});
    out.fg_mask.assign(out.video.data.size(), 0);
    out.video.original_max = 255.0;

    double* dst = out.video.data.data();
    const std::size_t frame_sz = static_cast<std::size_t>(m) * static_cast<std::size_t>(n);
    for (int r = 0; r < l; ++r) {
        double* frame = dst + static_cast<std::size_t>(r) * frame_sz;
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < n; ++k) frame[i * n + k] = bg(i, k);
        if (block_h == 0 || block_w == 0 || contrast == 0.0) continue;
        const int pr = (path.row0 + r * path.row_step) % (m - block_h + 1);
        const int pc = (path.col0 + r * path.col_step) % (n - block_w + 1);
        for (int i = pr; i < pr + block_h; ++i)
            for (int k = pc; k < pc + block_w; ++k) {
                frame[i * n + k] += contrast;
                out.fg_mask[static_cast<std::size_t>(r) * frame_sz +
                            static_cast<std::size_t>(i * n + k)] = 1;
            }
    }
    return out;
}

namespace {

std::uint8_t quantize(double v) {
    const double c = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

} // namespace

void export_frames(const FbResult& result, const VideoTensor& video, const fs::path& directory,
                   const ExportOptions& opts) {
    const auto l = static_cast<int>(video.frames());
    const auto m = static_cast<int>(video.height());
    const auto n = static_cast<int>(video.width());
    fs::create_directories(directory / "background");
    fs::create_directories(directory / "foreground");

    const double* src = video.data.data();
    const std::size_t frame_sz = static_cast<std::size_t>(m) * static_cast<std::size_t>(n);
    auto foreground = [&](int r, const Eigen::MatrixXd& B, int i, int k) {
        return src[static_cast<std::size_t>(r) * frame_sz + static_cast<std::size_t>(i * n + k)] -
               B(i, k);
    };

    // per-video foreground max for the AbsMax rendering (extra pass instead of
    // buffering every frame)
    double fg_scale = 1.0;
    if (opts.fg_render == ForegroundRender::AbsMax) {
        double fg_max = 0.0;
        for (int r = 0; r < l; ++r) {
            const Eigen::MatrixXd B = result.background_frame(r);
            for (int i = 0; i < m; ++i)
                for (int k = 0; k < n; ++k)
                    fg_max = std::max(fg_max, std::abs(foreground(r, B, i, k)));
        }
        if (fg_max > 0.0) fg_scale = 1.0 / fg_max;
    }

    pgm::Image img;
    img.rows = m;
    img.cols = n;
    img.pixels.resize(frame_sz);
    char name[32];
    for (int r = 0; r < l; ++r) {
        const Eigen::MatrixXd B = result.background_frame(r);
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < n; ++k)
                img.pixels[static_cast<std::size_t>(i * n + k)] = quantize(B(i, k));
        std::snprintf(name, sizeof(name), "frame_%05d.pgm", r);
        pgm::write(directory / "background" / name, img);

        for (int i = 0; i < m; ++i)
            for (int k = 0; k < n; ++k) {
                const double f = foreground(r, B, i, k);
                const double v = opts.fg_render == ForegroundRender::AbsMax
                                     ? std::abs(f) * fg_scale
                                     : 0.5 * (f + 1.0);
                img.pixels[static_cast<std::size_t>(i * n + k)] = quantize(v);
            }
        pgm::write(directory / "foreground" / name, img);
    }
}

double compression_ratio(std::size_t l, std::size_t m, std::size_t n, int R) {
    return static_cast<double>(R) * static_cast<double>(l + m + n) /
           (static_cast<double>(l) * static_cast<double>(m) * static_cast<double>(n));
}

std::string format_compression_ratio(std::size_t l, std::size_t m, std::size_t n, int R) {
    const double pct = 100.0 * compression_ratio(l, m, n, R);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", pct);
    std::string s(buf);
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    return s + "%";
}

} // namespace rcpd::video
