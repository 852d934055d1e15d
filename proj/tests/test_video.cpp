#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "rcpd/errors.hpp"
#include "rcpd/kernels.hpp"
#include "rcpd/pgm.hpp"
#include "rcpd/stiefel.hpp"
#include "rcpd/video.hpp"

using namespace rcpd;
namespace fs = std::filesystem;
namespace k = rcpd::kernels;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

TEST_CASE("load_frames: ordering, normalization, hand-computed bytes") {
    const fs::path dir = fresh_dir("rcpd_video_load");
    // three 2x2 frames; filename order defines frame order
    const std::uint8_t frames[3][4] = {{0, 255, 255, 0}, {255, 0, 0, 255}, {128, 0, 0, 128}};
    for (int r = 0; r < 3; ++r) {
        pgm::Image img;
        img.rows = 2;
        img.cols = 2;
        img.pixels.assign(frames[r], frames[r] + 4);
        char name[16];
        std::snprintf(name, sizeof(name), "f%02d.pgm", r);
        pgm::write(dir / name, img);
    }
    const video::VideoTensor v = video::load_frames(dir);
    CHECK(v.frames() == 3);
    CHECK(v.height() == 2);
    CHECK(v.width() == 2);
    CHECK(v.data.at({0, 0, 0}) == 0.0);
    CHECK(v.data.at({0, 0, 1}) == 1.0);
    CHECK(v.data.at({1, 0, 0}) == 1.0);
    CHECK(v.data.at({2, 0, 0}) == doctest::Approx(128.0 / 255.0).epsilon(1e-14));
    CHECK(v.original_max == 255.0);

    // an all-black frame loads as zeros
    const fs::path dark = fresh_dir("rcpd_video_dark");
    pgm::Image black;
    black.rows = 2;
    black.cols = 3;
    black.pixels.assign(6, 0);
    pgm::write(dark / "only.pgm", black);
    const video::VideoTensor bv = video::load_frames(dark);
    for (std::size_t i = 0; i < bv.data.size(); ++i) CHECK(bv.data[i] == 0.0);
}

TEST_CASE("load_frames: error paths") {
    const fs::path dir = fresh_dir("rcpd_video_err");
    CHECK_THROWS_AS((void)video::load_frames(dir / "missing"), io_error);
    CHECK_THROWS_AS((void)video::load_frames(dir), io_error); // empty

    pgm::Image a;
    a.rows = 2;
    a.cols = 2;
    a.pixels.assign(4, 10);
    pgm::write(dir / "a.pgm", a);
    pgm::Image b;
    b.rows = 3;
    b.cols = 2;
    b.pixels.assign(6, 10);
    pgm::write(dir / "b.pgm", b);
    CHECK_THROWS_AS((void)video::load_frames(dir), io_error); // mixed sizes
}

TEST_CASE("gen_synthetic_video: construction invariants") {
    Rng rng(90);
    const video::MotionPath path;
    const auto sv = video::gen_synthetic_video(12, 16, 20, 3, 4, 4, 0.8, path, rng);
    CHECK(sv.video.frames() == 12);

    // mask cardinality = block area x frames
    std::size_t on = 0;
    for (auto m : sv.fg_mask) on += m;
    CHECK(on == 12u * 16u);

    // tensor - background equals contrast on the mask, zero elsewhere
    const double* p = sv.video.data.data();
    for (std::size_t r = 0; r < 12; ++r)
        for (std::size_t i = 0; i < 16; ++i)
            for (std::size_t j = 0; j < 20; ++j) {
                const std::size_t flat = (r * 16 + i) * 20 + j;
                const double fg = p[flat] - sv.background(static_cast<Eigen::Index>(i),
                                                          static_cast<Eigen::Index>(j));
                if (sv.fg_mask[flat])
                    CHECK(fg == doctest::Approx(0.8).epsilon(1e-14));
                else
                    CHECK(fg == 0.0);
                CHECK(p[flat] >= 0.0);
                CHECK(p[flat] <= 1.0 + 1e-12);
            }

    // zero contrast means pure background and an empty mask
    Rng rng2(91);
    const auto flat_sv = video::gen_synthetic_video(5, 8, 8, 2, 3, 3, 0.0, path, rng2);
    for (auto m : flat_sv.fg_mask) CHECK(m == 0);

    Rng rng3(92);
    CHECK_THROWS_AS((void)video::gen_synthetic_video(5, 8, 8, 2, 9, 3, 0.5, path, rng3),
                    std::invalid_argument);
}

TEST_CASE("extract: a static low-rank video has an exactly zero foreground") {
    Rng rng(93);
    // rank-2 image replicated over 6 identical frames
    Eigen::MatrixXd img = Eigen::MatrixXd::Zero(10, 12);
    for (int q = 0; q < 2; ++q) {
        Eigen::VectorXd a(10), b(12);
        for (int i = 0; i < 10; ++i) a(i) = rng.uniform01();
        for (int j = 0; j < 12; ++j) b(j) = rng.uniform01();
        img += a * b.transpose();
    }
    img /= img.maxCoeff() * 2.0;

    video::VideoTensor v;
    v.data = DenseTensor({6, 10, 12});
    for (std::size_t r = 0; r < 6; ++r)
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 12; ++j)
                v.data.at({r, static_cast<std::size_t>(i), static_cast<std::size_t>(j)}) =
                    img(i, j);

    video::ExtractOptions opts;
    opts.config.seed = 17;
    opts.config.tol = 1e-9;
    opts.config.max_iter = 500;
    const auto fb = video::extract(v, 3, opts);

    CHECK((fb.U.transpose() * fb.U - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <
          1e-10);
    CHECK((fb.V.transpose() * fb.V - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <
          1e-10);

    double max_fg = 0.0;
    for (int r = 0; r < 6; ++r) {
        const Eigen::MatrixXd B = fb.background_frame(r);
        for (int i = 0; i < 10; ++i)
            for (int j = 0; j < 12; ++j)
                max_fg = std::max(
                    max_fg,
                    std::abs(v.data.at({static_cast<std::size_t>(r), static_cast<std::size_t>(i),
                                        static_cast<std::size_t>(j)}) -
                             B(i, j)));
    }
    CHECK(max_fg < 1e-6);

    CHECK_THROWS_AS((void)video::extract(v, 11, opts), std::invalid_argument);

    // unit-Frobenius normalization: the solve runs on A/||A|| but D comes
    // back in pixel units, so the background still matches the frames
    video::ExtractOptions fopts = opts;
    fopts.unit_frobenius = true;
    const auto ffb = video::extract(v, 3, fopts);
    double fmax = 0.0;
    const Eigen::MatrixXd B0 = ffb.background_frame(0);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 12; ++j)
            fmax = std::max(fmax, std::abs(img(i, j) - B0(i, j)));
    CHECK(fmax < 1e-4);
}

TEST_CASE("export_frames: round trip within quantization, zero foreground is black") {
    // build a split whose background reproduces the video exactly, so the
    // foreground is identically zero
    Rng rng(94);
    video::FbResult fb;
    fb.U = stiefel::random_orthonormal(8, 2, rng);
    fb.V = stiefel::random_orthonormal(10, 2, rng);
    fb.D = Eigen::MatrixXd(4, 2);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 2; ++c) fb.D(r, c) = rng.uniform01();

    video::VideoTensor vt;
    vt.data = DenseTensor({4, 8, 10});
    for (int r = 0; r < 4; ++r) {
        const Eigen::MatrixXd B = fb.background_frame(r);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 10; ++j)
                vt.data.at({static_cast<std::size_t>(r), static_cast<std::size_t>(i),
                            static_cast<std::size_t>(j)}) = B(i, j);
    }

    const fs::path dir = fresh_dir("rcpd_video_export");
    video::export_frames(fb, vt, dir);

    int frames = 0;
    for (const auto& e : fs::directory_iterator(dir / "background")) {
        const pgm::Image img = pgm::read(e.path());
        CHECK(img.rows == 8);
        CHECK(img.cols == 10);
        ++frames;
    }
    CHECK(frames == 4);
    frames = 0;
    for (const auto& e : fs::directory_iterator(dir / "foreground")) {
        (void)e;
        ++frames;
    }
    CHECK(frames == 4);

    // backgrounds reproduce B_r within one 8-bit step
    const pgm::Image bg0 = pgm::read(dir / "background" / "frame_00000.pgm");
    const Eigen::MatrixXd B0 = fb.background_frame(0);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 10; ++j) {
            const double clamped = std::clamp(B0(i, j), 0.0, 1.0);
            const double quantized = bg0.pixels[static_cast<std::size_t>(i * 10 + j)] / 255.0;
            CHECK(std::abs(clamped - quantized) <= 0.5 / 255.0 + 1e-12);
        }

    // identically zero foreground renders all-black
    const pgm::Image fg0 = pgm::read(dir / "foreground" / "frame_00000.pgm");
    for (auto px : fg0.pixels) CHECK(px == 0);
}

TEST_CASE("compression ratio formula and formatting") {
    CHECK(video::compression_ratio(1000, 144, 176, 30) ==
          doctest::Approx(30.0 * 1320.0 / 25344000.0).epsilon(1e-15));
    CHECK(video::format_compression_ratio(1000, 144, 176, 10) == "0.05%");
    CHECK(video::format_compression_ratio(1000, 144, 176, 20) == "0.1%");
    CHECK(video::format_compression_ratio(1000, 144, 176, 30) == "0.16%");
    CHECK(video::format_compression_ratio(1000, 144, 176, 40) == "0.21%");
    CHECK(video::format_compression_ratio(1000, 144, 176, 50) == "0.26%");
}
