#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rcpd/rng.hpp"
#include "rcpd/solver_types.hpp"
#include "rcpd/tensor.hpp"

namespace rcpd::video {

enum class Normalization { MaxVal, UnitFrobenius };

/// Frame stack as an order-3 tensor (frames x height x width), entries in
/// [0, 1] after dividing by the PGM maxval. The scale record allows mapping
/// back to pixel units.
struct VideoTensor {
    DenseTensor data; // dims (l, m, n)
    double original_max = 255.0;
    Normalization normalization = Normalization::MaxVal;

    std::size_t frames() const { return data.dim(0); }
    std::size_t height() const { return data.dim(1); }
    std::size_t width() const { return data.dim(2); }
};

/// Loads every *.pgm file in the directory, frames ordered by filename.
VideoTensor load_frames(const std::filesystem::path& directory);

/// Background/foreground split: per-frame background B_r = U diag(D row r) V^T
/// with U, V orthonormal; the foreground is F_r = A_r - B_r. D absorbs both
/// the per-frame diagonal weights and the CP weight vector.
struct FbResult {
    Eigen::MatrixXd D; // l x R
    Eigen::MatrixXd U; // m x R, orthonormal columns
    Eigen::MatrixXd V; // n x R, orthonormal columns
    int iterations = 0;
    bool converged = false;
    double final_fit = 0.0;

    Eigen::MatrixXd background_frame(int r) const {
        return U * D.row(r).asDiagonal() * V.transpose();
    }
    int rank() const { return static_cast<int>(D.cols()); }
};

struct ExtractOptions {
    SolverConfig config;
    bool unit_frobenius = false; // solve on A/||A||_F and scale D back
};

/// Robust rank-R split of the video tensor: an order-3 decomposition with the
/// frame mode unconstrained in scale (weights absorbed into D) and the two
/// spatial modes orthonormal. Requires R <= min(height, width).
FbResult extract(const VideoTensor& video, int R, const ExtractOptions& opts);

struct MotionPath {
    int row_step = 1;
    int col_step = 2;
    int row0 = 0;
    int col0 = 0;
};

struct SyntheticVideo {
    VideoTensor video;
    std::vector<std::uint8_t> fg_mask; // l*m*n, 1 on foreground pixels
    Eigen::MatrixXd background;        // m x n, shared by all frames
};

/// Synthetic surveillance clip: a fixed nonnegative rank-`bg_rank` background
/// image (scaled to max 1 - contrast) plus an 8-bit-friendly bright block of
/// the given size translating along `path` (wrapping at the frame edge),
/// brighter than the background by exactly `contrast`.
SyntheticVideo gen_synthetic_video(int l, int m, int n, int bg_rank, int block_h, int block_w,
                                   double contrast, const MotionPath& path, Rng& rng);

enum class ForegroundRender {
    AbsMax,       // |F| rescaled by the per-video max
    SignedOffset, // (F + 1) / 2, clamped
};

struct ExportOptions {
    ForegroundRender fg_render = ForegroundRender::AbsMax;
};

/// Writes background/<frame>.pgm (clamped to [0,1], scaled to 8 bits) and
/// foreground/<frame>.pgm for every frame.
void export_frames(const FbResult& result, const VideoTensor& video,
                   const std::filesystem::path& directory, const ExportOptions& opts = {});

/// Storage of (D, U, V) relative to the raw background frames:
/// R (l + m + n) / (l m n).
double compression_ratio(std::size_t l, std::size_t m, std::size_t n, int R);

/// Percentage with two decimals, trailing zeros stripped (0.16%, 0.1%, ...).
std::string format_compression_ratio(std::size_t l, std::size_t m, std::size_t n, int R);

} // namespace rcpd::video
