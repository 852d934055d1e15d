#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace rcpd::pgm {

/// 8-bit grayscale image, row-major from the top-left corner.
struct Image {
    int rows = 0;
    int cols = 0;
    int maxval = 255;
    std::vector<std::uint8_t> pixels;
};

/// Binary PGM (P5) reader. Handles '#' comments in the header; maxval must be
/// in [1, 255]. Throws parse_error on malformed content, io_error otherwise.
Image read(const std::filesystem::path& path);

/// Writes binary PGM (P5) with maxval 255.
void write(const std::filesystem::path& path, const Image& img);

} // namespace rcpd::pgm
