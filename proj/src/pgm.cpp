#include "rcpd/pgm.hpp"

#include <cctype>
#include <fstream>
#include <string>

#include "rcpd/errors.hpp"

namespace rcpd::pgm {

namespace {

struct HeaderReader {
    std::ifstream& is;
    std::size_t offset = 0;

    int get() {
        const int c = is.get();
        if (c != EOF) ++offset;
        return c;
    }

    // skips whitespace and '#'-to-end-of-line comments
    int next_token_char() {
        int c = get();
        while (c != EOF) {
            if (c == '#') {
                while (c != EOF && c != '\n') c = get();
            } else if (!std::isspace(c)) {
                return c;
            }
            c = get();
        }
        return EOF;
    }

    long read_int(const char* what) {
        int c = next_token_char();
        const std::size_t start = offset;
        if (c == EOF || !std::isdigit(c))
            throw parse_error(std::string("PGM: expected ") + what, start > 0 ? start - 1 : 0);
        long v = 0;
        while (c != EOF && std::isdigit(c)) {
            v = v * 10 + (c - '0');
            if (v > 1'000'000'000L) throw parse_error("PGM: value out of range", start - 1);
            c = get();
        }
        // c is the single whitespace terminating the token (or EOF)
        if (c != EOF && !std::isspace(c))
            throw parse_error(std::string("PGM: malformed ") + what, offset - 1);
        return v;
    }
};

} // namespace

Image read(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open for reading: " + path.string());

    HeaderReader hr{is};
    const int m0 = hr.get();
    const int m1 = hr.get();
    if (m0 != 'P' || m1 != '5') throw parse_error("PGM: not a binary P5 file", 0);

    Image img;
    img.cols = static_cast<int>(hr.read_int("width"));
    img.rows = static_cast<int>(hr.read_int("height"));
    img.maxval = static_cast<int>(hr.read_int("maxval"));
    if (img.cols < 1 || img.rows < 1) throw parse_error("PGM: empty image", hr.offset);
    if (img.maxval < 1 || img.maxval > 255)
        throw parse_error("PGM: maxval must be in [1, 255]", hr.offset);

    const std::size_t count =
        static_cast<std::size_t>(img.rows) * static_cast<std::size_t>(img.cols);
    img.pixels.resize(count);
    is.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(is.gcount()) != count)
        throw parse_error("PGM: truncated pixel data", hr.offset + static_cast<std::size_t>(is.gcount()));
    return img;
}

void write(const std::filesystem::path& path, const Image& img) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + path.string());
    os << "P5\n" << img.cols << " " << img.rows << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.pixels.data()),
             static_cast<std::streamsize>(img.pixels.size()));
    if (!os) throw io_error("write failed: " + path.string());
}

} // namespace rcpd::pgm
