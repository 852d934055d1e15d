#include "rcpd/tensor_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <vector>

#include "rcpd/errors.hpp"

namespace rcpd {

namespace {

constexpr char kMagic[4] = {'R', 'C', 'P', 'D'};
constexpr std::uint8_t kVersion = 0x01;

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

struct Reader {
    std::istream& is;
    std::size_t offset = 0;

    void read(void* dst, std::size_t n, const char* what) {
        is.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(is.gcount()) != n)
            throw parse_error(std::string("RCPD1: truncated file while reading ") + what, offset);
        offset += n;
    }

    std::uint32_t u32(const char* what) {
        unsigned char b[4];
        read(b, 4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return v;
    }

    std::uint64_t u64(const char* what) {
        unsigned char b[8];
        read(b, 8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }
};

} // namespace

void write_tensor(std::ostream& os, const DenseTensor& t) {
    os.write(kMagic, 4);
    os.put(static_cast<char>(kVersion));
    put_u32(os, static_cast<std::uint32_t>(t.order()));
    for (int j = 0; j < t.order(); ++j) put_u64(os, t.dim(j));
    static_assert(std::endian::native == std::endian::little,
                  "RCPD1 writer assumes a little-endian host");
    os.write(reinterpret_cast<const char*>(t.data()),
             static_cast<std::streamsize>(t.size() * sizeof(double)));
    if (!os) throw io_error("RCPD1: write failed");
}

DenseTensor read_tensor(std::istream& is) {
    Reader r{is};
    char magic[4];
    r.read(magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0) throw parse_error("RCPD1: bad magic bytes", 0);
    unsigned char version;
    r.read(&version, 1, "version");
    if (version != kVersion)
        throw parse_error("RCPD1: unsupported version " + std::to_string(version), 4);

    const std::size_t order_off = r.offset;
    const std::uint32_t d = r.u32("order");
    if (d < 2 || d > 64) throw parse_error("RCPD1: order must be in [2, 64]", order_off);

    std::vector<std::size_t> dims(d);
    std::size_t count = 1;
    for (std::uint32_t j = 0; j < d; ++j) {
        const std::size_t dim_off = r.offset;
        const std::uint64_t n = r.u64("dimension");
        if (n == 0) throw parse_error("RCPD1: zero dimension", dim_off);
        if (count > std::numeric_limits<std::size_t>::max() / n)
            throw parse_error("RCPD1: dims product overflows", dim_off);
        count *= n;
        dims[j] = static_cast<std::size_t>(n);
    }

    std::vector<double> data(count);
    static_assert(std::endian::native == std::endian::little,
                  "RCPD1 reader assumes a little-endian host");
    r.read(data.data(), count * sizeof(double), "values");

    // Trailing garbage is a malformed file, not a benign extension.
    char extra;
    is.read(&extra, 1);
    if (is.gcount() == 1) throw parse_error("RCPD1: trailing bytes after values", r.offset);

    return DenseTensor(std::move(dims), std::move(data));
}

void write_tensor_file(const std::filesystem::path& path, const DenseTensor& t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + path.string());
    write_tensor(os, t);
    os.flush();
    if (!os) throw io_error("write failed: " + path.string());
}

DenseTensor read_tensor_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open for reading: " + path.string());
    return read_tensor(is);
}

void write_matrix_file(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    DenseTensor t({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            t.at({static_cast<std::size_t>(r), static_cast<std::size_t>(c)}) = m(r, c);
    write_tensor_file(path, t);
}

Eigen::MatrixXd read_matrix_file(const std::filesystem::path& path) {
    const DenseTensor t = read_tensor_file(path);
    if (t.order() != 2) throw io_error("expected an order-2 tensor in " + path.string());
    Eigen::MatrixXd m(static_cast<Eigen::Index>(t.dim(0)), static_cast<Eigen::Index>(t.dim(1)));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            m(r, c) = t.at({static_cast<std::size_t>(r), static_cast<std::size_t>(c)});
    return m;
}

} // namespace rcpd
