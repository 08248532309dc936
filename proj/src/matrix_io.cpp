#include "relpca/matrix_io.hpp"

#include <cstring>
#include <fstream>

#include "relpca/errors.hpp"

namespace relpca {

namespace {

constexpr char kMagic[4] = {'R', 'K', 'M', '1'};

void append_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

std::uint32_t read_u32_le(const std::vector<std::uint8_t>& bytes, std::size_t at) {
    return std::uint32_t(bytes[at]) | (std::uint32_t(bytes[at + 1]) << 8) |
           (std::uint32_t(bytes[at + 2]) << 16) | (std::uint32_t(bytes[at + 3]) << 24);
}

}  // namespace

std::vector<std::uint8_t> serialize_matrix(const MatrixXd& m) {
    std::vector<std::uint8_t> out;
    out.reserve(12 + std::size_t(m.size()) * sizeof(double));
    out.insert(out.end(), kMagic, kMagic + 4);
    append_u32_le(out, static_cast<std::uint32_t>(m.rows()));
    append_u32_le(out, static_cast<std::uint32_t>(m.cols()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            std::uint8_t buf[sizeof(double)];
            std::memcpy(buf, &v, sizeof(double));
            out.insert(out.end(), buf, buf + sizeof(double));
        }
    return out;
}

MatrixXd parse_matrix(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 12) throw Truncated("matrix file shorter than header");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw BadMagic("matrix magic is not RKM1");
    const std::uint32_t rows = read_u32_le(bytes, 4);
    const std::uint32_t cols = read_u32_le(bytes, 8);
    const std::size_t need = 12 + std::size_t(rows) * cols * sizeof(double);
    if (bytes.size() < need) throw Truncated("matrix payload shorter than rows*cols");
    MatrixXd m(rows, cols);
    std::size_t at = 12;
    for (std::uint32_t i = 0; i < rows; ++i)
        for (std::uint32_t j = 0; j < cols; ++j) {
            double v;
            std::memcpy(&v, bytes.data() + at, sizeof(double));
            at += sizeof(double);
            m(i, j) = v;
        }
    return m;
}

void write_matrix(const std::string& path, const MatrixXd& m) {
    const std::vector<std::uint8_t> bytes = serialize_matrix(m);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("short write to " + path);
}

MatrixXd read_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                    std::istreambuf_iterator<char>()};
    return parse_matrix(bytes);
}

}  // namespace relpca
