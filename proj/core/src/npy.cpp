#include "pure/npy.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>
#include <vector>

#include "pure/error.hpp"

namespace pure {

namespace {

constexpr std::string_view kMagic = "\x93NUMPY";
constexpr std::size_t kAlign = 64;

static_assert(std::endian::native == std::endian::little, "NPY I/O assumes a little-endian host");

struct Header {
    std::size_t item_size = 8;
    bool fortran = false;
    std::vector<std::size_t> shape;
};

std::size_t skip_ws(std::string_view s, std::size_t pos)
{
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\n'))
        ++pos;
    return pos;
}

// Position just past "'key':" (or "\"key\":"), or npos.
std::size_t find_key(std::string_view h, std::string_view key)
{
    for (char quote : {'\'', '"'}) {
        std::string pattern;
        pattern += quote;
        pattern += key;
        pattern += quote;
        auto pos = h.find(pattern);
        if (pos == std::string_view::npos)
            continue;
        pos = skip_ws(h, pos + pattern.size());
        if (pos < h.size() && h[pos] == ':')
            return skip_ws(h, pos + 1);
    }
    return std::string_view::npos;
}

Header parse_header(std::string_view h)
{
    Header out;

    auto pos = find_key(h, "descr");
    if (pos == std::string_view::npos || pos >= h.size() || (h[pos] != '\'' && h[pos] != '"'))
        fail(ErrorCode::BadHeader, "missing 'descr'");
    const char quote = h[pos];
    const auto end = h.find(quote, pos + 1);
    if (end == std::string_view::npos)
        fail(ErrorCode::BadHeader, "unterminated 'descr'");
    const auto descr = h.substr(pos + 1, end - pos - 1);
    if (descr == "<f8")
        out.item_size = 8;
    else if (descr == "<f4")
        out.item_size = 4;
    else
        fail(ErrorCode::UnsupportedDtype, "dtype '" + std::string(descr) + "' (need <f4 or <f8)");

    pos = find_key(h, "fortran_order");
    if (pos == std::string_view::npos)
        fail(ErrorCode::BadHeader, "missing 'fortran_order'");
    if (h.substr(pos, 4) == "True")
        out.fortran = true;
    else if (h.substr(pos, 5) != "False")
        fail(ErrorCode::BadHeader, "bad 'fortran_order' value");

    pos = find_key(h, "shape");
    if (pos == std::string_view::npos || pos >= h.size() || h[pos] != '(')
        fail(ErrorCode::BadHeader, "missing 'shape'");
    const auto close = h.find(')', pos);
    if (close == std::string_view::npos)
        fail(ErrorCode::BadHeader, "unterminated 'shape'");
    std::string_view dims = h.substr(pos + 1, close - pos - 1);
    while (!dims.empty()) {
        const auto p = skip_ws(dims, 0);
        dims.remove_prefix(p);
        if (dims.empty())
            break;
        std::size_t value = 0;
        std::size_t digits = 0;
        while (digits < dims.size() && dims[digits] >= '0' && dims[digits] <= '9') {
            value = value * 10 + static_cast<std::size_t>(dims[digits] - '0');
            ++digits;
        }
        if (digits == 0)
            fail(ErrorCode::BadHeader, "bad 'shape' entry");
        out.shape.push_back(value);
        dims.remove_prefix(digits);
        dims.remove_prefix(skip_ws(dims, 0));
        if (!dims.empty()) {
            if (dims.front() != ',')
                fail(ErrorCode::BadHeader, "bad 'shape' separator");
            dims.remove_prefix(1);
        }
    }
    return out;
}

void append_le(std::string& out, std::uint64_t value, int bytes)
{
    for (int i = 0; i < bytes; ++i)
        out.push_back(static_cast<char>((value >> (8 * i)) & 0xffU));
}

}  // namespace

Matrix parse_npy(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kMagic.size() || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin(),
                                                    [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; }))
        fail(ErrorCode::BadMagic, "not an NPY file");
    if (bytes.size() < 10)
        fail(ErrorCode::UnexpectedEof, "truncated NPY preamble");

    const std::uint8_t major = bytes[6];
    std::size_t header_len = 0;
    std::size_t header_start = 0;
    if (major == 1) {
        header_len = static_cast<std::size_t>(bytes[8]) | (static_cast<std::size_t>(bytes[9]) << 8U);
        header_start = 10;
    } else if (major == 2) {
        if (bytes.size() < 12)
            fail(ErrorCode::UnexpectedEof, "truncated NPY preamble");
        for (int i = 0; i < 4; ++i)
            header_len |= static_cast<std::size_t>(bytes[8 + static_cast<std::size_t>(i)]) << (8U * static_cast<unsigned>(i));
        header_start = 12;
    } else {
        fail(ErrorCode::BadHeader, "unsupported NPY version " + std::to_string(major));
    }
    if (bytes.size() < header_start + header_len)
        fail(ErrorCode::UnexpectedEof, "truncated NPY header");

    const std::string_view text(reinterpret_cast<const char*>(bytes.data() + header_start), header_len);
    const Header h = parse_header(text);
    if (h.fortran)
        fail(ErrorCode::UnsupportedOrder, "Fortran-ordered arrays are not supported");

    std::size_t rows = 0;
    std::size_t cols = 0;
    if (h.shape.size() == 2) {
        rows = h.shape[0];
        cols = h.shape[1];
    } else if (h.shape.size() == 1) {
        rows = 1;
        cols = h.shape[0];
    } else {
        fail(ErrorCode::UnsupportedShape, "need a 1-D or 2-D array, got " + std::to_string(h.shape.size()) + "-D");
    }
    if (rows == 0 || cols == 0)
        fail(ErrorCode::UnsupportedShape, "array has an empty dimension");

    const std::size_t count = rows * cols;
    const std::size_t data_start = header_start + header_len;
    if (bytes.size() - data_start < count * h.item_size)
        fail(ErrorCode::UnexpectedEof, "NPY data section is shorter than its shape");

    std::vector<double> values(count);
    const auto* src = bytes.data() + data_start;
    if (h.item_size == 8) {
        std::memcpy(values.data(), src, count * 8);
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            float f = 0.0F;
            std::memcpy(&f, src + i * 4, 4);
            values[i] = static_cast<double>(f);
        }
    }
    return Matrix::from_external(rows, cols, std::move(values));
}

Matrix read_npy(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::IoFailure, "cannot open '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        fail(ErrorCode::IoFailure, "error reading '" + path.string() + "'");
    return parse_npy(bytes);
}

std::string encode_npy(const Matrix& m, NpyPrecision precision, bool one_dimensional)
{
    if (m.rows() == 0 || m.cols() == 0)
        fail(ErrorCode::InvalidArgument, "cannot write an array with an empty dimension");
    if (one_dimensional && m.rows() != 1)
        fail(ErrorCode::InvalidArgument, "1-D output needs a single row");

    std::string dict = "{'descr': '";
    dict += precision == NpyPrecision::Float64 ? "<f8" : "<f4";
    dict += "', 'fortran_order': False, 'shape': (";
    if (one_dimensional)
        dict += std::to_string(m.cols()) + ",), }";
    else
        dict += std::to_string(m.rows()) + ", " + std::to_string(m.cols()) + "), }";

    // magic(6) + version(2) + length(2) + dict + padding + '\n'
    const std::size_t unpadded = 10 + dict.size() + 1;
    const std::size_t padding = (kAlign - unpadded % kAlign) % kAlign;
    const std::size_t header_len = dict.size() + padding + 1;
    if (header_len > 0xffffU)
        fail(ErrorCode::InvalidArgument, "NPY header too long");

    std::string out;
    const std::size_t item = precision == NpyPrecision::Float64 ? 8 : 4;
    out.reserve(10 + header_len + m.size() * item);
    out += kMagic;
    out.push_back('\x01');
    out.push_back('\x00');
    append_le(out, header_len, 2);
    out += dict;
    out.append(padding, ' ');
    out.push_back('\n');

    for (double v : m.data()) {
        if (precision == NpyPrecision::Float64) {
            append_le(out, std::bit_cast<std::uint64_t>(v), 8);
        } else {
            append_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)), 4);
        }
    }
    return out;
}

namespace {

void write_bytes(const std::string& bytes, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(ErrorCode::IoFailure, "cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out)
        fail(ErrorCode::IoFailure, "error writing '" + path.string() + "'");
}

}  // namespace

void write_npy(const Matrix& m, const std::filesystem::path& path, NpyPrecision precision)
{
    write_bytes(encode_npy(m, precision), path);
}

void write_npy_vector(std::span<const double> v, const std::filesystem::path& path, NpyPrecision precision)
{
    const Matrix row(1, v.size(), std::vector<double>(v.begin(), v.end()));
    write_bytes(encode_npy(row, precision, true), path);
}

}  // namespace pure
