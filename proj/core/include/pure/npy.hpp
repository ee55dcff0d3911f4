#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "pure/matrix.hpp"

namespace pure {

enum class NpyPrecision { Float32, Float64 };

/// Reads a C-ordered little-endian float32/float64 array (format 1.0 or 2.0).
/// Values are widened to double. A 1-D array of length n loads as a 1 x n
/// matrix.
///
/// Errors: BadMagic, BadHeader, UnsupportedDtype, UnsupportedOrder,
/// UnsupportedShape, UnexpectedEof, NonFinite, IoFailure.
Matrix read_npy(const std::filesystem::path& path);
Matrix parse_npy(std::span<const std::uint8_t> bytes);

/// Writes a format 1.0 file whose data starts on a 64-byte boundary.
/// Rejects matrices with a zero dimension (InvalidArgument).
void write_npy(const Matrix& m, const std::filesystem::path& path, NpyPrecision precision = NpyPrecision::Float64);
/// Same, but stored as a 1-D array.
void write_npy_vector(std::span<const double> v, const std::filesystem::path& path,
                      NpyPrecision precision = NpyPrecision::Float64);

std::string encode_npy(const Matrix& m, NpyPrecision precision = NpyPrecision::Float64, bool one_dimensional = false);

}  // namespace pure
