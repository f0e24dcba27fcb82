// Locale-independent CSV/PGM emission and content hashing.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace pdcsim::io {

/// Shortest round-trip decimal representation with '.' as separator.
std::string format_double(double value);

/// `undefined` for an empty optional.
std::string format_optional(const std::optional<double>& value);

/// Binary 8-bit PGM (P5), row-major, scaled so the maximum maps to 255.
std::string encode_pgm(const Eigen::MatrixXd& values);

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

void write_file(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

/// Splits one CSV line on commas (no quoting support).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace pdcsim::io
