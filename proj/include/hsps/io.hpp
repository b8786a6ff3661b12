#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hsps/multiplexing.hpp"

namespace hsps::io {

/// Shortest decimal that reads back to the same double; "nan", "inf", "-inf" otherwise.
std::string format_double(double v);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

/// A table held as already-formatted cells.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
    std::string to_csv() const;
};

std::string matrix_csv(const Eigen::MatrixXd& m);

/// Writes bytes exactly; throws std::runtime_error on failure.
void write_file(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

/// Two or three numeric columns (x, y[, sigma]); a non-numeric first line is
/// taken as a header. '#' starts a comment. Throws DataError with the line number.
std::vector<XyPoint> parse_xy_csv(std::string_view text);
std::vector<XyPoint> read_xy_csv(const std::filesystem::path& path);

}  // namespace hsps::io
