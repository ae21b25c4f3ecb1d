#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>

namespace wadet {

/// Renders a double with enough digits to round-trip exactly.
std::string format_double(double v);

/// Writes one sample per row, comma separated, no header.
void write_samples_csv(const std::filesystem::path& path,
                       const Eigen::MatrixXd& columns_are_samples);

/// Reads a row-per-sample CSV (an optional non-numeric header line is
/// skipped). Returns one sample per column.
Eigen::MatrixXd read_samples_csv(const std::filesystem::path& path);

}  // namespace wadet
