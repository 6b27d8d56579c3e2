#pragma once

#include <Eigen/Core>
#include <filesystem>

namespace l4dec {

// Binary container: magic "L4MX", u32 version (=1), u64 rows, u64 cols,
// then rows*cols doubles in column-major order, little-endian throughout.
// CSV container: first line "# rows,cols", then one line per row with
// comma-separated %.17g values (round-trips doubles exactly).
// save_matrix/load_matrix dispatch on extension: ".csv" -> CSV, else binary.

void save_matrix_bin(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd load_matrix_bin(const std::filesystem::path& path);

void save_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path);

void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd load_matrix(const std::filesystem::path& path);

}  // namespace l4dec
