#ifndef ROUGHCURVE_IO_HPP
#define ROUGHCURVE_IO_HPP

// Plain-text interchange: matrix CSV with a "rows,cols" first line, and
// PGM images (P2 or P5) scaled affinely to [0, 255].

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

#include "roughcurve/forward.hpp"
#include "roughcurve/geometry.hpp"

namespace roughcurve::io {

std::string format_double(double x);

void write_matrix_csv(const std::filesystem::path& path, const Eigen::Ref<const Eigen::MatrixXd>& values);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

// Columns of equal length under a header line of names.
void write_columns_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                       const std::vector<Eigen::VectorXd>& columns);

void write_pgm(const std::filesystem::path& path, const Eigen::Ref<const Eigen::MatrixXd>& image, bool binary = false);
Image read_pgm(const std::filesystem::path& path);

// Nonzero = observed. ".pgm" files are read as images, anything else as matrix CSV.
Mask read_mask(const std::filesystem::path& path);
void write_mask_csv(const std::filesystem::path& path, const Mask& mask);

}  // namespace roughcurve::io

#endif  // ROUGHCURVE_IO_HPP
