#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "roughcurve/errors.hpp"
#include "roughcurve/io.hpp"

using namespace roughcurve;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "roughcurve_test_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("format_double round trips") {
  for (double x : {0.0, 1.0, -2.5, 0.1, 1e-300, 3.141592653589793, 123456789.123456789})
    CHECK(std::stod(io::format_double(x)) == x);
  CHECK(io::format_double(0.5) == "0.5");
}

TEST_CASE("matrix CSV") {
  Eigen::MatrixXd a(3, 2);
  a << 1, -2.5, 0.1, 1e-12, 7, 3.141592653589793;
  const fs::path p = scratch("m.csv");
  io::write_matrix_csv(p, a);
  CHECK(io::read_matrix_csv(p) == a);

  std::ofstream(scratch("bad.csv")) << "2,2\n1,2\n3\n";
  CHECK_THROWS_AS(io::read_matrix_csv(scratch("bad.csv")), StructuralError);
  std::ofstream(scratch("nan.csv")) << "1,1\nabc\n";
  CHECK_THROWS_AS(io::read_matrix_csv(scratch("nan.csv")), StructuralError);
  std::ofstream(scratch("short.csv")) << "3,1\n1\n";
  CHECK_THROWS_AS(io::read_matrix_csv(scratch("short.csv")), StructuralError);
}

TEST_CASE("columns CSV") {
  const fs::path p = scratch("cols.csv");
  io::write_columns_csv(p, {"a", "b"}, {Eigen::Vector2d(1, 2), Eigen::Vector2d(0.5, -1)});
  std::ifstream in(p);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text == "a,b\n1,0.5\n2,-1\n");
  CHECK_THROWS_AS(io::write_columns_csv(p, {"a"}, {Eigen::Vector2d(1, 2), Eigen::Vector2d(1, 2)}), StructuralError);
  CHECK_THROWS_AS(io::write_columns_csv(p, {"a", "b"}, {Eigen::Vector2d(1, 2), Eigen::Vector3d(1, 2, 3)}),
                  StructuralError);
}

TEST_CASE("PGM") {
  Image img(2, 3);
  img << 0, 1, 2, 3, 4, 5;
  for (bool binary : {false, true}) {
    const fs::path p = scratch(binary ? "b.pgm" : "a.pgm");
    io::write_pgm(p, img, binary);
    const Image back = io::read_pgm(p);
    CHECK(back.rows() == 2);
    CHECK(back.cols() == 3);
    CHECK(back(0, 0) == 0.0);
    CHECK(back(1, 2) == 255.0);
    CHECK(back(0, 1) == 51.0);
  }
  std::ofstream(scratch("c.pgm")) << "P2\n# comment\n2 1\n255\n10 0\n";
  const Image c = io::read_pgm(scratch("c.pgm"));
  CHECK(c(0, 0) == 10.0);
  std::ofstream(scratch("d.pgm")) << "P3\n1 1\n255\n0 0 0\n";
  CHECK_THROWS_AS(io::read_pgm(scratch("d.pgm")), StructuralError);
  io::write_pgm(scratch("flat.pgm"), Image::Constant(2, 2, 3.0));
  CHECK(io::read_pgm(scratch("flat.pgm")).isZero(0));
}

TEST_CASE("mask files") {
  Mask m = Mask::Constant(4, 4, true);
  m(1, 2) = false;
  io::write_mask_csv(scratch("mask.csv"), m);
  CHECK((io::read_mask(scratch("mask.csv")) == m).all());
  io::write_pgm(scratch("mask.pgm"), m.cast<double>().matrix());
  CHECK((io::read_mask(scratch("mask.pgm")) == m).all());
  io::write_mask_csv(scratch("empty.csv"), Mask::Constant(2, 2, false));
  CHECK_THROWS_AS(io::read_mask(scratch("empty.csv")), StructuralError);
  CHECK_THROWS(io::read_mask(scratch("missing.csv")));
}
