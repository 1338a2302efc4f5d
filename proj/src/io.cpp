#include "roughcurve/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "roughcurve/errors.hpp"

namespace roughcurve::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

double parse_double(std::string_view tok, const std::filesystem::path& path) {
  while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
  while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r')) tok.remove_suffix(1);
  double x = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw StructuralError("malformed number '" + std::string(tok) + "' in " + path.string());
  return x;
}

// Next whitespace-delimited PGM header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  char ch;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(ch);
  }
  return tok;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::Ref<const Eigen::MatrixXd>& values) {
  auto out = open_out(path);
  out << values.rows() << ',' << values.cols() << '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (c) out << ',';
      out << format_double(values(r, c));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw StructuralError(path.string() + " is empty");
  const auto comma = line.find(',');
  if (comma == std::string::npos) throw StructuralError("missing 'rows,cols' header in " + path.string());
  const double rows = parse_double(std::string_view(line).substr(0, comma), path);
  const double cols = parse_double(std::string_view(line).substr(comma + 1), path);
  if (rows < 0 || cols < 0) throw StructuralError("negative dimensions in " + path.string());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    if (!std::getline(in, line)) throw StructuralError(path.string() + " has fewer rows than declared");
    std::string_view rest(line);
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      const auto pos = rest.find(',');
      if ((pos == std::string_view::npos) != (c + 1 == out.cols()))
        throw StructuralError("row " + std::to_string(r) + " of " + path.string() + " has the wrong column count");
      out(r, c) = parse_double(rest.substr(0, pos), path);
      if (pos != std::string_view::npos) rest.remove_prefix(pos + 1);
    }
  }
  return out;
}

void write_columns_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                       const std::vector<Eigen::VectorXd>& columns) {
  if (names.size() != columns.size()) throw StructuralError("column names and data differ in count");
  const Eigen::Index n = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != n) throw StructuralError("columns differ in length");
  auto out = open_out(path);
  for (size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  for (Eigen::Index r = 0; r < n; ++r) {
    for (size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << format_double(columns[i](r));
    out << '\n';
  }
}

void write_pgm(const std::filesystem::path& path, const Eigen::Ref<const Eigen::MatrixXd>& image, bool binary) {
  const double lo = image.size() ? image.minCoeff() : 0.0;
  const double hi = image.size() ? image.maxCoeff() : 0.0;
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
  auto out = open_out(path, binary);
  out << (binary ? "P5" : "P2") << '\n' << image.cols() << ' ' << image.rows() << "\n255\n";
  // Row 0 of the image is the bottom of the picture.
  for (Eigen::Index r = image.rows() - 1; r >= 0; --r) {
    for (Eigen::Index c = 0; c < image.cols(); ++c) {
      const int g = static_cast<int>(std::lround((image(r, c) - lo) * scale));
      if (binary)
        out.put(static_cast<char>(static_cast<unsigned char>(g)));
      else
        out << (c ? " " : "") << g;
    }
    if (!binary) out << '\n';
  }
}

Image read_pgm(const std::filesystem::path& path) {
  auto in = open_in(path);
  const std::string magic = pgm_token(in);
  if (magic != "P2" && magic != "P5") throw StructuralError(path.string() + " is not a P2/P5 PGM file");
  const int width = std::stoi(pgm_token(in));
  const int height = std::stoi(pgm_token(in));
  const int maxval = std::stoi(pgm_token(in));
  if (width < 1 || height < 1 || maxval < 1 || maxval > 255)
    throw StructuralError("unsupported PGM header in " + path.string());
  Image img(height, width);
  for (int r = height - 1; r >= 0; --r) {
    for (int c = 0; c < width; ++c) {
      if (magic == "P2") {
        const std::string tok = pgm_token(in);
        if (tok.empty()) throw StructuralError(path.string() + " ends early");
        img(r, c) = std::stoi(tok);
      } else {
        char ch;
        if (!in.get(ch)) throw StructuralError(path.string() + " ends early");
        img(r, c) = static_cast<unsigned char>(ch);
      }
    }
  }
  return img;
}

Mask read_mask(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  const Eigen::MatrixXd values = ext == ".pgm" ? Eigen::MatrixXd(read_pgm(path)) : read_matrix_csv(path);
  Mask mask = (values.array() != 0.0);
  if (mask.count() == 0) throw StructuralError("mask in " + path.string() + " keeps no pixels");
  return mask;
}

void write_mask_csv(const std::filesystem::path& path, const Mask& mask) {
  write_matrix_csv(path, mask.cast<double>().matrix());
}

}  // namespace roughcurve::io
