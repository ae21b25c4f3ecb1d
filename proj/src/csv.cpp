#include "wadet/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace wadet {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_samples_csv(const std::filesystem::path& path,
                       const Eigen::MatrixXd& samples) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  for (Eigen::Index k = 0; k < samples.cols(); ++k) {
    for (Eigen::Index i = 0; i < samples.rows(); ++i) {
      if (i) out << ',';
      out << format_double(samples(i, k));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

bool parse_row(const std::string& line, std::vector<double>& row) {
  row.clear();
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(field, &pos);
    } catch (const std::exception&) {
      return false;
    }
    while (pos < field.size() &&
           std::isspace(static_cast<unsigned char>(field[pos])))
      ++pos;
    if (pos != field.size()) return false;
    row.push_back(v);
  }
  return !row.empty();
}

}  // namespace

Eigen::MatrixXd read_samples_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<double> row;
    if (!parse_row(line, row)) {
      if (first) {  // tolerate a single header line
        first = false;
        continue;
      }
      throw std::runtime_error("malformed CSV row in " + path.string() + ": " +
                               line);
    }
    first = false;
    if (!rows.empty() && rows.front().size() != row.size())
      throw std::runtime_error("inconsistent column count in " +
                               path.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("no samples in " + path.string());

  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.front().size()),
                      static_cast<Eigen::Index>(rows.size()));
  for (Eigen::Index k = 0; k < out.cols(); ++k)
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      out(i, k) = rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
  return out;
}

}  // namespace wadet
