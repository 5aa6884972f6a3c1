#include "gdf/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace gdf {

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) body_ += ',';
    body_ += header[i];
  }
  body_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::logic_error("csv row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) body_ += ',';
    body_ += cells[i];
  }
  body_ += '\n';
}

void dump_kernel(std::ostream& out, const Matrix& k, double alpha, const std::string& kind) {
  out << "# gdflab kernel dump v1\n";
  out << "# kind=" << kind << " alpha=" << format_g17(alpha) << " rows=" << k.rows()
      << " cols=" << k.cols() << "\n";
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    for (Eigen::Index j = 0; j < k.cols(); ++j) {
      if (j) out << ' ';
      out << format_g17(k(i, j));
    }
    out << '\n';
  }
}

std::string dump_kernel_string(const Matrix& k, double alpha, const std::string& kind) {
  std::ostringstream ss;
  dump_kernel(ss, k, alpha, kind);
  return ss.str();
}

}  // namespace gdf
