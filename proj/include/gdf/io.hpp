#ifndef GDF_IO_HPP
#define GDF_IO_HPP

#include "gdf/numeric.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gdf {

// Shortest round-trip decimal form (17 significant digits); all result files
// go through this so reruns are byte-identical.
std::string format_g17(double x);

std::uint64_t fnv1a64(const std::string& bytes);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  std::string str() const { return body_; }

 private:
  std::size_t columns_;
  std::string body_;
};

// Dense row-major text dump with 17 significant digits, for golden-file
// comparisons of kernels.
void dump_kernel(std::ostream& out, const Matrix& k, double alpha, const std::string& kind);
std::string dump_kernel_string(const Matrix& k, double alpha, const std::string& kind);

}  // namespace gdf

#endif  // GDF_IO_HPP
