#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "kerrq/error.hpp"
#include "kerrq/phase_space.hpp"

namespace kerrq {

/// Shortest round-trip decimal is not required; every double is written
/// with 17 significant digits.
std::string format_double(double v);

using CsvCell = std::variant<double, long long, std::string>;

/// UTF-8, comma-separated, header row first. Lines end with '\n'.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  /// Comment line ("# ...") allowed only before the header is written.
  static CsvWriter with_preamble(const std::filesystem::path& path, const std::string& comment,
                                 const std::vector<std::string>& header);
  void row(const std::vector<CsvCell>& cells);
  void close();

 private:
  CsvWriter(const std::filesystem::path& path);
  void write_header(const std::vector<std::string>& header);
  std::ofstream out_;
  std::filesystem::path path_;
  size_t columns_ = 0;
};

/// Field export: "# kind=..., convention=..., grid ..." line, then x,p,value
/// with coordinates converted to the grid's convention.
void write_field_csv(const std::filesystem::path& path, const PhaseSpaceField& field);

/// Dense matrix with a leading label column.
void write_matrix_csv(const std::filesystem::path& path, const std::vector<double>& labels,
                      const Eigen::MatrixXd& m, const std::string& label_name);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace kerrq
