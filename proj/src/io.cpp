#include "kerrq/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace kerrq {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary), path_(path) {
  require(out_.good(), ErrorCode::kIo, "cannot open " + path.string() + " for writing");
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : CsvWriter(path) {
  write_header(header);
}

CsvWriter CsvWriter::with_preamble(const std::filesystem::path& path, const std::string& comment,
                                   const std::vector<std::string>& header) {
  CsvWriter w(path);
  w.out_ << "# " << comment << '\n';
  w.write_header(header);
  return w;
}

void CsvWriter::write_header(const std::vector<std::string>& header) {
  columns_ = header.size();
  for (size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
  require(cells.size() == columns_, ErrorCode::kIo, "CSV row width does not match header");
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    if (const auto* d = std::get_if<double>(&cells[i])) {
      out_ << format_double(*d);
    } else if (const auto* n = std::get_if<long long>(&cells[i])) {
      out_ << *n;
    } else {
      out_ << std::get<std::string>(cells[i]);
    }
  }
  out_ << '\n';
}

void CsvWriter::close() {
  out_.close();
  require(!out_.fail(), ErrorCode::kIo, "failed writing " + path_.string());
}

void write_field_csv(const std::filesystem::path& path, const PhaseSpaceField& field) {
  const PhaseGrid& g = field.grid;
  const double s = g.convention.value_scale();
  std::ostringstream meta;
  meta << "kind=" << (field.kind == FieldKind::kWigner ? "wigner" : "husimi")
       << " convention=" << g.convention.name() << " nx=" << g.nx << " np=" << g.np
       << " x_min=" << format_double(g.x_min * s) << " x_max=" << format_double(g.x_max * s)
       << " p_min=" << format_double(g.p_min * s) << " p_max=" << format_double(g.p_max * s);
  // Densities transform with the inverse Jacobian of the coordinate scaling.
  const double density_scale = 1.0 / (s * s);
  auto w = CsvWriter::with_preamble(path, meta.str(), {"x", "p", "value"});
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.np; ++j)
      w.row({g.x(i) * s, g.p(j) * s, field.values(i, j) * density_scale});
  w.close();
}

void write_matrix_csv(const std::filesystem::path& path, const std::vector<double>& labels,
                      const Eigen::MatrixXd& m, const std::string& label_name) {
  require(static_cast<Eigen::Index>(labels.size()) == m.rows(), ErrorCode::kIo,
          "matrix label count mismatch");
  std::vector<std::string> header{label_name};
  for (Eigen::Index c = 0; c < m.cols(); ++c) header.push_back("c" + std::to_string(c));
  CsvWriter w(path, header);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<CsvCell> cells{labels[r]};
    for (Eigen::Index c = 0; c < m.cols(); ++c) cells.emplace_back(m(r, c));
    w.row(cells);
  }
  w.close();
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  require(!out.fail(), ErrorCode::kIo, "failed writing " + path.string());
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::kIo, "cannot open config " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, "config " + path.string() + " is not valid JSON: " + e.what());
  }
}

}  // namespace kerrq
