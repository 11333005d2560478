#include "scheds/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace scheds {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kYear = 365.0;

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delimiter)) {
    // trim whitespace and stray carriage returns
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == delimiter) cells.push_back("");
  return cells;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& response_column,
                 const std::vector<std::string>& covariate_columns,
                 char delimiter) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("load_csv: empty file " + path);
  const auto header = split_line(line, delimiter);

  const auto column_of = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw std::runtime_error("load_csv: column '" + name + "' not found in " +
                               path);
    return static_cast<int>(it - header.begin());
  };

  const int response_idx = column_of(response_column);
  std::vector<int> covariate_idx;
  for (const auto& name : covariate_columns) covariate_idx.push_back(column_of(name));

  Dataset data;
  data.covariate_names = covariate_columns;
  std::vector<std::vector<double>> rows;
  std::vector<double> responses;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_line(line, delimiter);
    bool missing = false;
    const auto parse = [&](int idx, const std::string& colname) {
      if (idx >= static_cast<int>(cells.size()) || cells[idx].empty()) {
        missing = true;
        return 0.0;
      }
      std::size_t pos = 0;
      double value = 0.0;
      try {
        value = std::stod(cells[idx], &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != cells[idx].size())
        throw std::runtime_error("load_csv: non-numeric cell at row " +
                                 std::to_string(lineno) + ", column '" +
                                 colname + "'");
      return value;
    };
    std::vector<double> row;
    row.reserve(covariate_idx.size());
    const double y = parse(response_idx, response_column);
    for (std::size_t j = 0; j < covariate_idx.size(); ++j)
      row.push_back(parse(covariate_idx[j], covariate_columns[j]));
    if (missing) {
      ++data.dropped_rows;
      continue;
    }
    rows.push_back(std::move(row));
    responses.push_back(y);
    data.time_index.push_back(lineno - 1);  // 1-based data row
  }

  data.covariates.resize(rows.size(), covariate_columns.size());
  data.response.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    data.response(i) = responses[i];
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      data.covariates(i, j) = rows[i][j];
  }
  return data;
}

WeatherRows build_weather_covariates(const Vector& mean_temp,
                                     const Vector& intraday_range,
                                     const Vector& wind) {
  const auto n = mean_temp.size();
  if (intraday_range.size() != n || wind.size() != n)
    throw std::invalid_argument("build_weather_covariates: length mismatch");

  WeatherRows out;
  // day i is usable once increments back to i-7 exist, i.e. i >= 8
  const int first = 8;
  const int rows = std::max<int>(0, static_cast<int>(n) - first);
  out.dropped = static_cast<int>(n) - rows;
  out.U.resize(rows, 16);
  out.t.resize(rows);
  out.y.resize(rows);
  for (int i = first; i < n; ++i) {
    const int r = i - first;
    out.y(r) = mean_temp(i) - mean_temp(i - 1);
    out.t(r) = r + 1;
    out.U(r, 0) = 1.0;
    for (int k = 1; k <= 7; ++k)
      out.U(r, k) = mean_temp(i - k) - mean_temp(i - k - 1);
    for (int k = 1; k <= 7; ++k) out.U(r, 7 + k) = intraday_range(i - k);
    out.U(r, 15) = wind(i - 1);
  }
  return out;
}

Vector time_dictionary(double t) {
  if (!(t > 0.0))
    throw std::invalid_argument("time_dictionary: t must be positive");
  Vector psi(16);
  psi(0) = 1.0;
  for (int l = 2; l <= 4; ++l) psi(l - 1) = std::pow(t, 1.0 / (l - 1.0));
  for (int l = 5; l <= 10; ++l) psi(l - 1) = std::cos(kTwoPi * (l - 4) * t / kYear);
  for (int l = 11; l <= 16; ++l) psi(l - 1) = std::sin(kTwoPi * (l - 10) * t / kYear);
  return psi;
}

TemperatureDesign build_temperature_design(const Matrix& U, const Vector& t) {
  const auto T = U.rows();
  if (U.cols() != 16)
    throw std::invalid_argument(
        "build_temperature_design: covariate dimension must be 16");
  if (t.size() != T)
    throw std::invalid_argument("build_temperature_design: t length mismatch");

  TemperatureDesign design;
  design.X.resize(T, 2176);
  design.partition.groups.reserve(136);
  int col = 0;
  for (int i = 0; i < 16; ++i) {
    for (int ip = i; ip < 16; ++ip) {
      std::vector<int> group;
      group.reserve(16);
      for (int l = 0; l < 16; ++l) group.push_back(col + l);
      design.partition.groups.push_back(std::move(group));
      col += 16;
    }
  }
  for (Eigen::Index row = 0; row < T; ++row) {
    const Vector psi = time_dictionary(t(row));
    int c = 0;
    for (int i = 0; i < 16; ++i) {
      for (int ip = i; ip < 16; ++ip) {
        const double chi = U(row, i) * U(row, ip);
        for (int l = 0; l < 16; ++l) design.X(row, c + l) = psi(l) * chi;
        c += 16;
      }
    }
  }
  return design;
}

Matrix build_variance_dictionary(const Vector& t) {
  for (Eigen::Index i = 0; i < t.size(); ++i)
    if (!(t(i) > 0.0))
      throw std::invalid_argument(
          "build_variance_dictionary: t must be positive");
  Matrix R(t.size(), 11);
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double ti = t(i);
    R(i, 0) = 1.0;
    R(i, 1) = ti;
    R(i, 2) = 1.0 / std::sqrt(ti + 2.0 * kYear);
    for (int l = 4; l <= 7; ++l)
      R(i, l - 1) = 1.0 + std::cos(kTwoPi * (l - 3) * ti / kYear);
    // the second periodic family uses sines so all eleven columns are
    // distinct on a generic grid
    for (int l = 8; l <= 11; ++l)
      R(i, l - 1) = 1.0 + std::sin(kTwoPi * (l - 7) * ti / kYear);
  }
  // cos/sin can dip a hair below zero in floating point at the roots
  R = R.cwiseMax(0.0);
  return R;
}

}  // namespace scheds
