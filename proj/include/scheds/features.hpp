#pragma once

#include <string>
#include <vector>

#include "scheds/model.hpp"

namespace scheds {

/// Typed, gap-free dataset.  Rows with an empty cell in a requested column
/// are dropped and counted; non-numeric cells are errors.
struct Dataset {
  std::vector<std::string> covariate_names;
  Matrix covariates;  // T x d
  Vector response;    // T
  std::vector<int> time_index;  // original 1-based row positions
  int dropped_rows = 0;
};

Dataset load_csv(const std::string& path, const std::string& response_column,
                 const std::vector<std::string>& covariate_columns,
                 char delimiter = ',');

/// Covariate recipe of the temperature experiment: from a daily series of
/// (mean temperature, intraday range, wind speed) build per-day rows with
/// response y_t = temp_t - temp_{t-1} and the 16-dimensional covariate
/// u = [1, 7 past increments, 7 past intraday ranges, previous-day wind].
/// Days without enough history are dropped and counted.
struct WeatherRows {
  Matrix U;       // T x 16
  Vector t;       // T, positive day index
  Vector y;       // T, temperature increments
  int dropped = 0;
};

WeatherRows build_weather_covariates(const Vector& mean_temp,
                                     const Vector& intraday_range,
                                     const Vector& wind);

/// Time dictionary psi_1..psi_16 evaluated at t.
Vector time_dictionary(double t);

/// Second-order interaction design: columns psi_l(t) * u_i u_i' over the
/// 136 index pairs i <= i', in lexicographic pair order with l ascending
/// inside each group of 16.  p = 136 * 16 = 2176.
struct TemperatureDesign {
  Matrix X;  // T x 2176
  GroupPartition partition;  // 136 groups of 16
};

TemperatureDesign build_temperature_design(const Matrix& U, const Vector& t);

/// Variance dictionary r_1..r_11 (all non-negative for t > 0):
/// 1, t, (t + 730)^{-1/2}, 1 + cos(2 pi k t / 365) for k = 1..4 and
/// 1 + sin(2 pi k t / 365) for k = 1..4.
Matrix build_variance_dictionary(const Vector& t);

}  // namespace scheds
