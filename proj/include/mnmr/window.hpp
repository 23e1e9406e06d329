#pragma once

#include <string>
#include <vector>

#include "mnmr/linalg.hpp"

namespace mnmr {

// Shape of one observation window: feature rows stacked over response rows,
// past columns followed by future columns.
struct WindowSpec {
  Index feature_rows = 3;   // regressor channels per time step
  Index response_rows = 1;  // predicted channels per time step
  Index past_steps = 5;
  Index future_steps = 3;
  double step_seconds = 0.2;

  Index d() const { return feature_rows + response_rows; }
  Index tau() const { return past_steps + future_steps; }

  void validate() const;

  bool operator==(const WindowSpec&) const = default;

  static std::vector<std::string> default_feature_names(Index feature_rows,
                                                        Index response_rows);
};

// Per-feature-row location/scale used to z-score windows. Fit on training
// data only and carried with the model so raw inputs can be handled directly.
struct StandardizationStats {
  Vector mean;
  Vector stddev;
  std::vector<std::string> feature_names;

  Index d() const { return mean.size(); }
  void validate() const;

  static StandardizationStats identity(Index d);
};

// Row-wise statistics pooled over all windows and all columns.
// Throws DataError, naming the feature, if any row has zero variance.
StandardizationStats standardize_fit(const std::vector<Matrix>& windows,
                                     std::vector<std::string> names = {});

Matrix standardize_apply(const Matrix& window, const StandardizationStats& s);
Matrix standardize_invert(const Matrix& window, const StandardizationStats& s);
std::vector<Matrix> standardize_apply(const std::vector<Matrix>& windows,
                                      const StandardizationStats& s);

}  // namespace mnmr
