#pragma once

#include <cstddef>
#include <vector>

namespace phidiv {

/// A sorted batch of observations strictly inside (0,1), i.e. data already
/// mapped through the null probability integral transform. Values at 0 or 1
/// are rejected (continuous-F assumption); exact ties are kept but flagged.
class Sample {
 public:
  explicit Sample(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  const std::vector<double>& values() const { return values_; }

  /// 1-based order statistic X_(i).
  double order_stat(std::size_t i) const { return values_[i - 1]; }

  bool has_ties() const { return has_ties_; }

 private:
  std::vector<double> values_;
  bool has_ties_ = false;
};

}  // namespace phidiv
