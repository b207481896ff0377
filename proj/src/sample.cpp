#include "phidiv/sample.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace phidiv {

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
  std::sort(values_.begin(), values_.end());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double x = values_[i];
    if (!(x > 0.0 && x < 1.0)) {
      throw std::invalid_argument(
          "Sample: value " + std::to_string(x) +
          " outside (0,1); apply the null transform first");
    }
    if (i > 0 && values_[i - 1] == x) has_ties_ = true;
  }
}

}  // namespace phidiv
