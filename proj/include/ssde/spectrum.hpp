#pragma once

#include <vector>

namespace ssde {

// Ordered singular values of one weight matrix at one training step.
struct SpectrumSnapshot {
  long step = 0;
  std::vector<double> values;  // nonincreasing
};

}  // namespace ssde
