#pragma once

#include <cstddef>
#include <span>

namespace bustop {

struct Summary {
  std::size_t n = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};

// Linear-interpolation quantile (position p·(n−1) in sorted order).
double quantile(std::span<const double> sorted, double p);
// Quartiles of an unsorted sample; n == 0 leaves every field zero.
Summary summarize(std::span<const double> values);

double mean(std::span<const double> values);
// Sample standard deviation (n − 1); 0 for fewer than two values.
double stddev(std::span<const double> values);

}  // namespace bustop
