#include "bustop/error.hpp"
#include "bustop/learner.hpp"

namespace bustop {

BinaryConfusion confusion(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> truth) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(predicted.size()) + " predictions for " +
                                               std::to_string(truth.size()) + " labels");
  }
  BinaryConfusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] != 0;
    const bool t = truth[i] != 0;
    if (p && t) ++c.tp;
    else if (p) ++c.fp;
    else if (t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double weighted_f1(const BinaryConfusion& c) {
  const auto pos_support = static_cast<double>(c.tp + c.fn);
  const auto neg_support = static_cast<double>(c.tn + c.fp);
  const double total = pos_support + neg_support;
  if (total == 0.0) return 0.0;
  auto f1 = [](double hit, double miss_a, double miss_b) {
    const double denom = 2.0 * hit + miss_a + miss_b;
    return denom > 0.0 ? 2.0 * hit / denom : 0.0;
  };
  const double f_pos = f1(static_cast<double>(c.tp), static_cast<double>(c.fp), static_cast<double>(c.fn));
  const double f_neg = f1(static_cast<double>(c.tn), static_cast<double>(c.fn), static_cast<double>(c.fp));
  return (pos_support * f_pos + neg_support * f_neg) / total;
}

double weighted_f1(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> truth) {
  return weighted_f1(confusion(predicted, truth));
}

}  // namespace bustop
