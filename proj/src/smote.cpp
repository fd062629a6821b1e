#include <algorithm>
#include <cmath>
#include <numeric>

#include "bustop/error.hpp"
#include "bustop/learner.hpp"

namespace bustop {

namespace {

struct Scaler {
  Row lo{}, span{};

  explicit Scaler(const std::vector<Row>& rows) {
    lo = rows.front();
    Row hi = rows.front();
    for (const auto& r : rows) {
      for (std::size_t f = 0; f < kNumFeatures; ++f) {
        lo[f] = std::min(lo[f], r[f]);
        hi[f] = std::max(hi[f], r[f]);
      }
    }
    for (std::size_t f = 0; f < kNumFeatures; ++f) span[f] = hi[f] - lo[f];
  }

  Row scale(const Row& r) const {
    Row s{};
    for (std::size_t f = 0; f < kNumFeatures; ++f) s[f] = span[f] > 0.0 ? (r[f] - lo[f]) / span[f] : 0.0;
    return s;
  }
};

double sq_dist(const Row& a, const Row& b) {
  double d = 0.0;
  for (std::size_t f = 0; f < kNumFeatures; ++f) d += (a[f] - b[f]) * (a[f] - b[f]);
  return d;
}

}  // namespace

std::vector<SyntheticSample> smote(const std::vector<Row>& minority, int k_neighbors, std::size_t n_synthetic,
                                   Rng& rng) {
  if (minority.size() < 2) {
    throw Error(ErrorCode::TooFewMinoritySamples,
                "SMOTE needs at least 2 minority rows, got " + std::to_string(minority.size()));
  }
  if (k_neighbors < 1) throw Error(ErrorCode::InvalidArgument, "k_neighbors must be >= 1");
  std::vector<SyntheticSample> out;
  if (n_synthetic == 0) return out;

  const auto m = minority.size();
  const auto k = std::min(static_cast<std::size_t>(k_neighbors), m - 1);
  const Scaler scaler(minority);
  std::vector<Row> scaled;
  scaled.reserve(m);
  for (const auto& r : minority) scaled.push_back(scaler.scale(r));

  // Neighbour lists are computed lazily; ties go to the lower index.
  std::vector<std::vector<std::size_t>> neighbours(m);
  auto knn = [&](std::size_t i) -> const std::vector<std::size_t>& {
    auto& nb = neighbours[i];
    if (!nb.empty()) return nb;
    std::vector<std::pair<double, std::size_t>> d;
    d.reserve(m - 1);
    for (std::size_t j = 0; j < m; ++j) {
      if (j != i) d.emplace_back(sq_dist(scaled[i], scaled[j]), j);
    }
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    for (std::size_t q = 0; q < k; ++q) nb.push_back(d[q].second);
    return nb;
  };

  out.reserve(n_synthetic);
  for (std::size_t s = 0; s < n_synthetic; ++s) {
    SyntheticSample syn;
    syn.base = static_cast<std::size_t>(rng.below(m));
    const auto& nb = knn(syn.base);
    syn.neighbor = nb[static_cast<std::size_t>(rng.below(nb.size()))];
    syn.u = rng.uniform();
    const auto& a = scaled[syn.base];
    const auto& b = scaled[syn.neighbor];
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      const double v = a[f] + syn.u * (b[f] - a[f]);
      syn.row[f] = scaler.span[f] > 0.0 ? scaler.lo[f] + v * scaler.span[f] : scaler.lo[f];
    }
    syn.row[feat::kHighlyPopulated] = std::round(syn.row[feat::kHighlyPopulated]);
    out.push_back(syn);
  }
  return out;
}

BinarySet smote_balance(const BinarySet& data, int k_neighbors, Rng& rng) {
  const auto pos = data.positives();
  const auto neg = data.size() - pos;
  BinarySet out = data;
  if (pos == neg) return out;
  const std::uint8_t minority_label = pos < neg ? 1 : 0;
  std::vector<Row> minority;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.y[i] == minority_label) minority.push_back(data.x[i]);
  }
  const auto deficit = (pos < neg ? neg : pos) - minority.size();
  for (const auto& s : smote(minority, k_neighbors, deficit, rng)) out.push(s.row, minority_label == 1);
  return out;
}

}  // namespace bustop
