#include "bustop/mfcc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "bustop/error.hpp"
#include "bustop/geo.hpp"

namespace bustop {

void MfccConfig::validate() const {
  if (!(frame_len > hop && hop > 0)) throw Error(ErrorCode::InvalidArgument, "mfcc: need frame_len > hop > 0");
  if (!(n_ceps > 0 && n_ceps <= n_mel)) throw Error(ErrorCode::InvalidArgument, "mfcc: need 0 < n_ceps <= n_mel");
  if (fft_size < frame_len || !std::has_single_bit(static_cast<unsigned>(fft_size)) || fft_size < 4) {
    throw Error(ErrorCode::InvalidArgument, "mfcc: fft_size must be a power of two >= frame_len");
  }
  if (!(f_high > f_low && f_low >= 0.0 && f_high <= sample_rate / 2.0)) {
    throw Error(ErrorCode::InvalidArgument, "mfcc: filter range must lie within [0, Nyquist]");
  }
  if (!(log_floor > 0.0)) throw Error(ErrorCode::InvalidArgument, "mfcc: log_floor must be positive");
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<MelFilter> mel_filterbank(const MfccConfig& cfg) {
  const int n_bins = cfg.fft_size / 2 + 1;
  const double mel_lo = hz_to_mel(cfg.f_low);
  const double mel_hi = hz_to_mel(cfg.f_high);
  std::vector<double> edges(static_cast<std::size_t>(cfg.n_mel) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / static_cast<double>(cfg.n_mel + 1));
  }
  std::vector<MelFilter> filters(static_cast<std::size_t>(cfg.n_mel));
  for (std::size_t m = 0; m < filters.size(); ++m) {
    auto& f = filters[m];
    f.lower_hz = edges[m];
    f.center_hz = edges[m + 1];
    f.upper_hz = edges[m + 2];
    f.weights.assign(static_cast<std::size_t>(n_bins), 0.0);
    for (int k = 0; k < n_bins; ++k) {
      const double hz = static_cast<double>(k) * cfg.sample_rate / cfg.fft_size;
      double w = 0.0;
      if (hz > f.lower_hz && hz < f.center_hz) {
        w = (hz - f.lower_hz) / (f.center_hz - f.lower_hz);
      } else if (hz >= f.center_hz && hz < f.upper_hz) {
        w = (f.upper_hz - hz) / (f.upper_hz - f.center_hz);
      }
      f.weights[static_cast<std::size_t>(k)] = w;
    }
  }
  return filters;
}

MfccExtractor::MfccExtractor(MfccConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  const auto L = static_cast<std::size_t>(cfg_.frame_len);
  window_.resize(L);
  for (std::size_t n = 0; n < L; ++n) {
    window_[n] = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(n) / static_cast<double>(L - 1));
  }
  filters_ = mel_filterbank(cfg_);

  const auto M = static_cast<std::size_t>(cfg_.n_mel);
  const auto K = static_cast<std::size_t>(cfg_.n_ceps);
  dct_table_.resize(K * M);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t m = 0; m < M; ++m) {
      dct_table_[k * M + m] =
          std::cos(kPi * static_cast<double>(k) * (static_cast<double>(m) + 0.5) / static_cast<double>(M));
    }
  }

  // The N-point real transform runs as an N/2-point complex FFT; the first
  // N/4 twiddles serve the butterflies, the remaining N/2+1 the final split.
  const auto N = static_cast<std::size_t>(cfg_.fft_size);
  twiddles_.resize(N / 4 + N / 2 + 1);
  for (std::size_t j = 0; j < N / 4; ++j) {
    twiddles_[j] = std::polar(1.0, -2.0 * kPi * static_cast<double>(j) / static_cast<double>(N / 2));
  }
  for (std::size_t k = 0; k <= N / 2; ++k) {
    twiddles_[N / 4 + k] = std::polar(1.0, -2.0 * kPi * static_cast<double>(k) / static_cast<double>(N));
  }
}

std::size_t MfccExtractor::frame_count(std::size_t n_samples) const {
  const auto L = static_cast<std::size_t>(cfg_.frame_len);
  if (n_samples < L) return 0;
  return 1 + (n_samples - L) / static_cast<std::size_t>(cfg_.hop);
}

void MfccExtractor::fft(std::vector<std::complex<double>>& a) const {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        const auto w = twiddles_[j * stride];
        const auto u = a[i + j];
        const auto v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
}

std::vector<double> MfccExtractor::power_spectrum(std::span<const std::int16_t> frame) const {
  const auto N = static_cast<std::size_t>(cfg_.fft_size);
  const auto H = N / 2;
  std::vector<double> x(N, 0.0);
  const auto L = std::min(frame.size(), window_.size());
  for (std::size_t n = 0; n < L; ++n) x[n] = static_cast<double>(frame[n]) * window_[n];

  std::vector<std::complex<double>> z(H);
  for (std::size_t n = 0; n < H; ++n) z[n] = {x[2 * n], x[2 * n + 1]};
  fft(z);

  std::vector<double> power(H + 1);
  for (std::size_t k = 0; k <= H; ++k) {
    const auto zk = z[k % H];
    const auto zc = std::conj(z[(H - k) % H]);
    const auto even = 0.5 * (zk + zc);
    const auto odd = std::complex<double>(0.0, -0.5) * (zk - zc);
    const auto X = even + twiddles_[N / 4 + k] * odd;
    power[k] = std::norm(X);
  }
  return power;
}

std::vector<double> MfccExtractor::mel_energies(std::span<const double> power) const {
  std::vector<double> e(filters_.size(), 0.0);
  for (std::size_t m = 0; m < filters_.size(); ++m) {
    const auto& w = filters_[m].weights;
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size() && k < power.size(); ++k) acc += w[k] * power[k];
    e[m] = acc;
  }
  return e;
}

std::vector<double> MfccExtractor::log_mel(std::span<const double> energies) const {
  std::vector<double> out(energies.size());
  for (std::size_t m = 0; m < energies.size(); ++m) out[m] = std::log(std::max(energies[m], cfg_.log_floor));
  return out;
}

std::vector<double> MfccExtractor::dct(std::span<const double> x) const {
  const auto M = static_cast<std::size_t>(cfg_.n_mel);
  const auto K = static_cast<std::size_t>(cfg_.n_ceps);
  std::vector<double> c(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    double acc = 0.0;
    for (std::size_t m = 0; m < M; ++m) acc += x[m] * dct_table_[k * M + m];
    c[k] = acc;
  }
  return c;
}

Matrix MfccExtractor::compute(std::span<const std::int16_t> samples) const {
  const auto n_frames = frame_count(samples.size());
  if (n_frames == 0) {
    throw Error(ErrorCode::WindowTooShort, std::to_string(samples.size()) + " samples, need at least " +
                                               std::to_string(cfg_.frame_len));
  }
  Matrix out;
  out.rows = n_frames;
  out.cols = static_cast<std::size_t>(cfg_.n_ceps);
  out.data.resize(out.rows * out.cols);
  const auto L = static_cast<std::size_t>(cfg_.frame_len);
  const auto hop = static_cast<std::size_t>(cfg_.hop);
  for (std::size_t f = 0; f < n_frames; ++f) {
    const auto power = power_spectrum(samples.subspan(f * hop, L));
    const auto ceps = dct(log_mel(mel_energies(power)));
    std::copy(ceps.begin(), ceps.end(), out.data.begin() + static_cast<std::ptrdiff_t>(f * out.cols));
  }
  return out;
}

Matrix mfcc(std::span<const std::int16_t> samples, const MfccConfig& cfg) {
  return MfccExtractor(cfg).compute(samples);
}

}  // namespace bustop
