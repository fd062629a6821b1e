#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace bustop {

struct MfccConfig {
  int sample_rate = 8000;
  int frame_len = 200;  // 25 ms
  int hop = 80;         // 10 ms
  int fft_size = 256;
  int n_mel = 26;
  int n_ceps = 13;
  double f_low = 0.0;
  double f_high = 4000.0;
  double log_floor = 1e-10;

  void validate() const;
};

// Row-major frames x coefficients.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

struct MelFilter {
  double lower_hz = 0, center_hz = 0, upper_hz = 0;
  std::vector<double> weights;  // one per spectrum bin 0..fft_size/2
};

std::vector<MelFilter> mel_filterbank(const MfccConfig& cfg);

// Precomputes window, filterbank and DCT table once per configuration.
class MfccExtractor {
 public:
  explicit MfccExtractor(MfccConfig cfg);

  const MfccConfig& config() const { return cfg_; }
  const std::vector<MelFilter>& filters() const { return filters_; }

  std::size_t frame_count(std::size_t n_samples) const;

  // |DFT|^2 of one Hamming-windowed, zero-padded frame; fft_size/2+1 bins.
  std::vector<double> power_spectrum(std::span<const std::int16_t> frame) const;
  std::vector<double> mel_energies(std::span<const double> power) const;
  // Natural log with floor.
  std::vector<double> log_mel(std::span<const double> energies) const;
  // Unnormalised DCT-II, first n_ceps terms: c_k = sum_m x_m cos(pi k (m + 1/2) / M).
  std::vector<double> dct(std::span<const double> log_energies) const;

  // Throws Error(WindowTooShort) if fewer than frame_len samples.
  Matrix compute(std::span<const std::int16_t> samples) const;

 private:
  void fft(std::vector<std::complex<double>>& a) const;

  MfccConfig cfg_;
  std::vector<double> window_;
  std::vector<MelFilter> filters_;
  std::vector<double> dct_table_;  // n_ceps x n_mel
  std::vector<std::complex<double>> twiddles_;
};

Matrix mfcc(std::span<const std::int16_t> samples, const MfccConfig& cfg = {});

}  // namespace bustop
