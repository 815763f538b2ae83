#include "ccs/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ccs {

RealFft::RealFft(size_t n) : n_(n), half_(n / 2) {
  if (n < 2 || (n & (n - 1)) != 0)
    throw std::invalid_argument("RealFft: length must be a power of two >= 2, got " +
                                std::to_string(n));
  twiddle_.resize(half_ / 2);
  for (size_t j = 0; j < twiddle_.size(); ++j) {
    double a = -2.0 * std::numbers::pi * double(j) / double(half_);
    twiddle_[j] = {std::cos(a), std::sin(a)};
  }
  unpack_.resize(half_ + 1);
  for (size_t k = 0; k <= half_; ++k) {
    double a = -2.0 * std::numbers::pi * double(k) / double(n_);
    unpack_[k] = {std::cos(a), std::sin(a)};
  }
  bitrev_.resize(half_);
  int bits = 0;
  while ((size_t(1) << bits) < half_) ++bits;
  for (size_t i = 0; i < half_; ++i) {
    size_t r = 0;
    for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1) << (bits - 1 - b);
    bitrev_[i] = uint32_t(r);
  }
}

void RealFft::complex_fft(std::span<std::complex<double>> data, bool invert) const {
  size_t m = half_;
  if (m == 1) return;
  if (invert)
    for (auto& v : data) v = std::conj(v);
  for (size_t i = 0; i < m; ++i) {
    size_t r = bitrev_[i];
    if (i < r) std::swap(data[i], data[r]);
  }
  for (size_t len = 2; len <= m; len <<= 1) {
    size_t stride = m / len;
    size_t half_len = len / 2;
    for (size_t base = 0; base < m; base += len) {
      for (size_t j = 0; j < half_len; ++j) {
        std::complex<double> w = twiddle_[j * stride];
        std::complex<double> u = data[base + j];
        std::complex<double> t = data[base + j + half_len] * w;
        data[base + j] = u + t;
        data[base + j + half_len] = u - t;
      }
    }
  }
  if (invert) {
    double inv = 1.0 / double(m);
    for (auto& v : data) v = std::conj(v) * inv;
  }
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out,
                      std::span<std::complex<double>> scratch) const {
  for (size_t k = 0; k < half_; ++k) scratch[k] = {in[2 * k], in[2 * k + 1]};
  complex_fft(scratch.subspan(0, half_), false);
  out[0] = {scratch[0].real() + scratch[0].imag(), 0.0};
  out[half_] = {scratch[0].real() - scratch[0].imag(), 0.0};
  for (size_t k = 1; k < half_; ++k) {
    std::complex<double> zk = scratch[k];
    std::complex<double> zmk = std::conj(scratch[half_ - k]);
    std::complex<double> even = 0.5 * (zk + zmk);
    std::complex<double> odd = std::complex<double>(0.0, -0.5) * (zk - zmk);
    out[k] = even + unpack_[k] * odd;
  }
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out,
                      std::span<std::complex<double>> scratch) const {
  for (size_t k = 0; k < half_; ++k) {
    std::complex<double> xk = in[k];
    std::complex<double> xmk = std::conj(in[half_ - k]);
    std::complex<double> even = 0.5 * (xk + xmk);
    std::complex<double> odd = 0.5 * std::conj(unpack_[k]) * (xk - xmk);
    scratch[k] = even + std::complex<double>(0.0, 1.0) * odd;
  }
  complex_fft(scratch.subspan(0, half_), true);
  for (size_t k = 0; k < half_; ++k) {
    out[2 * k] = scratch[k].real();
    out[2 * k + 1] = scratch[k].imag();
  }
}

}  // namespace ccs
