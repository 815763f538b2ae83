#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace ccs {

// Radix-2 FFT for the cyclic convolutions of the check nodes. Lengths are
// powers of two. Real transforms ride on a half-length complex pass, so a
// length-N real transform costs one length-N/2 complex FFT plus O(N).
// A plan is immutable once built; scratch is caller-owned so one plan can
// serve several threads.
class RealFft {
 public:
  explicit RealFft(size_t n);  // n: power of two, >= 2

  size_t size() const { return n_; }
  size_t bins() const { return n_ / 2 + 1; }
  size_t scratch_size() const { return n_ / 2; }

  // out has bins() entries; scratch has scratch_size() entries.
  void forward(std::span<const double> in, std::span<std::complex<double>> out,
               std::span<std::complex<double>> scratch) const;
  // Inverse including the 1/n factor, assuming a spectrum of real data.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out,
               std::span<std::complex<double>> scratch) const;

 private:
  void complex_fft(std::span<std::complex<double>> data, bool invert) const;

  size_t n_;       // real length
  size_t half_;    // complex length
  std::vector<std::complex<double>> twiddle_;  // e^{-2pi i j / half}, j < half/2
  std::vector<std::complex<double>> unpack_;   // e^{-2pi i k / n},   k <= half
  std::vector<uint32_t> bitrev_;
};

}  // namespace ccs
