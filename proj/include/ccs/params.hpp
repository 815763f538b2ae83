#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ccs {

// Scalar configuration of one experiment instance.
struct SystemParams {
  int num_users = 100;     // K, active devices
  int payload_bits = 128;  // w, bits per message
  int num_sections = 16;   // L
  int section_bits = 16;   // v, bits per section
  int num_rows = 38400;    // n, channel uses
  int amp_iters = 10;      // T
  int list_size = 0;       // 0 = ceil(1.15 K), see effective_list_size
  int beam_cap = 0;        // 0 = 4 * num_users

  size_t section_len() const { return size_t(1) << section_bits; }
  size_t width() const { return size_t(num_sections) << section_bits; }
  int rows_per_section() const { return num_rows / num_sections; }
  // With exactly K slots every noise intrusion evicts a true value; a 15%
  // margin absorbs the handful of Gaussian-tail intruders per section.
  int effective_list_size() const {
    return list_size > 0 ? list_size : (num_users * 23 + 19) / 20;
  }
  int effective_beam_cap() const { return beam_cap > 0 ? beam_cap : 4 * num_users; }
  int payload_bytes() const { return payload_bits / 8; }

  // Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

// Per-section amplitudes (the diagonal of D collapsed to one value per
// section) plus the energy bookkeeping behind them.
struct PowerProfile {
  std::vector<double> amplitude;  // d_l
  double symbol_energy = 0.0;     // P
  double ebn0_db = 0.0;

  // P = (2w/n) * 10^(ebn0_db/10), d_l = sqrt(nP/L) for every section.
  static PowerProfile uniform(const SystemParams& params, double ebn0_db);

  // n * P, equal to the sum of squared amplitudes.
  double total_energy() const;
};

}  // namespace ccs
