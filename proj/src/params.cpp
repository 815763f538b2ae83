#include "ccs/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ccs {

void SystemParams::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };

  if (num_users < 1) fail("k must be at least 1");
  if (num_sections < 2 || num_sections % 2 != 0)
    fail("l must be an even number of sections, got " + std::to_string(num_sections));
  if (section_bits < 1 || section_bits > 26)
    fail("v must be in [1, 26], got " + std::to_string(section_bits));
  if (num_rows < 1) fail("n must be positive");
  if (num_rows % num_sections != 0)
    fail("n must be divisible by l (" + std::to_string(num_rows) + " vs " +
         std::to_string(num_sections) + ")");
  int expected_w = (num_sections / 2) * section_bits;
  if (payload_bits != expected_w)
    fail("w must equal (l/2)*v = " + std::to_string(expected_w) + ", got " +
         std::to_string(payload_bits));
  if (payload_bits % 8 != 0)
    fail("payload length (l/2)*v must be a whole number of bytes, got " +
         std::to_string(payload_bits) + " bits");
  if (amp_iters < 1) fail("iters must be at least 1");
  if (list_size < 0) fail("list-size must be nonnegative");
  if (beam_cap < 0) fail("beam-cap must be nonnegative");
}

PowerProfile PowerProfile::uniform(const SystemParams& params, double ebn0_db) {
  PowerProfile profile;
  profile.ebn0_db = ebn0_db;
  profile.symbol_energy =
      (2.0 * params.payload_bits / params.num_rows) * std::pow(10.0, ebn0_db / 10.0);
  double per_section = params.num_rows * profile.symbol_energy / params.num_sections;
  profile.amplitude.assign(params.num_sections, std::sqrt(per_section));
  return profile;
}

double PowerProfile::total_energy() const {
  double acc = 0.0;
  for (double d : amplitude) acc += d * d;
  return acc;
}

}  // namespace ccs
