#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ccs/fft.hpp"
#include "ccs/parallel.hpp"

namespace ccs {

// Message bits, most significant chunk first; (L/2)*v bits total.
using Payload = std::vector<uint8_t>;

// value(parity) = value(op_a) + value(op_b) mod 2^v
struct Check {
  int op_a;
  int op_b;
  int parity;
};

// Degree-3 ring code over Z_{2^v}: info sections 0..L/2-1 carry the payload,
// parity sections L/2..L-1 close the checks. Check i ties info i and info
// (i+1 mod L/2) to parity L/2+i, so every info section sits in exactly two
// checks and every parity section in exactly one.
struct OuterGraph {
  int num_sections = 0;  // L
  int section_bits = 0;  // v
  std::vector<Check> checks;

  static OuterGraph ring(int num_sections, int section_bits);
  // Same sections, no checks; belief propagation degenerates to the
  // uninformative prior.
  static OuterGraph edgeless(int num_sections, int section_bits);

  int info_count() const { return num_sections / 2; }
  size_t section_len() const { return size_t(1) << section_bits; }
  size_t width() const { return size_t(num_sections) << section_bits; }
  int payload_bits() const { return info_count() * section_bits; }
  int payload_bytes() const { return payload_bits() / 8; }
};

using SectionValues = std::vector<uint32_t>;

// Payload -> L section values; info sections take consecutive v-bit chunks
// (big-endian chunk order), parities follow from the checks.
SectionValues encode(const Payload& payload, const OuterGraph& graph);

// Inverse of the info half of encode.
Payload payload_from_sections(const SectionValues& values, const OuterGraph& graph);

// True when every check is satisfied.
bool checks_satisfied(const SectionValues& values, const OuterGraph& graph);

// Per-section support indices: l * 2^v + value(l).
std::vector<size_t> index_map(const SectionValues& values, const OuterGraph& graph);

enum class CheckDirection { ToParity, ToOperand };

// One check-node update on normalized beliefs. ToParity convolves the two
// operand messages cyclically; ToOperand cross-correlates the other
// operand's message (mu1) with the parity message (mu2). FFT-based, output
// clamped at zero and renormalized.
std::vector<double> check_to_var(std::span<const double> mu1, std::span<const double> mu2,
                                 CheckDirection direction);

// Scratch for bp_denoise: FFT plan, per-section spectra, per-check messages.
struct BpWorkspace {
  explicit BpWorkspace(const OuterGraph& graph);

  RealFft fft;
  std::vector<double> lambda;                          // local beliefs, width
  std::vector<std::complex<double>> spectra;           // per section, bins each
  std::vector<double> messages;                        // 3 per check, section_len each
  std::vector<std::complex<double>> product_scratch;   // per check, bins
  std::vector<std::complex<double>> fft_scratch;       // per section, n/2
};

// One round of belief propagation seeded with local observations. Each
// entry's observation is its posterior mean estimate under the flat
// activity prior 1-(1-2^-v)^K; the saturation keeps a single strong entry
// from swallowing a section's belief mass. Variable-to-check messages are
// the normalized local beliefs (no prior check messages in a single
// round); check-to-variable messages come from check_to_var; the extrinsic
// belief is the product over each section's incoming check messages;
// q = min(1, K * beta).
void bp_denoise(std::span<const double> r, std::span<const double> tau_per_section,
                std::span<const double> amplitude, int num_users, const OuterGraph& graph,
                BpWorkspace& ws, std::span<double> q_out, ThreadPool* pool = nullptr);

// Allocating convenience with one pooled tau, as used by the dense cases.
std::vector<double> bp_denoise(std::span<const double> r, double tau,
                               std::span<const double> amplitude, int num_users,
                               const OuterGraph& graph);

// Disambiguation: per-section top lists by shat value (ties to the lower
// index), then a beam over the info sections that prunes any candidate whose
// implied parity leaves its top list. Returns at most num_users payloads,
// highest accumulated shat score first; zero-score candidates are dropped.
std::vector<Payload> stitch(std::span<const double> shat, const OuterGraph& graph, int num_users,
                            int list_size, int beam_cap);

}  // namespace ccs
