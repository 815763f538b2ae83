#include "ccs/outer_code.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ccs {

OuterGraph OuterGraph::ring(int num_sections, int section_bits) {
  if (num_sections < 4 || num_sections % 2 != 0)
    throw std::invalid_argument("OuterGraph: need an even section count >= 4, got " +
                                std::to_string(num_sections));
  if (section_bits < 1 || section_bits > 26)
    throw std::invalid_argument("OuterGraph: section bits must be in [1, 26]");
  OuterGraph g;
  g.num_sections = num_sections;
  g.section_bits = section_bits;
  int info = num_sections / 2;
  g.checks.reserve(size_t(info));
  for (int i = 0; i < info; ++i) g.checks.push_back({i, (i + 1) % info, info + i});
  return g;
}

OuterGraph OuterGraph::edgeless(int num_sections, int section_bits) {
  OuterGraph g = ring(num_sections, section_bits);
  g.checks.clear();
  return g;
}

namespace {

uint32_t read_chunk(const Payload& payload, int chunk, int bits) {
  uint32_t value = 0;
  size_t bit0 = size_t(chunk) * size_t(bits);
  for (int b = 0; b < bits; ++b) {
    size_t bit = bit0 + size_t(b);
    value = (value << 1) | uint32_t((payload[bit >> 3] >> (7 - (bit & 7))) & 1);
  }
  return value;
}

void write_chunk(Payload& payload, int chunk, int bits, uint32_t value) {
  size_t bit0 = size_t(chunk) * size_t(bits);
  for (int b = 0; b < bits; ++b) {
    size_t bit = bit0 + size_t(b);
    uint8_t mask = uint8_t(1u << (7 - (bit & 7)));
    if ((value >> (bits - 1 - b)) & 1)
      payload[bit >> 3] |= mask;
    else
      payload[bit >> 3] &= uint8_t(~mask);
  }
}

}  // namespace

SectionValues encode(const Payload& payload, const OuterGraph& graph) {
  if (int(payload.size()) != graph.payload_bytes())
    throw std::invalid_argument("encode: payload must be " +
                                std::to_string(graph.payload_bytes()) + " bytes, got " +
                                std::to_string(payload.size()));
  SectionValues values(size_t(graph.num_sections), 0);
  for (int i = 0; i < graph.info_count(); ++i)
    values[size_t(i)] = read_chunk(payload, i, graph.section_bits);
  uint32_t mask = uint32_t((size_t(1) << graph.section_bits) - 1);
  for (const Check& c : graph.checks)
    values[size_t(c.parity)] = (values[size_t(c.op_a)] + values[size_t(c.op_b)]) & mask;
  return values;
}

Payload payload_from_sections(const SectionValues& values, const OuterGraph& graph) {
  Payload payload(size_t(graph.payload_bytes()), 0);
  for (int i = 0; i < graph.info_count(); ++i)
    write_chunk(payload, i, graph.section_bits, values[size_t(i)]);
  return payload;
}

bool checks_satisfied(const SectionValues& values, const OuterGraph& graph) {
  uint32_t mask = uint32_t((size_t(1) << graph.section_bits) - 1);
  for (const Check& c : graph.checks)
    if (values[size_t(c.parity)] != ((values[size_t(c.op_a)] + values[size_t(c.op_b)]) & mask))
      return false;
  return true;
}

std::vector<size_t> index_map(const SectionValues& values, const OuterGraph& graph) {
  if (int(values.size()) != graph.num_sections)
    throw std::invalid_argument("index_map: expected " + std::to_string(graph.num_sections) +
                                " section values");
  std::vector<size_t> indices(values.size());
  for (size_t l = 0; l < values.size(); ++l) {
    if (values[l] >= graph.section_len())
      throw std::invalid_argument("index_map: section value out of range");
    indices[l] = l * graph.section_len() + values[l];
  }
  return indices;
}

namespace {

void validate_belief(std::span<const double> mu, const char* name) {
  double sum = 0.0;
  for (double v : mu) sum += v;
  if (std::abs(sum - 1.0) > 1e-6)
    throw std::invalid_argument(std::string("check_to_var: ") + name +
                                " is not normalized (sum " + std::to_string(sum) + ")");
}

// Clamp FFT round-off negatives and renormalize in place.
void clamp_normalize(std::span<double> msg) {
  double sum = 0.0;
  for (double& v : msg) {
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  if (sum <= 0.0) {
    double u = 1.0 / double(msg.size());
    for (double& v : msg) v = u;
    return;
  }
  double inv = 1.0 / sum;
  for (double& v : msg) v *= inv;
}

}  // namespace

std::vector<double> check_to_var(std::span<const double> mu1, std::span<const double> mu2,
                                 CheckDirection direction) {
  size_t n = mu1.size();
  if (n != mu2.size() || n < 2 || (n & (n - 1)) != 0)
    throw std::invalid_argument("check_to_var: messages must share a power-of-two length >= 2");
  validate_belief(mu1, "mu1");
  validate_belief(mu2, "mu2");

  RealFft fft(n);
  std::vector<std::complex<double>> a(fft.bins()), b(fft.bins()), scratch(fft.scratch_size());
  fft.forward(mu1, a, scratch);
  fft.forward(mu2, b, scratch);
  if (direction == CheckDirection::ToParity) {
    for (size_t k = 0; k < a.size(); ++k) a[k] *= b[k];
  } else {
    // cross-correlation: out(k) = sum_j mu1(j) mu2(k + j)
    for (size_t k = 0; k < a.size(); ++k) a[k] = std::conj(a[k]) * b[k];
  }
  std::vector<double> out(n);
  fft.inverse(a, out, scratch);
  clamp_normalize(out);
  return out;
}

BpWorkspace::BpWorkspace(const OuterGraph& graph)
    : fft(graph.section_len()),
      lambda(graph.width()),
      spectra(size_t(graph.num_sections) * fft.bins()),
      messages(3 * graph.checks.size() * graph.section_len()),
      product_scratch(std::max<size_t>(graph.checks.size(), 1) * fft.bins()),
      fft_scratch(std::max<size_t>(size_t(graph.num_sections), graph.checks.size()) *
                  fft.scratch_size()) {}

void bp_denoise(std::span<const double> r, std::span<const double> tau_per_section,
                std::span<const double> amplitude, int num_users, const OuterGraph& graph,
                BpWorkspace& ws, std::span<double> q_out, ThreadPool* pool) {
  size_t sec_len = graph.section_len();
  size_t sections = size_t(graph.num_sections);
  if (r.size() != graph.width()) throw std::invalid_argument("bp_denoise: r has wrong length");
  if (q_out.size() != graph.width())
    throw std::invalid_argument("bp_denoise: output has wrong length");
  if (tau_per_section.size() != sections || amplitude.size() != sections)
    throw std::invalid_argument("bp_denoise: need one tau and one amplitude per section");
  for (double t : tau_per_section)
    if (!(t > 0.0)) throw std::invalid_argument("bp_denoise: tau must be positive");
  if (num_users < 1) throw std::invalid_argument("bp_denoise: need at least one user");

  size_t bins = ws.fft.bins();
  size_t scratch_len = ws.fft.scratch_size();

  // Local observations are the per-entry PME under the flat activity
  // prior; the saturation keeps one lucky entry from swallowing a whole
  // section's belief mass. Normalized per section, then transformed.
  double flat_prior = -std::expm1(double(num_users) * std::log1p(-std::ldexp(1.0, -graph.section_bits)));
  double log_odds = std::log(flat_prior / (1.0 - flat_prior));
  parallel_for(pool, sections, [&](size_t l) {
    std::span<const double> r_l = r.subspan(l * sec_len, sec_len);
    std::span<double> lam = std::span<double>(ws.lambda).subspan(l * sec_len, sec_len);
    double d = amplitude[l];
    double inv_tau2 = 1.0 / (tau_per_section[l] * tau_per_section[l]);
    double half_d2 = 0.5 * d * d;
    double max_w = 0.0;
    for (size_t k = 0; k < sec_len; ++k) {
      double t = (d * r_l[k] - half_d2) * inv_tau2 + log_odds;
      double w = t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
      lam[k] = w;
      if (w > max_w) max_w = w;
    }
    // dividing by the max first keeps equal-weight sections exactly uniform
    if (max_w <= 0.0) {
      double u = 1.0 / double(sec_len);
      for (size_t k = 0; k < sec_len; ++k) lam[k] = u;
    } else {
      double sum = 0.0;
      for (size_t k = 0; k < sec_len; ++k) {
        lam[k] /= max_w;  // x/x is exact, so equal weights stay exactly equal
        sum += lam[k];
      }
      double inv = 1.0 / sum;
      for (size_t k = 0; k < sec_len; ++k) lam[k] *= inv;
    }
    ws.fft.forward(lam, std::span<std::complex<double>>(ws.spectra).subspan(l * bins, bins),
                   std::span<std::complex<double>>(ws.fft_scratch).subspan(l * scratch_len,
                                                                           scratch_len));
  });

  // Check messages: to parity = conv(op_a, op_b); to an operand = the
  // cross-correlation of the other operand with the parity.
  parallel_for(pool, graph.checks.size(), [&](size_t c) {
    const Check& check = graph.checks[c];
    auto spectrum = [&](int section) {
      return std::span<const std::complex<double>>(ws.spectra).subspan(size_t(section) * bins,
                                                                       bins);
    };
    std::span<std::complex<double>> prod =
        std::span<std::complex<double>>(ws.product_scratch).subspan(c * bins, bins);
    std::span<std::complex<double>> scratch =
        std::span<std::complex<double>>(ws.fft_scratch).subspan(c * scratch_len, scratch_len);
    auto msg = [&](size_t slot) {
      return std::span<double>(ws.messages).subspan((3 * c + slot) * sec_len, sec_len);
    };

    std::span<const std::complex<double>> sa = spectrum(check.op_a);
    std::span<const std::complex<double>> sb = spectrum(check.op_b);
    std::span<const std::complex<double>> sp = spectrum(check.parity);

    for (size_t k = 0; k < bins; ++k) prod[k] = sa[k] * sb[k];
    ws.fft.inverse(prod, msg(0), scratch);  // to parity
    clamp_normalize(msg(0));

    for (size_t k = 0; k < bins; ++k) prod[k] = std::conj(sb[k]) * sp[k];
    ws.fft.inverse(prod, msg(1), scratch);  // to op_a
    clamp_normalize(msg(1));

    for (size_t k = 0; k < bins; ++k) prod[k] = std::conj(sa[k]) * sp[k];
    ws.fft.inverse(prod, msg(2), scratch);  // to op_b
    clamp_normalize(msg(2));
  });

  // Extrinsic beliefs: product of incoming check messages per section
  // (check order fixed for determinism), normalized, then q = min(1, K*beta).
  parallel_for(pool, sections, [&](size_t l) {
    std::span<double> q_l = q_out.subspan(l * sec_len, sec_len);
    bool any = false;
    for (size_t c = 0; c < graph.checks.size(); ++c) {
      const Check& check = graph.checks[c];
      size_t slot;
      if (size_t(check.parity) == l)
        slot = 0;
      else if (size_t(check.op_a) == l)
        slot = 1;
      else if (size_t(check.op_b) == l)
        slot = 2;
      else
        continue;
      std::span<const double> m =
          std::span<const double>(ws.messages).subspan((3 * c + slot) * sec_len, sec_len);
      if (!any) {
        std::memcpy(q_l.data(), m.data(), sec_len * sizeof(double));
        any = true;
      } else {
        for (size_t k = 0; k < sec_len; ++k) q_l[k] *= m[k];
      }
    }
    if (!any) {
      double u = 1.0 / double(sec_len);
      for (size_t k = 0; k < sec_len; ++k) q_l[k] = u;
    } else {
      clamp_normalize(q_l);
    }
    double users = double(num_users);
    for (size_t k = 0; k < sec_len; ++k) {
      double q = users * q_l[k];
      q_l[k] = q > 1.0 ? 1.0 : q;
    }
  });
}

std::vector<double> bp_denoise(std::span<const double> r, double tau,
                               std::span<const double> amplitude, int num_users,
                               const OuterGraph& graph) {
  if (!(tau > 0.0)) throw std::invalid_argument("bp_denoise: tau must be positive");
  std::vector<double> taus(size_t(graph.num_sections), tau);
  BpWorkspace ws(graph);
  std::vector<double> q(graph.width());
  bp_denoise(r, taus, amplitude, num_users, graph, ws, q);
  return q;
}

namespace {

struct BeamCandidate {
  std::vector<uint32_t> info_values;
  double score = 0.0;
};

bool candidate_less(const BeamCandidate& a, const BeamCandidate& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.info_values < b.info_values;
}

}  // namespace

std::vector<Payload> stitch(std::span<const double> shat, const OuterGraph& graph, int num_users,
                            int list_size, int beam_cap) {
  size_t sec_len = graph.section_len();
  if (shat.size() != graph.width()) throw std::invalid_argument("stitch: shat has wrong length");
  if (num_users < 1 || graph.checks.empty()) return {};
  size_t top = std::min<size_t>(size_t(std::max(list_size, 1)), sec_len);
  size_t cap = size_t(std::max(beam_cap, 1));

  // Per-section top lists by value, ties to the lower index.
  int sections = graph.num_sections;
  std::vector<std::vector<uint32_t>> top_list(static_cast<size_t>(sections));
  std::vector<std::vector<uint8_t>> in_top(static_cast<size_t>(sections));
  for (int l = 0; l < sections; ++l) {
    std::span<const double> sec = shat.subspan(size_t(l) * sec_len, sec_len);
    std::vector<uint32_t> idx(sec_len);
    std::iota(idx.begin(), idx.end(), 0u);
    auto better = [&](uint32_t a, uint32_t b) {
      if (sec[a] != sec[b]) return sec[a] > sec[b];
      return a < b;
    };
    std::nth_element(idx.begin(), idx.begin() + long(top) - 1, idx.end(), better);
    idx.resize(top);
    std::sort(idx.begin(), idx.end(), better);
    in_top[size_t(l)].assign(sec_len, 0);
    for (uint32_t v : idx) in_top[size_t(l)][v] = 1;
    top_list[size_t(l)] = std::move(idx);
  }

  // Checks fire as soon as both operands are fixed by the beam.
  int info = graph.info_count();
  std::vector<std::vector<const Check*>> fires_at(static_cast<size_t>(info));
  for (const Check& c : graph.checks) fires_at[size_t(std::max(c.op_a, c.op_b))].push_back(&c);

  uint32_t mask = uint32_t(sec_len - 1);
  auto value_at = [&](int section, uint32_t v) {
    return shat[size_t(section) * sec_len + v];
  };

  std::vector<BeamCandidate> beam;
  for (uint32_t v : top_list[0]) beam.push_back({{v}, value_at(0, v)});
  if (beam.size() > cap) {
    std::nth_element(beam.begin(), beam.begin() + long(cap) - 1, beam.end(), candidate_less);
    beam.resize(cap);
  }

  std::vector<BeamCandidate> next;
  for (int j = 1; j < info; ++j) {
    next.clear();
    for (const BeamCandidate& cand : beam) {
      for (uint32_t v : top_list[size_t(j)]) {
        double score = cand.score + value_at(j, v);
        bool ok = true;
        // parity membership for every check completed by fixing section j
        double parity_score = 0.0;
        for (const Check* c : fires_at[size_t(j)]) {
          uint32_t va = c->op_a == j ? v : cand.info_values[size_t(c->op_a)];
          uint32_t vb = c->op_b == j ? v : cand.info_values[size_t(c->op_b)];
          uint32_t vp = (va + vb) & mask;
          if (!in_top[size_t(c->parity)][vp]) {
            ok = false;
            break;
          }
          parity_score += value_at(c->parity, vp);
        }
        if (!ok) continue;
        BeamCandidate ext;
        ext.info_values = cand.info_values;
        ext.info_values.push_back(v);
        ext.score = score + parity_score;
        next.push_back(std::move(ext));
      }
    }
    if (next.size() > cap) {
      std::nth_element(next.begin(), next.begin() + long(cap) - 1, next.end(), candidate_less);
      next.resize(cap);
    }
    beam.swap(next);
  }

  std::sort(beam.begin(), beam.end(), candidate_less);
  std::vector<Payload> out;
  for (const BeamCandidate& cand : beam) {
    if (int(out.size()) >= num_users) break;
    if (cand.score <= 0.0) break;  // sorted, so the rest are zero too
    SectionValues values(size_t(graph.num_sections), 0);
    for (int i = 0; i < info; ++i) values[size_t(i)] = cand.info_values[size_t(i)];
    out.push_back(payload_from_sections(values, graph));
  }
  return out;
}

}  // namespace ccs
