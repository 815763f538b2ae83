#include "ccs/channel.hpp"

#include <chrono>
#include <cmath>
#include <set>
#include <stdexcept>

#include "ccs/rng.hpp"

namespace ccs {

std::vector<double> aggregate_counts(const std::vector<Payload>& payloads,
                                     const OuterGraph& graph) {
  std::vector<double> counts(graph.width(), 0.0);
  for (const Payload& p : payloads)
    for (size_t idx : index_map(encode(p, graph), graph)) counts[idx] += 1.0;
  return counts;
}

Trial gen_trial(const SystemParams& params, const PowerProfile& profile, const OuterGraph& graph,
                const SensingOperator& op, uint64_t seed, bool noiseless) {
  Trial trial;
  trial.seed = seed;

  CounterRng payload_rng(seed, rng_stream::kPayload);
  std::set<Payload> seen;
  size_t bytes = size_t(params.payload_bytes());
  while (int(trial.payloads.size()) < params.num_users) {
    Payload p(bytes);
    for (auto& b : p) b = uint8_t(payload_rng.next_u64() & 0xff);
    if (seen.insert(p).second) trial.payloads.push_back(std::move(p));
  }

  std::vector<double> x = aggregate_counts(trial.payloads, graph);
  size_t sec_len = params.section_len();
  for (int l = 0; l < params.num_sections; ++l) {
    double d = profile.amplitude[size_t(l)];
    for (size_t k = size_t(l) * sec_len; k < size_t(l + 1) * sec_len; ++k) x[k] *= d;
  }

  trial.y = op.forward(x);
  if (!noiseless) {
    CounterRng noise_rng(seed, rng_stream::kNoise);
    for (double& v : trial.y) v += noise_rng.next_gaussian();
  }
  return trial;
}

ErrorReport pupe(const std::vector<Payload>& tx, const std::vector<Payload>& rx) {
  if (tx.empty()) throw std::invalid_argument("pupe: transmitted list is empty");
  if (rx.size() > tx.size())
    throw std::invalid_argument("pupe: decoded list exceeds the K-sparsity constraint");
  std::set<Payload> tx_set(tx.begin(), tx.end());
  std::set<Payload> rx_set(rx.begin(), rx.end());
  ErrorReport report;
  report.decoded_count = int(rx.size());
  for (const Payload& p : tx_set)
    if (!rx_set.count(p)) ++report.missed;
  for (const Payload& p : rx_set)
    if (!tx_set.count(p)) ++report.false_alarms;
  report.pupe = double(report.missed) / double(tx_set.size());
  return report;
}

PointResult run_point(int case_id, double ebn0_db, int trials, uint64_t base_seed,
                      const SystemParams& params, ThreadPool* pool, bool noiseless) {
  if (trials < 1) throw std::invalid_argument("run_point: need at least one trial");
  params.validate();

  PowerProfile profile = PowerProfile::uniform(params, ebn0_db);
  OuterGraph graph = OuterGraph::ring(params.num_sections, params.section_bits);
  SensingOperator op = make_operator(kind_for_case(case_id), params, base_seed);

  DenoiserSpec denoiser;
  if (case_id == 1 || case_id == 2) {
    denoiser.kind = DenoiserSpec::Separable;
    denoiser.q_flat = separable_prior(params);
  } else {
    denoiser.kind = DenoiserSpec::Bp;
  }

  AmpEngine engine(op, profile, graph, params, pool);
  double pupe_sum = 0.0;
  double seconds_sum = 0.0;
  for (int i = 0; i < trials; ++i) {
    Trial trial = gen_trial(params, profile, graph, op, base_seed + uint64_t(i), noiseless);
    auto t0 = std::chrono::steady_clock::now();
    const std::vector<double>& shat = engine.run(trial.y, denoiser, params.amp_iters);
    std::vector<Payload> decoded = stitch(shat, graph, params.num_users,
                                          params.effective_list_size(),
                                          params.effective_beam_cap());
    auto t1 = std::chrono::steady_clock::now();
    seconds_sum += std::chrono::duration<double>(t1 - t0).count();
    pupe_sum += pupe(trial.payloads, decoded).pupe;
  }

  PointResult result;
  result.mean_pupe = pupe_sum / double(trials);
  result.stderr_pupe =
      trials > 1 ? std::sqrt(result.mean_pupe * (1.0 - result.mean_pupe) / double(trials)) : 0.0;
  result.mean_decode_seconds = seconds_sum / double(trials);
  return result;
}

}  // namespace ccs
