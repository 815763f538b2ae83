#include "ccs/amp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ccs {

double pme(double r, double d, double tau, double q) {
  if (q <= 0.0) return 0.0;
  if (q >= 1.0) return 1.0;
  // log-odds of activity; logistic form keeps both tails finite
  double t = (d * r - 0.5 * d * d) / (tau * tau) + std::log(q / (1.0 - q));
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

double onsager_coefficient_section(std::span<const double> s_section, double amplitude,
                                   double tau_prev, size_t n_rows) {
  double acc = 0.0;
  for (double v : s_section) acc += v - v * v;
  return amplitude * amplitude * acc / (double(n_rows) * tau_prev * tau_prev);
}

double onsager_coefficient(std::span<const double> s, const PowerProfile& profile,
                           double tau_prev, size_t n_rows) {
  size_t sections = profile.amplitude.size();
  size_t sec_len = s.size() / sections;
  double acc = 0.0;
  for (size_t l = 0; l < sections; ++l) {
    double d2 = profile.amplitude[l] * profile.amplitude[l];
    double part = 0.0;
    for (double v : s.subspan(l * sec_len, sec_len)) part += v - v * v;
    acc += d2 * part;
  }
  return acc / (double(n_rows) * tau_prev * tau_prev);
}

double tau_update(std::span<const double> z, size_t n_rows) {
  if (n_rows == 0) throw std::invalid_argument("tau_update: need at least one row");
  double ssq = 0.0;
  for (double v : z) ssq += v * v;
  double tau = std::sqrt(ssq / double(n_rows));
  return tau < 1e-12 ? 1e-12 : tau;
}

double separable_prior(const SystemParams& params) {
  double per_value = std::ldexp(1.0, -params.section_bits);  // 2^-v
  return -std::expm1(double(params.num_users) * std::log1p(-per_value));
}

AmpEngine::AmpEngine(const SensingOperator& op, const PowerProfile& profile,
                     const OuterGraph& graph, const SystemParams& params, ThreadPool* pool)
    : op_(op), profile_(profile), graph_(graph), params_(params), pool_(pool) {
  if (op_.width() != params_.width())
    throw std::invalid_argument("AmpEngine: operator width does not match params");
  if (profile_.amplitude.size() != size_t(params_.num_sections))
    throw std::invalid_argument("AmpEngine: profile does not match section count");
  size_t width = op_.width();
  state_.s.assign(width, 0.0);
  state_.r.assign(width, 0.0);
  state_.z.assign(op_.rows(), 0.0);
  scaled_s_.assign(width, 0.0);
  forward_tmp_.assign(op_.rows(), 0.0);
  q_.assign(width, 0.0);
  op_ws_ = op_.make_workspace();
}

void AmpEngine::reset(std::span<const double> y) {
  if (y.size() != op_.rows())
    throw std::invalid_argument("AmpEngine: y must have length " + std::to_string(op_.rows()));
  y_.assign(y.begin(), y.end());
  std::fill(state_.s.begin(), state_.s.end(), 0.0);
  std::fill(state_.r.begin(), state_.r.end(), 0.0);
  state_.z = y_;
  size_t taus = op_.kind() == SensingKind::Dense ? 1 : size_t(params_.num_sections);
  state_.tau.assign(taus, 1.0);
  state_.t = 0;
}

void AmpEngine::step(const DenoiserSpec& denoiser) {
  if (op_.kind() == SensingKind::Dense)
    step_dense(denoiser);
  else
    step_blockwise(denoiser);
  ++state_.t;
}

const std::vector<double>& AmpEngine::run(std::span<const double> y, const DenoiserSpec& denoiser,
                                          int iters) {
  reset(y);
  for (int t = 0; t < iters; ++t) step(denoiser);
  return state_.s;
}

void AmpEngine::step_dense(const DenoiserSpec& denoiser) {
  size_t n = op_.rows();
  size_t sections = size_t(params_.num_sections);
  size_t sec_len = params_.section_len();

  double coef = onsager_coefficient(state_.s, profile_, state_.tau[0], n);
  parallel_for(pool_, sections, [&](size_t l) {
    double d = profile_.amplitude[l];
    for (size_t k = l * sec_len; k < (l + 1) * sec_len; ++k) scaled_s_[k] = d * state_.s[k];
  });
  op_.forward(scaled_s_, forward_tmp_, op_ws_, pool_);
  for (size_t i = 0; i < n; ++i) state_.z[i] = y_[i] - forward_tmp_[i] + coef * state_.z[i];
  state_.tau[0] = tau_update(state_.z, n);
  op_.adjoint(state_.z, state_.r, op_ws_, pool_);
  parallel_for(pool_, sections, [&](size_t l) {
    for (size_t k = l * sec_len; k < (l + 1) * sec_len; ++k) state_.r[k] += scaled_s_[k];
  });
  fill_prior(denoiser);
  apply_pme();
}

void AmpEngine::step_blockwise(const DenoiserSpec& denoiser) {
  size_t sections = size_t(params_.num_sections);
  size_t sec_len = params_.section_len();
  size_t sec_rows = op_.rows_per_section();

  parallel_for(pool_, sections, [&](size_t l) {
    double d = profile_.amplitude[l];
    std::span<double> s_l = std::span<double>(state_.s).subspan(l * sec_len, sec_len);
    std::span<double> z_l = std::span<double>(state_.z).subspan(l * sec_rows, sec_rows);
    std::span<double> r_l = std::span<double>(state_.r).subspan(l * sec_len, sec_len);
    std::span<double> scaled_l = std::span<double>(scaled_s_).subspan(l * sec_len, sec_len);
    std::span<double> tmp_l = std::span<double>(forward_tmp_).subspan(l * sec_rows, sec_rows);
    std::span<double> scratch = std::span<double>(op_ws_.scratch).subspan(l * sec_len, sec_len);

    double coef = onsager_coefficient_section(s_l, d, state_.tau[l], sec_rows);
    for (size_t k = 0; k < sec_len; ++k) scaled_l[k] = d * s_l[k];
    op_.forward_section(l, scaled_l, tmp_l, scratch);
    const double* y_l = y_.data() + l * sec_rows;
    for (size_t i = 0; i < sec_rows; ++i) z_l[i] = y_l[i] - tmp_l[i] + coef * z_l[i];
    state_.tau[l] = tau_update(z_l, sec_rows);
    op_.adjoint_section(l, z_l, r_l, scratch);
    for (size_t k = 0; k < sec_len; ++k) r_l[k] += scaled_l[k];
  });
  fill_prior(denoiser);
  apply_pme();
}

void AmpEngine::fill_prior(const DenoiserSpec& denoiser) {
  if (denoiser.kind == DenoiserSpec::Separable) {
    std::fill(q_.begin(), q_.end(), denoiser.q_flat);
    return;
  }
  if (!bp_ws_) bp_ws_ = std::make_unique<BpWorkspace>(graph_);
  if (state_.tau.size() == 1) {
    std::vector<double> taus(size_t(params_.num_sections), state_.tau[0]);
    bp_denoise(state_.r, taus, profile_.amplitude, params_.num_users, graph_, *bp_ws_, q_, pool_);
  } else {
    bp_denoise(state_.r, state_.tau, profile_.amplitude, params_.num_users, graph_, *bp_ws_, q_,
               pool_);
  }
}

void AmpEngine::apply_pme() {
  size_t sections = size_t(params_.num_sections);
  size_t sec_len = params_.section_len();
  parallel_for(pool_, sections, [&](size_t l) {
    double d = profile_.amplitude[l];
    double tau = state_.tau.size() == 1 ? state_.tau[0] : state_.tau[l];
    for (size_t k = l * sec_len; k < (l + 1) * sec_len; ++k)
      state_.s[k] = pme(state_.r[k], d, tau, q_[k]);
  });
}

SensingKind kind_for_case(int case_id) {
  switch (case_id) {
    case 1:
    case 4:
      return SensingKind::BlockDiagonal;
    case 2:
    case 3:
      return SensingKind::Dense;
    default:
      throw std::invalid_argument("unknown case id " + std::to_string(case_id));
  }
}

PipelineResult run_pipeline(int case_id, std::span<const double> y, const SystemParams& params,
                            const PowerProfile& profile, const OuterGraph& graph,
                            const SensingOperator& op, ThreadPool* pool) {
  if (op.kind() != kind_for_case(case_id))
    throw std::invalid_argument("run_pipeline: operator kind does not match case " +
                                std::to_string(case_id));
  DenoiserSpec denoiser;
  if (case_id == 1 || case_id == 2) {
    denoiser.kind = DenoiserSpec::Separable;
    denoiser.q_flat = separable_prior(params);
  } else {
    denoiser.kind = DenoiserSpec::Bp;
  }
  AmpEngine engine(op, profile, graph, params, pool);
  PipelineResult result;
  result.shat = engine.run(y, denoiser, params.amp_iters);
  result.decoded = stitch(result.shat, graph, params.num_users, params.effective_list_size(),
                          params.effective_beam_cap());
  return result;
}

}  // namespace ccs
