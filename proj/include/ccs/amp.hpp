#pragma once

#include <memory>
#include <span>
#include <vector>

#include "ccs/fwht.hpp"
#include "ccs/outer_code.hpp"
#include "ccs/params.hpp"

namespace ccs {

// Posterior mean estimate for one entry: the probability the entry is
// active given r ~ N(d*x, tau^2) and prior activity q. Evaluated in
// log-space (logistic form), saturating cleanly in the tails.
double pme(double r, double d, double tau, double q);

// (sum d^2 s - sum d^2 s^2) / (n_rows * tau_prev^2), the residual's memory
// coefficient. Zero whenever s is exactly binary.
double onsager_coefficient(std::span<const double> s, const PowerProfile& profile,
                           double tau_prev, size_t n_rows);

// Single-section variant used by the per-section residual path.
double onsager_coefficient_section(std::span<const double> s_section, double amplitude,
                                   double tau_prev, size_t n_rows);

// sqrt(||z||^2 / n_rows), floored at 1e-12 so noiseless runs stay finite.
double tau_update(std::span<const double> z, size_t n_rows);

struct AmpState {
  std::vector<double> s;    // current estimate, entries in [0, 1]
  std::vector<double> z;    // residual, length n
  std::vector<double> r;    // effective observation
  std::vector<double> tau;  // one entry (dense) or L entries (per-section)
  int t = 0;                // completed iterations
};

struct DenoiserSpec {
  enum Kind { Separable, Bp } kind = Separable;
  double q_flat = 0.0;  // Separable prior
};

// 1 - (1 - 2^-v)^K, the separable activity prior.
double separable_prior(const SystemParams& params);

// The composite iteration: residual with Onsager correction, tau from the
// residual energy, effective observation, denoise. Dense operators use one
// pooled tau; BlockDiagonal operators run the residual section by section
// with per-section tau, then denoise globally.
class AmpEngine {
 public:
  AmpEngine(const SensingOperator& op, const PowerProfile& profile, const OuterGraph& graph,
            const SystemParams& params, ThreadPool* pool = nullptr);

  void reset(std::span<const double> y);
  void step(const DenoiserSpec& denoiser);
  // reset + iters steps; returns the final state estimate.
  const std::vector<double>& run(std::span<const double> y, const DenoiserSpec& denoiser,
                                 int iters);

  const AmpState& state() const { return state_; }

 private:
  void step_dense(const DenoiserSpec& denoiser);
  void step_blockwise(const DenoiserSpec& denoiser);
  void fill_prior(const DenoiserSpec& denoiser);
  void apply_pme();

  const SensingOperator& op_;
  const PowerProfile& profile_;
  const OuterGraph& graph_;
  SystemParams params_;
  ThreadPool* pool_;

  AmpState state_;
  std::vector<double> y_;
  std::vector<double> scaled_s_;  // D * s
  std::vector<double> forward_tmp_;
  std::vector<double> q_;
  SensingOperator::Workspace op_ws_;
  std::unique_ptr<BpWorkspace> bp_ws_;
};

struct PipelineResult {
  std::vector<double> shat;
  std::vector<Payload> decoded;
};

// Case 1: block-diagonal operator, separable prior (independent per-section
// AMP). Case 2: dense + separable. Case 3: dense + BP denoiser. Case 4:
// block-diagonal residuals + global BP denoiser.
SensingKind kind_for_case(int case_id);
PipelineResult run_pipeline(int case_id, std::span<const double> y, const SystemParams& params,
                            const PowerProfile& profile, const OuterGraph& graph,
                            const SensingOperator& op, ThreadPool* pool = nullptr);

}  // namespace ccs
