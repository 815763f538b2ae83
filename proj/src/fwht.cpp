#include "ccs/fwht.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>
#include <string>

#include "ccs/rng.hpp"

namespace ccs {

void fwht_inplace(std::span<double> x) {
  size_t n = x.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fwht: length must be a power of two, got " + std::to_string(n));
  for (size_t h = 1; h < n; h <<= 1) {
    for (size_t i = 0; i < n; i += h << 1) {
      for (size_t j = i; j < i + h; ++j) {
        double a = x[j];
        double b = x[j + h];
        x[j] = a + b;
        x[j + h] = a - b;
      }
    }
  }
}

namespace {

int ceil_log2(size_t n) {
  int b = 0;
  while ((size_t(1) << b) < n) ++b;
  return b;
}

// Prefix of a Fisher-Yates shuffle of [1, 2^order_log2), then sorted.
std::vector<uint32_t> sample_rows(int order_log2, size_t count, CounterRng& rng) {
  size_t pool_size = (size_t(1) << order_log2) - 1;
  if (count > pool_size)
    throw std::invalid_argument("make_operator: too many rows requested (" +
                                std::to_string(count) + " from a pool of " +
                                std::to_string(pool_size) + ")");
  std::vector<uint32_t> pool(pool_size);
  for (size_t i = 0; i < pool_size; ++i) pool[i] = uint32_t(i + 1);
  for (size_t i = 0; i < count; ++i) {
    size_t j = i + size_t(rng.next_below(pool_size - i));
    std::swap(pool[i], pool[j]);
  }
  std::vector<uint32_t> rows(pool.begin(), pool.begin() + count);
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace

SensingOperator::SensingOperator(SensingKind kind, std::vector<HadamardPlan> plans, size_t rows,
                                 size_t width)
    : kind_(kind), plans_(std::move(plans)), rows_(rows), width_(width) {}

SensingOperator::Workspace SensingOperator::make_workspace() const {
  Workspace ws;
  ws.scratch.resize(kind_ == SensingKind::Dense ? plans_[0].order() : width_);
  return ws;
}

void SensingOperator::forward_section(size_t section, std::span<const double> x_section,
                                      std::span<double> out_rows,
                                      std::span<double> scratch) const {
  const HadamardPlan& plan = plans_[section];
  size_t order = plan.order();
  std::memcpy(scratch.data(), x_section.data(), x_section.size() * sizeof(double));
  std::memset(scratch.data() + x_section.size(), 0, (order - x_section.size()) * sizeof(double));
  fwht_inplace(scratch.subspan(0, order));
  for (size_t i = 0; i < plan.row_indices.size(); ++i)
    out_rows[i] = plan.scale * scratch[plan.row_indices[i]];
}

void SensingOperator::adjoint_section(size_t section, std::span<const double> z_rows,
                                      std::span<double> out_section,
                                      std::span<double> scratch) const {
  const HadamardPlan& plan = plans_[section];
  size_t order = plan.order();
  std::memset(scratch.data(), 0, order * sizeof(double));
  for (size_t i = 0; i < plan.row_indices.size(); ++i)
    scratch[plan.row_indices[i]] = plan.scale * z_rows[i];
  fwht_inplace(scratch.subspan(0, order));
  std::memcpy(out_section.data(), scratch.data(), out_section.size() * sizeof(double));
}

void SensingOperator::forward(std::span<const double> x, std::span<double> out, Workspace& ws,
                              ThreadPool* pool) const {
  if (x.size() != width_)
    throw std::invalid_argument("forward: expected input of length " + std::to_string(width_));
  if (out.size() != rows_)
    throw std::invalid_argument("forward: expected output of length " + std::to_string(rows_));
  if (kind_ == SensingKind::Dense) {
    forward_section(0, x, out, std::span<double>(ws.scratch));
    return;
  }
  size_t sec_w = section_width();
  size_t sec_r = rows_per_section();
  parallel_for(pool, plans_.size(), [&](size_t l) {
    forward_section(l, x.subspan(l * sec_w, sec_w), out.subspan(l * sec_r, sec_r),
                    std::span<double>(ws.scratch).subspan(l * sec_w, sec_w));
  });
}

void SensingOperator::adjoint(std::span<const double> z, std::span<double> out, Workspace& ws,
                              ThreadPool* pool) const {
  if (z.size() != rows_)
    throw std::invalid_argument("adjoint: expected input of length " + std::to_string(rows_));
  if (out.size() != width_)
    throw std::invalid_argument("adjoint: expected output of length " + std::to_string(width_));
  if (kind_ == SensingKind::Dense) {
    adjoint_section(0, z, out, std::span<double>(ws.scratch));
    return;
  }
  size_t sec_w = section_width();
  size_t sec_r = rows_per_section();
  parallel_for(pool, plans_.size(), [&](size_t l) {
    adjoint_section(l, z.subspan(l * sec_r, sec_r), out.subspan(l * sec_w, sec_w),
                    std::span<double>(ws.scratch).subspan(l * sec_w, sec_w));
  });
}

std::vector<double> SensingOperator::forward(std::span<const double> x) const {
  Workspace ws = make_workspace();
  std::vector<double> out(rows_);
  forward(x, out, ws);
  return out;
}

std::vector<double> SensingOperator::adjoint(std::span<const double> z) const {
  Workspace ws = make_workspace();
  std::vector<double> out(width_);
  adjoint(z, out, ws);
  return out;
}

SensingOperator make_operator(SensingKind kind, const SystemParams& params, uint64_t seed) {
  if (params.num_sections < 1) throw std::invalid_argument("make_operator: l must be positive");
  if (params.num_rows < 1) throw std::invalid_argument("make_operator: n must be positive");
  if (params.num_rows % params.num_sections != 0)
    throw std::invalid_argument("make_operator: l must divide n");
  size_t width = params.width();

  std::vector<HadamardPlan> plans;
  if (kind == SensingKind::Dense) {
    HadamardPlan plan;
    plan.order_log2 = ceil_log2(width);
    CounterRng rng(seed, rng_stream::kRowSampling);
    plan.row_indices = sample_rows(plan.order_log2, size_t(params.num_rows), rng);
    plan.scale = 1.0 / std::sqrt(double(params.num_rows));
    plans.push_back(std::move(plan));
  } else {
    size_t per_section = size_t(params.rows_per_section());
    for (int l = 0; l < params.num_sections; ++l) {
      HadamardPlan plan;
      plan.order_log2 = params.section_bits;
      CounterRng rng(seed, rng_stream::kRowSampling + uint64_t(l));
      plan.row_indices = sample_rows(plan.order_log2, per_section, rng);
      plan.scale = 1.0 / std::sqrt(double(per_section));
      plans.push_back(std::move(plan));
    }
  }
  return SensingOperator(kind, std::move(plans), size_t(params.num_rows), width);
}

}  // namespace ccs
