#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ccs/parallel.hpp"
#include "ccs/params.hpp"

namespace ccs {

// Unnormalized Walsh-Hadamard transform in natural (Sylvester) order,
// in place. Self-transpose; applying it twice multiplies by the length.
void fwht_inplace(std::span<double> x);

// Rows selected from a 2^order_log2 Sylvester-Hadamard matrix. Row 0
// (all ones) is always excluded, so the remaining rows are zero-mean.
struct HadamardPlan {
  int order_log2 = 0;
  std::vector<uint32_t> row_indices;  // distinct, sorted, all >= 1
  double scale = 0.0;                 // 1/sqrt(#rows); columns get unit norm

  size_t order() const { return size_t(1) << order_log2; }
};

enum class SensingKind { Dense, BlockDiagonal };

// Implicit sensing matrix A with entries +-scale. Dense uses one plan over
// the whole state vector; BlockDiagonal holds one plan per section and acts
// on each section independently. Never materialized; both actions go
// through the FWHT. Immutable after construction and safe to share across
// threads; scratch lives in the caller-owned workspace.
class SensingOperator {
 public:
  SensingOperator(SensingKind kind, std::vector<HadamardPlan> plans, size_t rows, size_t width);

  SensingKind kind() const { return kind_; }
  size_t rows() const { return rows_; }    // n
  size_t width() const { return width_; }  // L * 2^v
  const std::vector<HadamardPlan>& plans() const { return plans_; }
  size_t section_count() const { return kind_ == SensingKind::Dense ? 1 : plans_.size(); }
  size_t section_width() const { return width_ / section_count(); }
  size_t rows_per_section() const { return rows_ / section_count(); }

  struct Workspace {
    std::vector<double> scratch;
  };
  Workspace make_workspace() const;

  // out = A x. BlockDiagonal may fan sections out over the pool; outputs
  // are written to disjoint row ranges so the result is thread-invariant.
  void forward(std::span<const double> x, std::span<double> out, Workspace& ws,
               ThreadPool* pool = nullptr) const;
  // out = A^T z.
  void adjoint(std::span<const double> z, std::span<double> out, Workspace& ws,
               ThreadPool* pool = nullptr) const;

  // Restricted to one section of a BlockDiagonal operator (also valid for
  // Dense with section 0). Spans cover just that section's slice.
  void forward_section(size_t section, std::span<const double> x_section,
                       std::span<double> out_rows, std::span<double> scratch) const;
  void adjoint_section(size_t section, std::span<const double> z_rows,
                       std::span<double> out_section, std::span<double> scratch) const;

  std::vector<double> forward(std::span<const double> x) const;
  std::vector<double> adjoint(std::span<const double> z) const;

 private:
  SensingKind kind_;
  std::vector<HadamardPlan> plans_;
  size_t rows_;
  size_t width_;
};

// Row indices drawn uniformly without replacement from [1, 2^order),
// deterministically from the seed. Dense order is the smallest power of two
// holding the full width; BlockDiagonal uses order 2^v per section.
SensingOperator make_operator(SensingKind kind, const SystemParams& params, uint64_t seed);

}  // namespace ccs
