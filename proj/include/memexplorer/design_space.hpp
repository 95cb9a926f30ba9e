// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "memexplorer/evaluator.hpp"
#include "memexplorer/rng.hpp"

namespace memx {

/// Index into the value tables of every search dimension. The canonical form
/// pins family type indices to 0 when the family's stack count is 0, so each
/// distinct configuration has exactly one lattice representation.
struct LatticePoint {
  std::vector<int> idx;

  bool operator==(const LatticePoint& o) const { return idx == o.idx; }
};

struct LatticePointHash {
  std::size_t operator()(const LatticePoint& p) const {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (int v : p.idx) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b9 + (h << 6) + (h >> 2);
    }
    return h;
  }
};

/// The co-design search space: compute dimensions, on-/off-chip memory
/// configuration, quantization precision, and software strategy. Ordinal
/// dimensions embed as rank/(k-1); unordered categoricals embed one-hot.
class DesignSpace {
 public:
  struct Dim {
    std::string name;
    std::vector<std::string> values;
    bool ordinal = true;
  };

  /// Default space (compute shapes, 3D-SRAM layers 0..4, optional
  /// conventional SRAM, four off-chip families with stack counts
  /// {0,1,2,4,8}, per-tensor bit widths, and the three strategy enums).
  static DesignSpace standard();

  const std::vector<Dim>& dims() const { return dims_; }
  std::size_t num_dims() const { return dims_.size(); }
  std::size_t embed_dim() const { return embed_dim_; }
  double cross_product_size() const;

  /// Canonicalizes type indices for absent memory families (in place).
  void canonicalize(LatticePoint& p) const;
  bool is_canonical(const LatticePoint& p) const;

  /// Materializes the design for a lattice point: hierarchy tiers ordered by
  /// aggregate bandwidth with the on-chip tier first, calibrated power model.
  DesignPoint decode(const LatticePoint& p, const Catalog& catalog) const;

  /// Embedding into [0,1]^embed_dim (bijective on canonical lattice points).
  std::vector<double> embed(const LatticePoint& p) const;
  /// Nearest canonical lattice point (ordinals round to nearest rank,
  /// one-hot blocks take the argmax).
  LatticePoint snap(const std::vector<double>& x) const;

  LatticePoint uniform_sample(Rng& rng) const;
  /// Stable content id for history files and design dumps.
  std::string design_id(const LatticePoint& p) const;

  /// Overrides one dimension's values (used by space.json).
  void restrict_dim(const std::string& name,
                    const std::vector<std::string>& values);

 private:
  std::vector<Dim> dims_;
  std::size_t embed_dim_ = 0;
  void refresh_embed_dim();
  int dim_index(const std::string& name) const;
};

/// Static feasibility: hierarchy present and shoreline-legal, positive
/// effective-bandwidth chain, TDP within budget, and the workload's footprint
/// admissible for the stage (decode additionally needs a non-zero batch).
bool design_feasible(const DesignPoint& design, const Catalog& catalog,
                     const ShorelineBudget& budget, double tdp_budget_w,
                     const Workload& workload, Stage stage);

}  // namespace memx
