// Copyright (c) 2026 memexplorer contributors
// SPDX-License-Identifier: Apache-2.0
#include "memexplorer/design_space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "memexplorer/errors.hpp"

namespace memx {

namespace {

// Dimension order is part of the file format (design ids, history CSVs).
enum DimId {
  kPeDim = 0,
  kVlen,
  kSram3dLayers,
  kConvSram,
  kHbmType,
  kHbmStacks,
  kHbfStacks,
  kGddrType,
  kGddrStacks,
  kLpddrType,
  kLpddrStacks,
  kWeightBits,
  kActBits,
  kKvBits,
  kDataflow,
  kStoragePriority,
  kBwPriority,
  kDimCount,
};

const std::vector<std::string> kStackValues = {"0", "1", "2", "4", "8"};

int to_int(const std::string& s) { return std::stoi(s); }

}  // namespace

DesignSpace DesignSpace::standard() {
  DesignSpace s;
  s.dims_.resize(kDimCount);
  // Compute shapes span the demonstrated configuration family up to the
  // 2048x256 product bound; every listed shape appears in a reference design.
  s.dims_[kPeDim] =
      {"pe_dim", {"1024x64", "2048x64", "2048x128", "1024x512", "2048x256"}, false};
  s.dims_[kVlen] = {"vlen", {"128", "256", "512", "1024", "2048"}, true};
  s.dims_[kSram3dLayers] = {"sram3d_layers", {"0", "1", "2", "3", "4"}, true};
  s.dims_[kConvSram] = {"conv_sram", {"disabled", "enabled"}, true};
  s.dims_[kHbmType] = {"hbm_type", {"HBM3E", "HBM4"}, false};
  s.dims_[kHbmStacks] = {"hbm_stacks", kStackValues, true};
  s.dims_[kHbfStacks] = {"hbf_stacks", kStackValues, true};
  s.dims_[kGddrType] = {"gddr_type", {"GDDR6", "GDDR7"}, false};
  s.dims_[kGddrStacks] = {"gddr_stacks", kStackValues, true};
  s.dims_[kLpddrType] = {"lpddr_type", {"LPDDR5X", "LPDDR6"}, false};
  s.dims_[kLpddrStacks] = {"lpddr_stacks", kStackValues, true};
  s.dims_[kWeightBits] = {"weight_bits", {"4", "8"}, true};
  s.dims_[kActBits] = {"activation_bits", {"8", "16"}, true};
  s.dims_[kKvBits] = {"kv_bits", {"4", "8"}, true};
  s.dims_[kDataflow] = {"dataflow", {"WS", "IS", "OS"}, false};
  s.dims_[kStoragePriority] =
      {"storage_priority", {"Activation", "KVCache", "Weight", "Equal"}, false};
  s.dims_[kBwPriority] = {"bw_priority", {"Matrix", "Vector", "Equal"}, false};
  s.refresh_embed_dim();
  return s;
}

void DesignSpace::refresh_embed_dim() {
  embed_dim_ = 0;
  for (const auto& d : dims_) embed_dim_ += d.ordinal ? 1 : d.values.size();
}

int DesignSpace::dim_index(const std::string& name) const {
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i].name == name) return static_cast<int>(i);
  }
  throw ValidationError("space: unknown dimension '" + name + "'");
}

void DesignSpace::restrict_dim(const std::string& name,
                               const std::vector<std::string>& values) {
  Dim& d = dims_[dim_index(name)];
  if (values.empty()) throw ValidationError("space: dimension '" + name + "' emptied");
  for (const auto& v : values) {
    if (std::find(d.values.begin(), d.values.end(), v) == d.values.end()) {
      throw ValidationError("space: value '" + v + "' not in dimension '" + name + "'");
    }
  }
  d.values = values;
  refresh_embed_dim();
}

double DesignSpace::cross_product_size() const {
  double n = 1.0;
  for (const auto& d : dims_) n *= static_cast<double>(d.values.size());
  return n;
}

void DesignSpace::canonicalize(LatticePoint& p) const {
  auto zero_if_absent = [&](int stacks_dim, int type_dim) {
    if (dims_[stacks_dim].values[p.idx[stacks_dim]] == "0") p.idx[type_dim] = 0;
  };
  zero_if_absent(kHbmStacks, kHbmType);
  zero_if_absent(kGddrStacks, kGddrType);
  zero_if_absent(kLpddrStacks, kLpddrType);
}

bool DesignSpace::is_canonical(const LatticePoint& p) const {
  LatticePoint q = p;
  canonicalize(q);
  return q == p;
}

DesignPoint DesignSpace::decode(const LatticePoint& p,
                                const Catalog& catalog) const {
  if (p.idx.size() != dims_.size()) {
    throw ValidationError("space: lattice point has wrong arity");
  }
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (p.idx[i] < 0 || p.idx[i] >= static_cast<int>(dims_[i].values.size())) {
      throw ValidationError("space: index out of range for dimension '" +
                            dims_[i].name + "'");
    }
  }
  auto value = [&](int d) -> const std::string& { return dims_[d].values[p.idx[d]]; };

  DesignPoint dp;
  const std::string& pe = value(kPeDim);
  const auto x = pe.find('x');
  dp.compute.pe_rows = std::stoi(pe.substr(0, x));
  dp.compute.pe_cols = std::stoi(pe.substr(x + 1));
  dp.compute.vlen = to_int(value(kVlen));
  dp.compute.clock_hz = 1e9;

  dp.precision.weight_bits = to_int(value(kWeightBits));
  dp.precision.activation_bits = to_int(value(kActBits));
  dp.precision.kv_bits = to_int(value(kKvBits));

  const std::string& df = value(kDataflow);
  dp.strategy.dataflow = df == "WS"   ? Dataflow::WS
                         : df == "IS" ? Dataflow::IS
                                      : Dataflow::OS;
  const std::string& sp = value(kStoragePriority);
  dp.strategy.storage_priority = sp == "Activation" ? StoragePriority::Activation
                                 : sp == "KVCache"  ? StoragePriority::KVCache
                                 : sp == "Weight"   ? StoragePriority::Weight
                                                    : StoragePriority::Equal;
  const std::string& bw = value(kBwPriority);
  dp.strategy.bw_priority = bw == "Matrix"   ? BwPriority::Matrix
                            : bw == "Vector" ? BwPriority::Vector
                                             : BwPriority::Equal;

  // On-chip: bonded 3D layers dominate; the conventional die stands in only
  // when no layers are stacked.
  const int layers = to_int(value(kSram3dLayers));
  const bool conv = value(kConvSram) == "enabled";
  if (layers > 0) {
    dp.hierarchy.tiers.push_back(TierInstance{catalog.at("SRAM3D"), layers});
  } else if (conv) {
    dp.hierarchy.tiers.push_back(TierInstance{catalog.at("SRAM2D"), 1});
  }

  std::vector<TierInstance> offchip;
  auto add_family = [&](int type_dim, int stacks_dim) {
    const int stacks = to_int(value(stacks_dim));
    if (stacks > 0) {
      offchip.push_back(TierInstance{catalog.at(value(type_dim)), stacks});
    }
  };
  add_family(kHbmType, kHbmStacks);
  {
    const int stacks = to_int(value(kHbfStacks));
    if (stacks > 0) offchip.push_back(TierInstance{catalog.at("HBF"), stacks});
  }
  add_family(kGddrType, kGddrStacks);
  add_family(kLpddrType, kLpddrStacks);
  // Off-chip levels ordered by aggregate bandwidth, faster/lower-latency
  // technologies closer to the compute die.
  std::stable_sort(offchip.begin(), offchip.end(),
                   [](const TierInstance& a, const TierInstance& b) {
                     const double ba = a.aggregate_peak_bandwidth();
                     const double bb = b.aggregate_peak_bandwidth();
                     if (ba != bb) return ba > bb;
                     if (a.tech.latency_s != b.tech.latency_s) {
                       return a.tech.latency_s < b.tech.latency_s;
                     }
                     return a.tech.name < b.tech.name;
                   });
  for (auto& t : offchip) dp.hierarchy.tiers.push_back(std::move(t));

  dp.power = calibrated_compute_power();
  dp.id = design_id(p);
  return dp;
}

std::vector<double> DesignSpace::embed(const LatticePoint& p) const {
  std::vector<double> x;
  x.reserve(embed_dim_);
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    const std::size_t k = dims_[d].values.size();
    if (dims_[d].ordinal) {
      x.push_back(k == 1 ? 0.0 : static_cast<double>(p.idx[d]) / (k - 1));
    } else {
      for (std::size_t v = 0; v < k; ++v) {
        x.push_back(v == static_cast<std::size_t>(p.idx[d]) ? 1.0 : 0.0);
      }
    }
  }
  return x;
}

LatticePoint DesignSpace::snap(const std::vector<double>& x) const {
  if (x.size() != embed_dim_) {
    throw ValidationError("space: embedding vector has wrong arity");
  }
  LatticePoint p;
  p.idx.resize(dims_.size());
  std::size_t pos = 0;
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    const std::size_t k = dims_[d].values.size();
    if (dims_[d].ordinal) {
      double v = std::clamp(x[pos++], 0.0, 1.0);
      p.idx[d] = static_cast<int>(std::lround(v * (k - 1)));
    } else {
      std::size_t best = 0;
      for (std::size_t v = 1; v < k; ++v) {
        if (x[pos + v] > x[pos + best]) best = v;
      }
      p.idx[d] = static_cast<int>(best);
      pos += k;
    }
  }
  canonicalize(p);
  return p;
}

LatticePoint DesignSpace::uniform_sample(Rng& rng) const {
  LatticePoint p;
  p.idx.resize(dims_.size());
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    p.idx[d] = static_cast<int>(rng.uniform_index(dims_[d].values.size()));
  }
  canonicalize(p);
  return p;
}

std::string DesignSpace::design_id(const LatticePoint& p) const {
  std::ostringstream os;
  os << "d";
  for (std::size_t i = 0; i < p.idx.size(); ++i) os << "-" << p.idx[i];
  return os.str();
}

bool design_feasible(const DesignPoint& design, const Catalog& catalog,
                     const ShorelineBudget& budget, double tdp_budget_w,
                     const Workload& workload, Stage stage) {
  if (design.hierarchy.tiers.empty()) return false;
  HierarchyFeasibility rep =
      validate_hierarchy(design.hierarchy, catalog, budget, true);
  if (!rep.feasible) return false;
  try {
    effective_bandwidths(design.hierarchy);
    // TDP at full compute utilization and peak read on every tier.
    double tdp = compute_power(design.compute.pe_count(), design.compute.vlen,
                               1.0, 1.0, design.power);
    for (const auto& t : design.hierarchy.tiers) {
      tdp += memory_tier_power(t.aggregate_capacity(),
                               t.aggregate_peak_bandwidth(), 0.0,
                               MemoryPowerCoefficients::from(t.tech),
                               t.aggregate_peak_bandwidth());
    }
    if (tdp > tdp_budget_w) return false;

    if (stage == Stage::Decode || stage == Stage::Combined) {
      if (decode_max_batch(workload.model, design.precision, workload.trace,
                           design.hierarchy) < 1) {
        return false;
      }
    }
    if (stage == Stage::Prefill || stage == Stage::Combined) {
      // Placement must admit the prefill working set.
      (void)stage_traffic(workload.model, design.precision, workload.trace,
                          design.strategy, design.hierarchy, 1, Stage::Prefill);
    }
  } catch (const InfeasibleError&) {
    return false;
  } catch (const ValidationError&) {
    return false;
  }
  return true;
}

}  // namespace memx
