// Copyright 2026 The curvcheck Authors
// SPDX-License-Identifier: Apache-2.0
//
// Charts, dense symbolic tensor fields with index bookkeeping, and metrics.

#pragma once

#include <random>
#include <span>
#include <string>
#include <vector>

#include "curvcheck/expr.hpp"

namespace curvcheck {

struct BadSlot : SymbolicError {
  using SymbolicError::SymbolicError;
};
struct SingularMetric : SymbolicError {
  using SymbolicError::SymbolicError;
};

enum class Var : std::uint8_t { Up, Down };

class Tensor {
 public:
  Tensor() = default;
  Tensor(int dim, std::vector<Var> vars);

  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(vars_.size()); }
  const std::vector<Var>& vars() const { return vars_; }
  size_t size() const { return comp_.size(); }

  size_t flat(std::span<const int> idx) const;
  const Expr& at(std::span<const int> idx) const { return comp_[flat(idx)]; }
  void set(std::span<const int> idx, Expr value) { comp_[flat(idx)] = std::move(value); }

  template <class... Is>
  const Expr& at(Is... is) const {
    const int idx[] = {static_cast<int>(is)...};
    return at(std::span<const int>(idx, sizeof...(is)));
  }
  template <class... Is>
  void set(Is... is, Expr value) = delete;  // use set(span, value)

  const Expr& flat_at(size_t i) const { return comp_[i]; }
  void flat_set(size_t i, Expr v) { comp_[i] = std::move(v); }

  // canonicalizes every component in place
  void normalize();

 private:
  int dim_ = 0;
  std::vector<Var> vars_;
  std::vector<Expr> comp_;
};

// odometer-style index iteration: idx must start at {0,...,0}
bool next_index(std::vector<int>& idx, int dim);

Tensor tensor_add(const Tensor& a, const Tensor& b);
Tensor tensor_sub(const Tensor& a, const Tensor& b);
Tensor tensor_scale(const Tensor& a, const Expr& s);
Tensor tensor_product(const Tensor& a, const Tensor& b);

// trace over one contravariant and one covariant slot (either order)
Tensor contract(const Tensor& t, int slot_a, int slot_b);

struct Metric;
Tensor raise_index(const Tensor& t, int slot, const Metric& m);
Tensor lower_index(const Tensor& t, int slot, const Metric& m);

// (F ^ H)_{ijkl} = F_il H_kj - F_ik H_lj + F_jk H_li - F_jl H_ki
Tensor kulkarni_nomizu(const Tensor& f, const Tensor& h);

// sum of T over cyclic permutations of three distinct slots
Tensor cyclic_sum(const Tensor& t, int a, int b, int c);

// symmetry predicates (symbolic, entry-wise)
bool is_zero_tensor(const Tensor& t);
bool is_symmetric_pair(const Tensor& t, int a, int b);
bool is_antisymmetric_pair(const Tensor& t, int a, int b);
bool has_riemann_symmetries(const Tensor& t);          // (0,4) type
bool satisfies_first_bianchi(const Tensor& t);         // cyclic in slots 1,2,3

// ---------------------------------------------------------------------------

struct CoordDomain {
  double lo = 0;
  double hi = 1;
};

struct Exclusion {
  Expr expr;
  double min_abs = 1e-9;
};

struct Chart {
  std::vector<std::string> coords;
  std::vector<CoordDomain> domains;

  int dim() const { return static_cast<int>(coords.size()); }
  void validate() const;  // n >= 3, domains non-empty
};

struct ParamDomain {
  std::string name;
  CoordDomain domain;
};

struct Metric {
  std::string name;
  std::string signature;  // recorded, never branched on
  Chart chart;
  Tensor g;     // (0,2)
  Tensor ginv;  // (2,0)
  Expr det;
  std::vector<ParamDomain> params;
  std::vector<Exclusion> exclusions;
};

// fills in ginv/det (throws SingularMetric when det is symbolically zero) and
// checks g is symmetric
Metric make_metric(std::string name, std::string signature, Chart chart, Tensor g,
                   std::vector<ParamDomain> params, std::vector<Exclusion> exclusions);

// seeded rejection sampler over chart and parameter domains
class Sampler {
 public:
  Sampler(const Metric& m, uint64_t seed) : m_(&m), rng_(seed) {}
  Point next();
  std::vector<Point> take(int n);

 private:
  const Metric* m_;
  std::mt19937_64 rng_;
};

// metric definition files (documented JSON schema, schema_version 1)
Metric load_metric_json(const std::string& text);
std::string save_metric_json(const Metric& m);

}  // namespace curvcheck
