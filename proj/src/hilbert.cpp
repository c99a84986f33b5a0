// SPDX-License-Identifier: Apache-2.0
#include "whichpath/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "whichpath/errors.hpp"
#include "whichpath/rng.hpp"

namespace whichpath::hilbert {
namespace {

std::size_t product_dim(const std::vector<FactorLabel>& factors) {
  std::size_t d = 1;
  for (const auto& f : factors) {
    if (f.dim == 0) throw ConfigError("factor '" + f.name + "' has dimension 0");
    d *= f.dim;
  }
  return d;
}

void check_unique_names(const std::vector<FactorLabel>& factors) {
  std::unordered_set<std::string_view> seen;
  for (const auto& f : factors) {
    if (f.name.empty()) throw ConfigError("factor with empty name");
    if (!seen.insert(f.name).second)
      throw ConfigError("duplicate factor name '" + f.name + "'");
  }
}

}  // namespace

StateVector::StateVector(std::vector<FactorLabel> factors, std::vector<cplx> amps)
    : factors_(std::move(factors)), amps_(std::move(amps)) {
  check_unique_names(factors_);
  if (product_dim(factors_) != amps_.size())
    throw ConfigError("amplitude count does not match product of factor dimensions");
}

StateVector StateVector::basis(FactorLabel factor, std::size_t index) {
  if (index >= factor.dim) throw ConfigError("basis index out of range for '" + factor.name + "'");
  std::vector<cplx> amps(factor.dim, cplx{0.0, 0.0});
  amps[index] = cplx{1.0, 0.0};
  return StateVector({std::move(factor)}, std::move(amps));
}

StateVector StateVector::single(FactorLabel factor, std::vector<cplx> amps) {
  factor.dim = amps.size();
  return StateVector({std::move(factor)}, std::move(amps));
}

bool StateVector::has_factor(std::string_view name) const {
  return std::any_of(factors_.begin(), factors_.end(),
                     [&](const FactorLabel& f) { return f.name == name; });
}

std::size_t StateVector::factor_position(std::string_view name) const {
  for (std::size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].name == name) return i;
  throw ConfigError("unknown factor '" + std::string(name) + "'");
}

std::size_t StateVector::stride(std::size_t position) const {
  std::size_t s = 1;
  for (std::size_t i = position + 1; i < factors_.size(); ++i) s *= factors_[i].dim;
  return s;
}

double StateVector::norm() const {
  double sum = 0.0;
  for (const cplx& a : amps_) sum += std::norm(a);
  return std::sqrt(sum);
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw ConfigError("cannot normalize the zero vector");
  StateVector out = *this;
  out *= cplx{1.0 / n, 0.0};
  return out;
}

void StateVector::check_same_shape(const StateVector& other) const {
  if (factors_ != other.factors_)
    throw ConfigError("factor lists differ between operands");
}

StateVector& StateVector::operator+=(const StateVector& other) {
  check_same_shape(other);
  for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] += other.amps_[i];
  return *this;
}

StateVector& StateVector::operator-=(const StateVector& other) {
  check_same_shape(other);
  for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] -= other.amps_[i];
  return *this;
}

StateVector& StateVector::operator*=(cplx scale) {
  for (cplx& a : amps_) a *= scale;
  return *this;
}

DensityMatrix::DensityMatrix(std::vector<FactorLabel> factors, std::vector<cplx> entries)
    : factors_(std::move(factors)), entries_(std::move(entries)) {
  check_unique_names(factors_);
  dim_ = product_dim(factors_);
  if (entries_.size() != dim_ * dim_)
    throw ConfigError("density matrix entry count does not match factor dimensions");
}

cplx DensityMatrix::trace() const {
  cplx t{0.0, 0.0};
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double DensityMatrix::hermiticity_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return worst;
}

std::vector<double> DensityMatrix::eigenvalues() const {
  // Cyclic Jacobi on the Hermitian part. Matrices here are tiny (subsystem
  // reductions), so O(sweeps * n^3) is irrelevant.
  const std::size_t n = dim_;
  std::vector<cplx> a(entries_);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a[i * n + j] = 0.5 * (entries_[i * n + j] + std::conj(entries_[j * n + i]));

  auto at = [&](std::size_t i, std::size_t j) -> cplx& { return a[i * n + j]; };

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(at(p, q));
    if (off < 1e-30) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = at(p, q);
        const double mag = std::abs(apq);
        if (mag < 1e-300) continue;
        const cplx phase = apq / mag;
        const double app = at(p, p).real();
        const double aqq = at(q, q).real();
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // Columns: A <- A * J with J[p][p]=c, J[q][p]=-s*conj(phase),
        //          J[p][q]=s*phase, J[q][q]=c.
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = at(k, p);
          const cplx akq = at(k, q);
          at(k, p) = c * akp - s * std::conj(phase) * akq;
          at(k, q) = s * phase * akp + c * akq;
        }
        // Rows: A <- J^dagger * A.
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = at(p, k);
          const cplx aqk = at(q, k);
          at(p, k) = c * apk - s * phase * aqk;
          at(q, k) = s * std::conj(phase) * apk + c * aqk;
        }
      }
    }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i).real();
  std::sort(eig.begin(), eig.end());
  return eig;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  std::vector<FactorLabel> factors = a.factors();
  factors.insert(factors.end(), b.factors().begin(), b.factors().end());
  check_unique_names(factors);

  std::vector<cplx> amps(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j) amps[i * b.dim() + j] = a.amp(i) * b.amp(j);
  return StateVector(std::move(factors), std::move(amps));
}

cplx inner(const StateVector& a, const StateVector& b) {
  if (a.factors() != b.factors())
    throw ConfigError("inner product requires identical factor lists");
  cplx sum{0.0, 0.0};
  for (std::size_t i = 0; i < a.dim(); ++i) sum += std::conj(a.amp(i)) * b.amp(i);
  return sum;
}

DensityMatrix partial_trace(const StateVector& s, std::span<const std::string> keep) {
  std::unordered_set<std::string_view> keep_set;
  for (const auto& name : keep) {
    s.factor_position(name);  // validates existence
    if (!keep_set.insert(name).second)
      throw ConfigError("factor '" + name + "' listed twice in partial trace");
  }

  std::vector<FactorLabel> kept;
  std::vector<std::size_t> kept_strides;
  std::size_t kept_dim = 1;
  std::size_t traced_dim = 1;
  std::vector<std::size_t> traced_strides;
  std::vector<std::size_t> traced_dims;

  for (std::size_t pos = 0; pos < s.factors().size(); ++pos) {
    const FactorLabel& f = s.factors()[pos];
    if (keep_set.contains(f.name)) {
      kept.push_back(f);
      kept_strides.push_back(s.stride(pos));
      kept_dim *= f.dim;
    } else {
      traced_dims.push_back(f.dim);
      traced_strides.push_back(s.stride(pos));
      traced_dim *= f.dim;
    }
  }

  // Expand multi-indices once; the state spaces here are small.
  std::vector<std::size_t> kept_offsets(kept_dim, 0);
  {
    std::size_t idx = 0;
    std::vector<std::size_t> digits(kept.size(), 0);
    for (std::size_t k = 0; k < kept_dim; ++k) {
      std::size_t off = 0;
      for (std::size_t d = 0; d < kept.size(); ++d) off += digits[d] * kept_strides[d];
      kept_offsets[idx++] = off;
      for (std::size_t d = kept.size(); d-- > 0;) {
        if (++digits[d] < kept[d].dim) break;
        digits[d] = 0;
      }
    }
  }
  std::vector<std::size_t> traced_offsets(traced_dim, 0);
  {
    std::size_t idx = 0;
    std::vector<std::size_t> digits(traced_dims.size(), 0);
    for (std::size_t k = 0; k < traced_dim; ++k) {
      std::size_t off = 0;
      for (std::size_t d = 0; d < traced_dims.size(); ++d) off += digits[d] * traced_strides[d];
      traced_offsets[idx++] = off;
      for (std::size_t d = traced_dims.size(); d-- > 0;) {
        if (++digits[d] < traced_dims[d]) break;
        digits[d] = 0;
      }
    }
  }

  std::vector<cplx> entries(kept_dim * kept_dim, cplx{0.0, 0.0});
  for (std::size_t t = 0; t < traced_dim; ++t) {
    const std::size_t to = traced_offsets[t];
    for (std::size_t i = 0; i < kept_dim; ++i) {
      const cplx ai = s.amp(kept_offsets[i] + to);
      for (std::size_t j = 0; j < kept_dim; ++j)
        entries[i * kept_dim + j] += ai * std::conj(s.amp(kept_offsets[j] + to));
    }
  }
  return DensityMatrix(std::move(kept), std::move(entries));
}

namespace {

// Shared index bookkeeping for contract/project: positions of the outcome's
// factors inside the joint state, in the outcome's own factor order.
std::vector<std::size_t> outcome_positions(const StateVector& joint, const StateVector& outcome) {
  std::vector<std::size_t> pos;
  pos.reserve(outcome.factors().size());
  for (const auto& f : outcome.factors()) {
    const std::size_t p = joint.factor_position(f.name);
    if (joint.factors()[p].dim != f.dim)
      throw ConfigError("factor '" + f.name + "' dimension mismatch between joint and outcome");
    pos.push_back(p);
  }
  return pos;
}

}  // namespace

StateVector contract(const StateVector& joint, const StateVector& outcome) {
  const auto positions = outcome_positions(joint, outcome);
  std::vector<bool> contracted(joint.factors().size(), false);
  for (std::size_t p : positions) contracted[p] = true;

  std::vector<FactorLabel> rest_factors;
  for (std::size_t p = 0; p < joint.factors().size(); ++p)
    if (!contracted[p]) rest_factors.push_back(joint.factors()[p]);
  if (rest_factors.empty())
    throw ConfigError("contraction would consume every factor; use inner() instead");

  std::size_t rest_dim = 1;
  for (const auto& f : rest_factors) rest_dim *= f.dim;
  std::vector<cplx> rest(rest_dim, cplx{0.0, 0.0});

  // Walk the full joint index space once, splitting each index into the
  // outcome part and the remainder part.
  const std::size_t nf = joint.factors().size();
  std::vector<std::size_t> digits(nf, 0);
  std::vector<std::size_t> out_stride_of(nf, 0);
  {
    std::size_t s = 1;
    for (std::size_t d = positions.size(); d-- > 0;) {
      out_stride_of[positions[d]] = s;
      s *= outcome.factors()[d].dim;
    }
  }
  std::vector<std::size_t> rest_stride_of(nf, 0);
  {
    std::size_t s = 1;
    for (std::size_t p = nf; p-- > 0;) {
      if (!contracted[p]) {
        rest_stride_of[p] = s;
        s *= joint.factors()[p].dim;
      }
    }
  }

  for (std::size_t full = 0; full < joint.dim(); ++full) {
    std::size_t out_idx = 0;
    std::size_t rest_idx = 0;
    for (std::size_t p = 0; p < nf; ++p) {
      if (contracted[p])
        out_idx += digits[p] * out_stride_of[p];
      else
        rest_idx += digits[p] * rest_stride_of[p];
    }
    rest[rest_idx] += std::conj(outcome.amp(out_idx)) * joint.amp(full);

    for (std::size_t p = nf; p-- > 0;) {
      if (++digits[p] < joint.factors()[p].dim) break;
      digits[p] = 0;
    }
  }
  return StateVector(std::move(rest_factors), std::move(rest));
}

StateVector project_onto(const StateVector& joint, const StateVector& outcome) {
  return embed(joint.factors(), outcome, contract(joint, outcome));
}

StateVector embed(const std::vector<FactorLabel>& full_factors, const StateVector& outcome,
                  const StateVector& rest) {
  check_unique_names(full_factors);
  const std::size_t nf = full_factors.size();
  if (outcome.factors().size() + rest.factors().size() != nf)
    throw ConfigError("embed requires the two parts to partition the full factor list");

  std::vector<int> source(nf, -1);  // 0 = outcome, 1 = rest
  std::vector<std::size_t> stride_of(nf, 0);
  const auto wire = [&](const StateVector& part, int tag) {
    std::vector<std::size_t> strides(part.factors().size());
    std::size_t s = 1;
    for (std::size_t d = part.factors().size(); d-- > 0;) {
      strides[d] = s;
      s *= part.factors()[d].dim;
    }
    for (std::size_t d = 0; d < part.factors().size(); ++d) {
      const FactorLabel& f = part.factors()[d];
      bool found = false;
      for (std::size_t p = 0; p < nf; ++p) {
        if (full_factors[p].name != f.name) continue;
        if (full_factors[p].dim != f.dim)
          throw ConfigError("embed: factor '" + f.name + "' dimension mismatch");
        if (source[p] != -1)
          throw ConfigError("embed: factor '" + f.name + "' claimed twice");
        source[p] = tag;
        stride_of[p] = strides[d];
        found = true;
        break;
      }
      if (!found)
        throw ConfigError("embed: factor '" + f.name + "' not in the full factor list");
    }
  };
  wire(outcome, 0);
  wire(rest, 1);

  std::size_t full_dim = 1;
  for (const FactorLabel& f : full_factors) full_dim *= f.dim;
  std::vector<cplx> amps(full_dim);
  std::vector<std::size_t> digits(nf, 0);
  for (std::size_t full = 0; full < full_dim; ++full) {
    std::size_t out_idx = 0;
    std::size_t rest_idx = 0;
    for (std::size_t p = 0; p < nf; ++p) {
      if (source[p] == 0)
        out_idx += digits[p] * stride_of[p];
      else
        rest_idx += digits[p] * stride_of[p];
    }
    amps[full] = outcome.amp(out_idx) * rest.amp(rest_idx);

    for (std::size_t p = nf; p-- > 0;) {
      if (++digits[p] < full_factors[p].dim) break;
      digits[p] = 0;
    }
  }
  return StateVector(full_factors, std::move(amps));
}

StateVector apply_to_factor(const StateVector& s, std::string_view factor,
                            std::span<const cplx> matrix) {
  const std::size_t pos = s.factor_position(factor);
  const std::size_t d = s.factors()[pos].dim;
  if (matrix.size() != d * d)
    throw ConfigError("matrix size does not match factor dimension");
  const std::size_t stride = s.stride(pos);
  const std::size_t block = stride * d;

  std::vector<cplx> amps(s.dim(), cplx{0.0, 0.0});
  for (std::size_t base = 0; base < s.dim(); base += block) {
    for (std::size_t inner_off = 0; inner_off < stride; ++inner_off) {
      for (std::size_t i = 0; i < d; ++i) {
        cplx acc{0.0, 0.0};
        for (std::size_t j = 0; j < d; ++j)
          acc += matrix[i * d + j] * s.amp(base + j * stride + inner_off);
        amps[base + i * stride + inner_off] = acc;
      }
    }
  }
  return StateVector(s.factors(), std::move(amps));
}

StateVector random_unit_vector(std::size_t dim, std::uint64_t seed,
                               std::string_view factor_name) {
  if (dim == 0) throw ConfigError("random_unit_vector requires dim >= 1");
  rng::Stream stream(seed);
  std::vector<cplx> amps(dim);
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (cplx& a : amps) {
      a = cplx{stream.gaussian(), stream.gaussian()};
      n2 += std::norm(a);
    }
  } while (n2 < 1e-12);
  const double inv = 1.0 / std::sqrt(n2);
  for (cplx& a : amps) a *= inv;
  return StateVector::single({std::string(factor_name), dim}, std::move(amps));
}

std::pair<StateVector, StateVector> overlap_pair(std::size_t dim, double overlap,
                                                 std::uint64_t seed,
                                                 std::string_view factor_name) {
  if (dim < 2) throw ConfigError("overlap_pair requires dim >= 2");
  if (overlap < 0.0 || overlap > 1.0)
    throw ConfigError("overlap must lie in [0, 1]");

  const StateVector u = random_unit_vector(dim, rng::derive(seed, "overlap-u"), factor_name);
  if (overlap == 1.0) return {u, u};

  StateVector perp = u;
  for (std::uint64_t attempt = 0;; ++attempt) {
    StateVector t =
        random_unit_vector(dim, rng::derive(seed, "overlap-perp", attempt), factor_name);
    t -= inner(u, t) * u;
    const double n = t.norm();
    if (n > 1e-6) {
      perp = (cplx{1.0 / n, 0.0}) * t;
      break;
    }
  }

  StateVector b = cplx{overlap, 0.0} * u;
  b += cplx{std::sqrt(1.0 - overlap * overlap), 0.0} * perp;
  return {u, b};
}

}  // namespace whichpath::hilbert
