#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "projmetric/expr.hpp"
#include "projmetric/jet.hpp"

namespace projmetric {

// Dense tensor over {0..n-1}^rank. variance holds one char per slot,
// 'u' (upper) or 'd' (lower). Component storage is row-major.
template <class T>
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t n, std::string variance, const T& fill = T())
      : n_(n), variance_(std::move(variance)), c_(ipow(n, variance_.size()), fill) {
    for (char v : variance_)
      if (v != 'u' && v != 'd') throw std::invalid_argument("tensor variance must be 'u' or 'd'");
  }

  std::size_t dim() const { return n_; }
  std::size_t rank() const { return variance_.size(); }
  const std::string& variance() const { return variance_; }
  std::size_t size() const { return c_.size(); }

  template <class... I>
  T& operator()(I... idx) {
    return c_[offset({static_cast<std::size_t>(idx)...})];
  }
  template <class... I>
  const T& operator()(I... idx) const {
    return c_[offset({static_cast<std::size_t>(idx)...})];
  }
  T& at(std::span<const std::size_t> idx) { return c_[offset(idx)]; }
  const T& at(std::span<const std::size_t> idx) const { return c_[offset(idx)]; }
  T& flat(std::size_t k) { return c_[k]; }
  const T& flat(std::size_t k) const { return c_[k]; }

  std::size_t offset(std::span<const std::size_t> idx) const {
    std::size_t k = 0;
    for (std::size_t i : idx) k = k * n_ + i;
    return k;
  }
  std::size_t offset(std::initializer_list<std::size_t> idx) const {
    return offset(std::span<const std::size_t>(idx.begin(), idx.size()));
  }
  void unflatten(std::size_t k, std::size_t* idx) const {
    for (std::size_t s = rank(); s-- > 0;) {
      idx[s] = k % n_;
      k /= n_;
    }
  }

  template <class Fn>
  auto map(Fn&& fn) const {
    using U = decltype(fn(c_[0]));
    Tensor<U> r;
    r.n_ = n_;
    r.variance_ = variance_;
    r.c_.reserve(c_.size());
    for (const auto& v : c_) r.c_.push_back(fn(v));
    return r;
  }

  static std::size_t ipow(std::size_t b, std::size_t e) {
    std::size_t r = 1;
    while (e--) r *= b;
    return r;
  }

 private:
  template <class>
  friend class Tensor;
  std::size_t n_ = 0;
  std::string variance_;
  std::vector<T> c_;
};

// Scalar fields the curvature algorithms are written against. Both supply
// zero(), constant(Rat), scale(x, Rat), d(x, a) and is_zero(x).
struct ExprField {
  using Scalar = Expr;
  const Chart* chart;
  explicit ExprField(const Chart& c) : chart(&c) {}
  std::size_t dim() const { return chart->dimension(); }
  Expr zero() const { return Expr(); }
  Expr constant(const Rat& r) const { return Expr(r); }
  Expr scale(const Expr& x, const Rat& r) const { return x * Expr(r); }
  Expr d(const Expr& x, std::size_t a) const { return chart->differentiate(x, a); }
  bool is_zero(const Expr& x) const { return x.is_zero(); }
};

struct JetField {
  using Scalar = Jet;
  const JetLayout* layout;
  int order;
  JetField(const JetLayout* L, int ord) : layout(L), order(ord) {}
  std::size_t dim() const { return layout->dim(); }
  Jet zero() const { return Jet(layout, order); }
  Jet constant(const Rat& r) const { return Jet::constant(layout, order, r.get_d()); }
  Jet scale(const Jet& x, const Rat& r) const { return x * r.get_d(); }
  Jet d(const Jet& x, std::size_t a) const { return x.derivative(a); }
  bool is_zero(const Jet&) const { return false; }
};

// (Anti)symmetrization over a set of slots with weight 1/k!.
template <class F>
Tensor<typename F::Scalar> symmetrize(const F& fld, const Tensor<typename F::Scalar>& t,
                                      const std::vector<std::size_t>& slots, bool anti) {
  using S = typename F::Scalar;
  for (std::size_t s : slots) {
    if (s >= t.rank()) throw std::invalid_argument("symmetrize: slot out of range");
    if (t.variance()[s] != t.variance()[slots[0]]) throw std::invalid_argument("symmetrize: mixed variance");
  }
  std::vector<std::size_t> perm(slots.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::vector<std::pair<std::vector<std::size_t>, int>> perms;
  do {
    int sign = 1;
    for (std::size_t i = 0; i < perm.size(); ++i)
      for (std::size_t j = i + 1; j < perm.size(); ++j)
        if (perm[i] > perm[j]) sign = -sign;
    perms.push_back({perm, sign});
  } while (std::next_permutation(perm.begin(), perm.end()));
  Rat w(1, static_cast<long>(perms.size()));
  Tensor<S> r(t.dim(), t.variance(), fld.zero());
  std::vector<std::size_t> idx(t.rank()), src(t.rank());
  for (std::size_t k = 0; k < t.size(); ++k) {
    t.unflatten(k, idx.data());
    S acc = fld.zero();
    for (const auto& [p, sign] : perms) {
      src = idx;
      for (std::size_t i = 0; i < slots.size(); ++i) src[slots[i]] = idx[slots[p[i]]];
      const S& v = t.at(src);
      if (fld.is_zero(v)) continue;
      if (sign > 0 || !anti)
        acc += v;
      else
        acc -= v;
    }
    r.flat(k) = fld.scale(acc, w);
  }
  return r;
}

}  // namespace projmetric
