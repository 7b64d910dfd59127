#include "projmetric/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace projmetric {

// --------------------------------------------------------------- JetLayout

namespace {

void enumerate(std::size_t n, int deg, std::vector<int>& cur, std::size_t pos, std::vector<std::vector<int>>& out) {
  if (pos == n - 1) {
    cur[pos] = deg;
    out.push_back(cur);
    return;
  }
  for (int e = deg; e >= 0; --e) {
    cur[pos] = e;
    enumerate(n, deg - e, cur, pos + 1, out);
  }
}

}  // namespace

JetLayout::JetLayout(std::size_t n, int order) : n_(n), order_(order) {
  offsets_.push_back(0);
  for (int d = 0; d <= order; ++d) {
    std::vector<int> cur(n, 0);
    std::vector<std::vector<int>> level;
    enumerate(n, d, cur, 0, level);
    for (auto& e : level) {
      exps_.push_back(e);
      deg_.push_back(d);
    }
    offsets_.push_back(exps_.size());
  }
  std::vector<std::vector<Triple>> byk(exps_.size());
  for (std::size_t i = 0; i < exps_.size(); ++i)
    for (std::size_t j = 0; j < exps_.size(); ++j) {
      if (deg_[i] + deg_[j] > order) continue;
      std::vector<int> e(n);
      for (std::size_t a = 0; a < n; ++a) e[a] = exps_[i][a] + exps_[j][a];
      std::size_t k = index_of(e);
      byk[k].push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(k)});
    }
  for (std::size_t k = 0; k < byk.size(); ++k) {
    tstart_.push_back(triples_.size());
    triples_.insert(triples_.end(), byk[k].begin(), byk[k].end());
  }
  tstart_.push_back(triples_.size());
  dmaps_.resize(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t i = 0; i < exps_.size(); ++i) {
      if (exps_[i][a] == 0) continue;
      std::vector<int> e = exps_[i];
      e[a] -= 1;
      dmaps_[a].push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(index_of(e)),
                           static_cast<double>(exps_[i][a])});
    }
}

std::size_t JetLayout::index_of(const std::vector<int>& e) const {
  int d = 0;
  for (int v : e) d += v;
  if (d > order_) throw std::out_of_range("jet exponent beyond layout order");
  for (std::size_t i = offsets_[static_cast<std::size_t>(d)]; i < offsets_[static_cast<std::size_t>(d) + 1]; ++i)
    if (exps_[i] == e) return i;
  throw std::logic_error("jet exponent not found");
}

std::shared_ptr<const JetLayout> JetLayout::get(std::size_t n, int order) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, int>, std::shared_ptr<const JetLayout>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{n, order}];
  if (!slot) slot = std::make_shared<JetLayout>(n, order);
  return slot;
}

// --------------------------------------------------------------------- Jet

Jet Jet::constant(const JetLayout* layout, int order, double v) {
  Jet j(layout, order);
  j.c_[0] = v;
  return j;
}

Jet Jet::coordinate(const JetLayout* layout, int order, std::size_t a, double v) {
  Jet j = constant(layout, order, v);
  if (order >= 1) j.c_[layout->unit(a)] = 1.0;
  return j;
}

double Jet::partial(const std::vector<int>& alpha) const {
  std::size_t i = L_->index_of(alpha);
  double f = 1.0;
  for (int e : alpha)
    for (int k = 2; k <= e; ++k) f *= k;
  return coef(i) * f;
}

Jet Jet::truncated(int order) const {
  if (order >= order_) return *this;
  Jet r(L_, order);
  std::copy(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(r.c_.size()), r.c_.begin());
  return r;
}

Jet Jet::derivative(std::size_t a) const {
  if (order_ == 0) throw std::logic_error("derivative of order-0 jet");
  Jet r(L_, order_ - 1);
  for (const auto& s : L_->derivative_map(a))
    if (s.src < c_.size() && s.dst < r.c_.size()) r.c_[s.dst] += s.factor * c_[s.src];
  return r;
}

Jet& Jet::operator+=(const Jet& o) {
  if (!L_) return *this = o;
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (!L_) return *this = -o;
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (auto& v : r.c_) v = -v;
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  int order = std::min(a.order_, b.order_);
  Jet r(a.L_, order);
  std::size_t n = r.c_.size();
  const auto& T = a.L_->triples();
  std::size_t end = a.L_->triples_end(n - 1);
  for (std::size_t t = 0; t < end; ++t) {
    const auto& tr = T[t];
    r.c_[tr.k] += a.c_[tr.i] * b.c_[tr.j];
  }
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  int order = std::min(a.order_, b.order_);
  if (b.c_[0] == 0.0) throw EvaluationError("division by zero jet");
  Jet r(a.L_, order);
  double inv = 1.0 / b.c_[0];
  const auto& T = a.L_->triples();
  for (std::size_t k = 0; k < r.c_.size(); ++k) {
    double s = a.c_[k];
    for (std::size_t t = a.L_->triples_begin(k); t < a.L_->triples_end(k); ++t) {
      const auto& tr = T[t];
      if (tr.j == 0) continue;
      s -= r.c_[tr.i] * b.c_[tr.j];
    }
    r.c_[k] = s * inv;
  }
  return r;
}

// ------------------------------------------------------------ CompiledExpr

CompiledExpr::CompiledExpr(const Expr& e, const Chart& chart) {
  (void)chart;
  for (Var v : e.variables()) vars_.push_back(v.key);
  auto convert = [&](const Poly& p, std::vector<Term>& out) {
    for (const auto& t : p.terms()) {
      Term ct;
      ct.coef = t.coef.get_d();
      for (const auto& f : t.mono.factors()) ct.pows.push_back({f.var, f.exp});
      out.push_back(std::move(ct));
    }
  };
  if (!e.is_zero()) {
    convert(e.num(), num_);
    if (!e.den().is_one()) convert(e.den(), den_);
  }
}

// ---------------------------------------------------------- PointEvaluator

PointEvaluator::PointEvaluator(const Chart& chart, const NumericEnv& env, std::span<const double> point, int order)
    : chart_(chart), env_(env), point_(point.begin(), point.end()), order_(order),
      layout_(JetLayout::get(chart.dimension(), std::max(order, 0))) {}

Jet PointEvaluator::symbol_jet(std::uint32_t key) {
  Var v{key};
  const JetLayout* L = layout_.get();
  switch (v.kind()) {
    case VarKind::Coordinate:
      return Jet::coordinate(L, order_, v.index(), point_.at(v.index()));
    case VarKind::Parameter:
      if (v.index() >= env_.parameters.size() || std::isnan(env_.parameters[v.index()]))
        throw EvaluationError("missing numeric value for parameter " + chart_.name(v));
      return Jet::constant(L, order_, env_.parameters[v.index()]);
    case VarKind::Function: {
      std::size_t fi = v.index();
      if (fi >= env_.functions.size() || !env_.functions[fi])
        throw EvaluationError("missing numeric implementation for " + chart_.functions().at(fi).name);
      std::size_t arg = chart_.functions()[fi].arg;
      int k = static_cast<int>(v.order());
      std::vector<double> d(static_cast<std::size_t>(k + order_) + 1);
      env_.functions[fi](point_[arg], k + order_, d.data());
      Jet j(L, order_);
      double fact = 1.0;
      for (int m = 0; m <= order_; ++m) {
        if (m > 0) fact *= m;
        double val = d[static_cast<std::size_t>(k + m)];
        if (!std::isfinite(val)) throw EvaluationError("non-finite value of " + chart_.name(v));
        std::vector<int> e(chart_.dimension(), 0);
        e[arg] = m;
        j.coef_ref(L->index_of(e)) = val / fact;
      }
      return j;
    }
    default:
      throw EvaluationError("cannot evaluate auxiliary symbol");
  }
}

const Jet& PointEvaluator::power(std::uint32_t var, std::uint32_t e) {
  auto it = std::find_if(cache_.begin(), cache_.end(), [&](const auto& p) { return p.first == var; });
  if (it == cache_.end()) {
    cache_.push_back({var, {Jet::constant(layout_.get(), order_, 1.0), symbol_jet(var)}});
    it = cache_.end() - 1;
  }
  auto& pw = it->second;
  while (pw.size() <= e) pw.push_back(pw.back() * pw[1]);
  return pw[e];
}

Jet PointEvaluator::jet(const CompiledExpr& e) {
  const JetLayout* L = layout_.get();
  auto eval_terms = [&](const std::vector<CompiledExpr::Term>& terms) {
    Jet acc(L, order_);
    for (const auto& t : terms) {
      if (t.pows.empty()) {
        acc.coef_ref(0) += t.coef;
        continue;
      }
      Jet prod = power(t.pows[0].first, t.pows[0].second);
      for (std::size_t i = 1; i < t.pows.size(); ++i) prod = prod * power(t.pows[i].first, t.pows[i].second);
      acc += prod * t.coef;
    }
    return acc;
  };
  Jet n = eval_terms(e.num());
  if (e.den().empty()) return n;
  Jet d = eval_terms(e.den());
  if (d.value() == 0.0) throw EvaluationError("pole at evaluation point");
  return n / d;
}

double PointEvaluator::value(const CompiledExpr& e) {
  auto eval_terms = [&](const std::vector<CompiledExpr::Term>& terms) {
    double acc = 0.0;
    for (const auto& t : terms) {
      double p = t.coef;
      for (const auto& [var, ex] : t.pows) p *= std::pow(power(var, 1).value(), static_cast<int>(ex));
      acc += p;
    }
    return acc;
  };
  double n = eval_terms(e.num());
  if (e.den().empty()) return n;
  double d = eval_terms(e.den());
  if (d == 0.0) throw EvaluationError("pole at evaluation point");
  return n / d;
}

}  // namespace projmetric
