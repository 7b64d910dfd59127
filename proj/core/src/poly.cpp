#include "projmetric/poly.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace projmetric {

namespace {
thread_local std::optional<std::chrono::steady_clock::time_point> t_deadline;
}

ScopedDeadline::ScopedDeadline(double seconds) : previous_(t_deadline) {
  auto d = std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                  std::chrono::duration<double>(seconds));
  if (!t_deadline || d < *t_deadline) t_deadline = d;
}

ScopedDeadline::~ScopedDeadline() { t_deadline = previous_; }

void check_deadline() {
  if (t_deadline && std::chrono::steady_clock::now() > *t_deadline) throw BudgetExceeded();
}

// ---------------------------------------------------------------- Monomial

Monomial Monomial::of(Var v, std::uint32_t e) {
  Monomial m;
  if (e > 0) {
    m.f_.push_back({v.key, e});
    m.deg_ = e;
  }
  return m;
}

std::uint32_t Monomial::exponent(Var v) const {
  for (const auto& p : f_) {
    if (p.var == v.key) return p.exp;
    if (p.var > v.key) break;
  }
  return 0;
}

Monomial Monomial::operator*(const Monomial& o) const {
  if (o.f_.empty()) return *this;
  if (f_.empty()) return o;
  Monomial r;
  r.f_.reserve(f_.size() + o.f_.size());
  std::size_t i = 0, j = 0;
  while (i < f_.size() && j < o.f_.size()) {
    if (f_[i].var == o.f_[j].var) {
      r.f_.push_back({f_[i].var, f_[i].exp + o.f_[j].exp});
      ++i;
      ++j;
    } else if (f_[i].var < o.f_[j].var) {
      r.f_.push_back(f_[i++]);
    } else {
      r.f_.push_back(o.f_[j++]);
    }
  }
  for (; i < f_.size(); ++i) r.f_.push_back(f_[i]);
  for (; j < o.f_.size(); ++j) r.f_.push_back(o.f_[j]);
  r.deg_ = deg_ + o.deg_;
  return r;
}

Monomial Monomial::operator/(const Monomial& o) const {
  Monomial r;
  std::size_t j = 0;
  for (const auto& p : f_) {
    std::uint32_t e = p.exp;
    if (j < o.f_.size() && o.f_[j].var == p.var) e -= o.f_[j++].exp;
    if (e > 0) r.f_.push_back({p.var, e});
  }
  r.deg_ = deg_ - o.deg_;
  return r;
}

bool Monomial::divisible_by(const Monomial& o) const {
  if (o.deg_ > deg_) return false;
  std::size_t i = 0;
  for (const auto& q : o.f_) {
    while (i < f_.size() && f_[i].var < q.var) ++i;
    if (i == f_.size() || f_[i].var != q.var || f_[i].exp < q.exp) return false;
  }
  return true;
}

Monomial Monomial::without(Var v) const {
  Monomial r;
  for (const auto& p : f_)
    if (p.var != v.key) {
      r.f_.push_back(p);
      r.deg_ += p.exp;
    }
  return r;
}

Monomial Monomial::with_exponent(Var v, std::uint32_t e) const {
  Monomial r = without(v);
  if (e == 0) return r;
  return r * Monomial::of(v, e);
}

Monomial gcd(const Monomial& a, const Monomial& b) {
  Monomial r;
  std::size_t j = 0;
  for (const auto& p : a.f_) {
    while (j < b.f_.size() && b.f_[j].var < p.var) ++j;
    if (j < b.f_.size() && b.f_[j].var == p.var) {
      std::uint32_t e = std::min(p.exp, b.f_[j].exp);
      r.f_.push_back({p.var, e});
      r.deg_ += e;
    }
  }
  return r;
}

int compare(const Monomial& a, const Monomial& b) {
  if (a.degree() != b.degree()) return a.degree() > b.degree() ? 1 : -1;
  const auto& fa = a.factors();
  const auto& fb = b.factors();
  std::size_t i = 0, j = 0;
  while (i < fa.size() && j < fb.size()) {
    if (fa[i].var == fb[j].var) {
      if (fa[i].exp != fb[j].exp) return fa[i].exp > fb[j].exp ? 1 : -1;
      ++i;
      ++j;
    } else {
      return fa[i].var < fb[j].var ? 1 : -1;
    }
  }
  if (i < fa.size()) return 1;
  if (j < fb.size()) return -1;
  return 0;
}

// -------------------------------------------------------------------- Poly

namespace {

bool term_greater(const Term& a, const Term& b) { return compare(a.mono, b.mono) > 0; }

std::vector<Term> merge_add(const std::vector<Term>& a, const std::vector<Term>& b, bool negate_b) {
  std::vector<Term> r;
  r.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    int c = compare(a[i].mono, b[j].mono);
    if (c > 0) {
      r.push_back(a[i++]);
    } else if (c < 0) {
      r.push_back(b[j++]);
      if (negate_b) r.back().coef = -r.back().coef;
    } else {
      Int s = negate_b ? Int(a[i].coef - b[j].coef) : Int(a[i].coef + b[j].coef);
      if (s != 0) r.push_back({a[i].mono, std::move(s)});
      ++i;
      ++j;
    }
  }
  for (; i < a.size(); ++i) r.push_back(a[i]);
  for (; j < b.size(); ++j) {
    r.push_back(b[j]);
    if (negate_b) r.back().coef = -r.back().coef;
  }
  return r;
}

}  // namespace

Poly::Poly(long c) {
  if (c != 0) t_.push_back({Monomial(), Int(c)});
}

Poly::Poly(const Int& c) {
  if (c != 0) t_.push_back({Monomial(), c});
}

Poly Poly::var(Var v, std::uint32_t e) { return monomial(Monomial::of(v, e), Int(1)); }

Poly Poly::monomial(const Monomial& m, const Int& c) {
  Poly p;
  if (c != 0) p.t_.push_back({m, c});
  return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), term_greater);
  Poly p;
  p.t_.reserve(terms.size());
  for (auto& t : terms) {
    if (!p.t_.empty() && p.t_.back().mono == t.mono) {
      p.t_.back().coef += t.coef;
    } else {
      if (!p.t_.empty() && p.t_.back().coef == 0) p.t_.pop_back();
      p.t_.push_back(std::move(t));
    }
  }
  if (!p.t_.empty() && p.t_.back().coef == 0) p.t_.pop_back();
  return p;
}

bool Poly::is_one() const { return t_.size() == 1 && t_[0].mono.is_one() && t_[0].coef == 1; }

Int Poly::constant_value() const {
  if (t_.empty()) return Int(0);
  if (!is_constant()) throw std::logic_error("constant_value of non-constant polynomial");
  return t_[0].coef;
}

std::uint32_t Poly::total_degree() const { return t_.empty() ? 0 : t_.front().mono.degree(); }

std::uint32_t Poly::degree(Var v) const {
  std::uint32_t d = 0;
  for (const auto& t : t_) d = std::max(d, t.mono.exponent(v));
  return d;
}

std::vector<Var> Poly::variables() const {
  std::vector<std::uint32_t> keys;
  for (const auto& t : t_)
    for (const auto& p : t.mono.factors()) keys.push_back(p.var);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  std::vector<Var> r;
  r.reserve(keys.size());
  for (auto k : keys) r.push_back(Var{k});
  return r;
}

bool Poly::contains(Var v) const {
  for (const auto& t : t_)
    if (t.mono.exponent(v) > 0) return true;
  return false;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& t : r.t_) t.coef = -t.coef;
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  if (o.t_.empty()) return *this;
  if (t_.empty()) return *this = o;
  t_ = merge_add(t_, o.t_, false);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (o.t_.empty()) return *this;
  t_ = merge_add(t_, o.t_, true);
  return *this;
}

Poly& Poly::operator*=(const Poly& o) { return *this = *this * o; }

namespace {

// Packs monomials over at most 7 variables into grlex-ordered 64-bit keys:
// total degree in the top byte, then one byte per variable in increasing key
// order. Products become key additions.
struct PackedMul {
  std::vector<std::uint32_t> vars;

  bool setup(const Poly& a, const Poly& b) {
    std::uint32_t da = 0, db = 0;
    for (const auto* p : {&a, &b})
      for (const auto& t : p->terms())
        for (const auto& f : t.mono.factors())
          if (std::find(vars.begin(), vars.end(), f.var) == vars.end()) {
            if (vars.size() == 7) return false;
            vars.push_back(f.var);
          }
    for (const auto& t : a.terms()) da = std::max(da, t.mono.degree());
    for (const auto& t : b.terms()) db = std::max(db, t.mono.degree());
    if (da + db > 255) return false;
    std::sort(vars.begin(), vars.end());
    return true;
  }
  std::uint64_t pack(const Monomial& m) const {
    std::uint64_t k = static_cast<std::uint64_t>(m.degree()) << 56;
    for (const auto& f : m.factors()) {
      std::size_t i = static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), f.var) - vars.begin());
      k |= static_cast<std::uint64_t>(f.exp) << (48 - 8 * i);
    }
    return k;
  }
  Monomial unpack(std::uint64_t k) const {
    Monomial m;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      auto e = static_cast<std::uint32_t>((k >> (48 - 8 * i)) & 0xff);
      if (e) m = m * Monomial::of(Var{vars[i]}, e);
    }
    return m;
  }
};

bool small_coefficients(const Poly& p) {
  for (const auto& t : p.terms())
    if (!t.coef.fits_sint_p()) return false;
  return true;
}

}  // namespace

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  if (a.size() == 1) return b.times_monomial(a.t_[0].mono, a.t_[0].coef);
  if (b.size() == 1) return a.times_monomial(b.t_[0].mono, b.t_[0].coef);
  PackedMul pm;
  if (pm.setup(a, b)) {
    std::vector<std::uint64_t> ka, kb;
    ka.reserve(a.size());
    kb.reserve(b.size());
    for (const auto& t : a.t_) ka.push_back(pm.pack(t.mono));
    for (const auto& t : b.t_) kb.push_back(pm.pack(t.mono));
    Poly r;
    if (small_coefficients(a) && small_coefficients(b)) {
      // Open-addressing accumulation, then sort the distinct keys.
      std::size_t cap = 16;
      while (cap < 2 * a.size() * b.size()) cap <<= 1;
      std::vector<std::uint64_t> keys(cap, ~0ULL);
      std::vector<__int128> vals(cap, 0);
      std::vector<std::pair<std::uint64_t, __int128>> prod;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const long ca = a.t_[i].coef.get_si();
        for (std::size_t j = 0; j < b.size(); ++j) {
          std::uint64_t k = ka[i] + kb[j];
          std::size_t h = static_cast<std::size_t>((k * 0x9E3779B97F4A7C15ULL) >> 20) & (cap - 1);
          while (keys[h] != k && keys[h] != ~0ULL) h = (h + 1) & (cap - 1);
          keys[h] = k;
          vals[h] += static_cast<__int128>(ca) * b.t_[j].coef.get_si();
        }
      }
      for (std::size_t h = 0; h < cap; ++h)
        if (keys[h] != ~0ULL) prod.push_back({keys[h], vals[h]});
      std::sort(prod.begin(), prod.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
      for (std::size_t i = 0; i < prod.size();) {
        std::size_t j = i;
        __int128 c = 0;
        while (j < prod.size() && prod[j].first == prod[i].first) c += prod[j++].second;
        if (c != 0) {
          Int ci;
          bool neg = c < 0;
          unsigned __int128 u = neg ? static_cast<unsigned __int128>(-c) : static_cast<unsigned __int128>(c);
          if (u >> 63) {
            ci = Int(static_cast<unsigned long>(u >> 64));
            ci <<= 64;
            ci += Int(static_cast<unsigned long>(u & ~0ULL));
          } else {
            ci = Int(static_cast<long>(u));
          }
          if (neg) ci = -ci;
          r.t_.push_back({pm.unpack(prod[i].first), std::move(ci)});
        }
        i = j;
      }
    } else {
      std::vector<std::pair<std::uint64_t, Int>> prod;
      prod.reserve(a.size() * b.size());
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) prod.push_back({ka[i] + kb[j], a.t_[i].coef * b.t_[j].coef});
      std::sort(prod.begin(), prod.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
      for (std::size_t i = 0; i < prod.size();) {
        std::size_t j = i;
        Int c = 0;
        while (j < prod.size() && prod[j].first == prod[i].first) c += prod[j++].second;
        if (c != 0) r.t_.push_back({pm.unpack(prod[i].first), std::move(c)});
        i = j;
      }
    }
    return r;
  }
  const Poly& s = a.size() <= b.size() ? a : b;
  const Poly& l = a.size() <= b.size() ? b : a;
  // Accumulate row by row with pairwise merging to keep the working set sorted.
  std::vector<std::vector<Term>> rows;
  rows.reserve(s.size());
  for (const auto& ts : s.t_) {
    std::vector<Term> row;
    row.reserve(l.size());
    for (const auto& tl : l.t_) row.push_back({ts.mono * tl.mono, ts.coef * tl.coef});
    rows.push_back(std::move(row));
  }
  while (rows.size() > 1) {
    std::vector<std::vector<Term>> next;
    next.reserve((rows.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < rows.size(); i += 2) next.push_back(merge_add(rows[i], rows[i + 1], false));
    if (rows.size() % 2) next.push_back(std::move(rows.back()));
    rows = std::move(next);
  }
  Poly r;
  r.t_ = std::move(rows.front());
  return r;
}

Poly Poly::scaled(const Int& c) const {
  if (c == 0) return Poly();
  Poly r = *this;
  for (auto& t : r.t_) t.coef *= c;
  return r;
}

Poly Poly::times_monomial(const Monomial& m, const Int& c) const {
  if (c == 0) return Poly();
  Poly r;
  r.t_.reserve(t_.size());
  for (const auto& t : t_) r.t_.push_back({t.mono * m, t.coef * c});
  return r;
}

Poly Poly::pow(unsigned e) const {
  Poly result(1L), base = *this;
  while (e) {
    if (e & 1u) result = result * base;
    e >>= 1u;
    if (e) base = base * base;
  }
  return result;
}

Poly Poly::divided_exact(const Int& c) const {
  Poly r = *this;
  for (auto& t : r.t_) mpz_divexact(t.coef.get_mpz_t(), t.coef.get_mpz_t(), c.get_mpz_t());
  return r;
}

bool operator==(const Poly& a, const Poly& b) {
  if (a.t_.size() != b.t_.size()) return false;
  for (std::size_t i = 0; i < a.t_.size(); ++i)
    if (a.t_[i].coef != b.t_[i].coef || !(a.t_[i].mono == b.t_[i].mono)) return false;
  return true;
}

Poly Poly::derivative(Var v) const {
  Poly r;
  for (const auto& t : t_) {
    std::uint32_t e = t.mono.exponent(v);
    if (e == 0) continue;
    r.t_.push_back({t.mono.with_exponent(v, e - 1), t.coef * e});
  }
  return r;
}

std::vector<Poly> Poly::coefficients_in(Var v) const {
  std::vector<Poly> c(degree(v) + 1);
  for (const auto& t : t_) {
    std::uint32_t e = t.mono.exponent(v);
    c[e].t_.push_back({e ? t.mono.without(v) : t.mono, t.coef});
  }
  return c;
}

Poly Poly::from_coefficients(Var v, const std::vector<Poly>& coeffs) {
  std::vector<Term> terms;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    Monomial vk = Monomial::of(v, static_cast<std::uint32_t>(k));
    for (const auto& t : coeffs[k].t_) terms.push_back({t.mono * vk, t.coef});
  }
  return from_terms(std::move(terms));
}

Poly Poly::substitute(Var v, const Poly& value) const {
  if (!contains(v)) return *this;
  auto c = coefficients_in(v);
  Poly r = c.back();
  for (std::size_t k = c.size() - 1; k-- > 0;) r = r * value + c[k];
  return r;
}

Poly Poly::evaluate_at(Var v, const Int& value) const {
  std::vector<Term> terms;
  terms.reserve(t_.size());
  std::vector<Int> powers{Int(1)};
  for (const auto& t : t_) {
    std::uint32_t e = t.mono.exponent(v);
    while (powers.size() <= e) powers.push_back(powers.back() * value);
    terms.push_back({e ? t.mono.without(v) : t.mono, t.coef * powers[e]});
  }
  return from_terms(std::move(terms));
}

Rat Poly::evaluate(const std::function<Rat(Var)>& value) const {
  std::map<std::uint32_t, Rat> cache;
  Rat sum = 0;
  for (const auto& t : t_) {
    Rat term = t.coef;
    for (const auto& p : t.mono.factors()) {
      auto it = cache.find(p.var);
      if (it == cache.end()) it = cache.emplace(p.var, value(Var{p.var})).first;
      Rat pw;
      mpz_pow_ui(pw.get_num_mpz_t(), it->second.get_num_mpz_t(), p.exp);
      mpz_pow_ui(pw.get_den_mpz_t(), it->second.get_den_mpz_t(), p.exp);
      term *= pw;
    }
    sum += term;
  }
  return sum;
}

Int Poly::content() const {
  Int g = 0;
  for (const auto& t : t_) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coef.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

Monomial Poly::monomial_content() const {
  if (t_.empty()) return Monomial();
  Monomial m = t_[0].mono;
  for (std::size_t i = 1; i < t_.size() && !m.is_one(); ++i) m = gcd(m, t_[i].mono);
  return m;
}

Poly Poly::primitive_part() const {
  if (t_.empty()) return *this;
  Int c = content();
  if (lc() < 0) c = -c;
  if (c == 1) return *this;
  return divided_exact(c);
}

std::size_t Poly::max_coef_bits() const {
  std::size_t b = 0;
  for (const auto& t : t_) b = std::max(b, mpz_sizeinbase(t.coef.get_mpz_t(), 2));
  return b;
}

std::string Poly::to_string(const std::function<std::string(Var)>& name) const {
  if (t_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : t_) {
    Int c = t.coef;
    bool neg = c < 0;
    if (neg) c = -c;
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    bool unit = c == 1 && !t.mono.is_one();
    if (!unit) os << c.get_str();
    bool star = !unit;
    for (const auto& p : t.mono.factors()) {
      if (star) os << "*";
      os << name(Var{p.var});
      if (p.exp > 1) os << "^" << p.exp;
      star = true;
    }
  }
  return os.str();
}

// ---------------------------------------------------------------- Division

bool divides(const Poly& d, const Poly& p, Poly* q) {
  if (d.is_zero()) throw std::domain_error("division by zero polynomial");
  if (p.is_zero()) {
    if (q) *q = Poly();
    return true;
  }
  if (d.is_constant()) {
    const Int& c = d.lc();
    for (const auto& t : p.terms())
      if (!mpz_divisible_p(t.coef.get_mpz_t(), c.get_mpz_t())) return false;
    if (q) *q = p.divided_exact(c);
    return true;
  }
  if (p.size() < d.size() && p.size() == 1) return false;
  if (!p.lm().divisible_by(d.lm())) return false;
  if (!p.terms().back().mono.divisible_by(d.terms().back().mono)) return false;
  for (Var v : d.variables())
    if (d.degree(v) > p.degree(v)) return false;
  if (d.is_monomial()) {
    const auto& dt = d.terms()[0];
    std::vector<Term> out;
    out.reserve(p.size());
    for (const auto& t : p.terms()) {
      if (!t.mono.divisible_by(dt.mono) || !mpz_divisible_p(t.coef.get_mpz_t(), dt.coef.get_mpz_t())) return false;
      Int c;
      mpz_divexact(c.get_mpz_t(), t.coef.get_mpz_t(), dt.coef.get_mpz_t());
      out.push_back({t.mono / dt.mono, std::move(c)});
    }
    if (q) *q = Poly::from_terms(std::move(out));
    return true;
  }
  Poly r = p;
  std::vector<Term> quot;
  const Monomial& dm = d.lm();
  const Int& dc = d.lc();
  while (!r.is_zero()) {
    const Term& lt = r.terms().front();
    if (lt.mono.degree() < dm.degree() || !lt.mono.divisible_by(dm)) return false;
    if (!mpz_divisible_p(lt.coef.get_mpz_t(), dc.get_mpz_t())) return false;
    Int c;
    mpz_divexact(c.get_mpz_t(), lt.coef.get_mpz_t(), dc.get_mpz_t());
    Monomial m = lt.mono / dm;
    r -= d.times_monomial(m, c);
    quot.push_back({std::move(m), std::move(c)});
  }
  if (q) *q = Poly::from_terms(std::move(quot));
  return true;
}

Poly exact_div(const Poly& p, const Poly& d) {
  Poly q;
  if (!divides(d, p, &q)) throw std::logic_error("exact_div: divisor does not divide");
  return q;
}

Poly pseudo_remainder(const Poly& f, const Poly& g, Var v) {
  std::uint32_t dg = g.degree(v);
  std::uint32_t df = f.degree(v);
  if (df < dg) return f;
  auto gc = g.coefficients_in(v);
  Poly lcg = gc[dg];
  Poly r = f;
  int e = static_cast<int>(df - dg) + 1;
  while (!r.is_zero()) {
    check_deadline();
    std::uint32_t dr = r.degree(v);
    if (dr < dg) break;
    Poly lr = r.coefficients_in(v)[dr];
    Poly shift = lr * Poly::var(v, dr - dg);
    r = r * lcg - shift * g;
    --e;
  }
  if (e > 0) r = r * lcg.pow(static_cast<unsigned>(e));
  return r;
}

// --------------------------------------------------------------------- GCD

namespace {

Poly normalize_sign(Poly p) {
  if (!p.is_zero() && p.lc() < 0) p = -p;
  return p;
}

Poly core_gcd(const Poly& f, const Poly& g);

Poly content_in(const Poly& f, Var v) {
  auto c = f.coefficients_in(v);
  // Start from the smallest coefficient for early exits.
  std::sort(c.begin(), c.end(), [](const Poly& a, const Poly& b) { return a.size() < b.size(); });
  Poly acc;
  for (const auto& p : c) {
    if (p.is_zero()) continue;
    acc = acc.is_zero() ? normalize_sign(p) : gcd(acc, p);
    if (acc.is_constant()) return Poly(1L);
  }
  return acc;
}

Poly symmetric_mod(const Poly& h, const Int& xi, const Int& half) {
  std::vector<Term> out;
  for (const auto& t : h.terms()) {
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), t.coef.get_mpz_t(), xi.get_mpz_t());
    if (r > half) r -= xi;
    if (r != 0) out.push_back({t.mono, std::move(r)});
  }
  return Poly::from_terms(std::move(out));
}

Poly interpolate(Poly h, const Int& xi, Var v) {
  Int half = xi / 2;
  std::vector<Poly> coeffs;
  while (!h.is_zero()) {
    Poly g = symmetric_mod(h, xi, half);
    h = (h - g).divided_exact(xi);
    coeffs.push_back(std::move(g));
  }
  return Poly::from_coefficients(v, coeffs);
}

Int max_norm(const Poly& p) {
  Int m = 0;
  for (const auto& t : p.terms())
    if (abs(t.coef) > m) m = abs(t.coef);
  return m;
}

constexpr std::size_t kHeuristicBitCap = 60000;

// Heuristic GCD by evaluation/interpolation. f, g primitive over Z and
// both containing v.
std::optional<Poly> heuristic_gcd(const Poly& f, const Poly& g, Var v) {
  Int fn = max_norm(f), gn = max_norm(g);
  Int b = 2 * std::min(fn, gn) + 29;
  Int sb = sqrt(b);
  Int x = b;
  if (Int(99 * sb) < x) x = 99 * sb;
  Int alt = 2 * std::min(Int(fn / abs(f.lc())), Int(gn / abs(g.lc()))) + 2;
  if (alt > x) x = alt;
  std::uint32_t dmax = std::max(f.degree(v), g.degree(v));
  for (int attempt = 0; attempt < 6; ++attempt) {
    check_deadline();
    std::size_t bits = mpz_sizeinbase(x.get_mpz_t(), 2) * (dmax + 1) + std::max(f.max_coef_bits(), g.max_coef_bits());
    if (bits > kHeuristicBitCap) return std::nullopt;
    Poly ff = f.evaluate_at(v, x);
    Poly gg = g.evaluate_at(v, x);
    if (!ff.is_zero() && !gg.is_zero()) {
      Poly h = gcd(ff, gg);
      Poly cand = interpolate(h, x, v).primitive_part();
      if (!cand.is_zero() && divides(cand, f) && divides(cand, g)) return cand;
      // Cofactor route.
      Poly cf;
      if (divides(h, ff, &cf)) {
        Poly cff = interpolate(cf, x, v).primitive_part();
        Poly cand2;
        if (!cff.is_zero() && divides(cff, f, &cand2)) {
          cand2 = cand2.primitive_part();
          if (divides(cand2, g)) return cand2;
        }
      }
    }
    Int s = sqrt(sqrt(x));
    x = 73794 * x * s / 27011;
  }
  return std::nullopt;
}

// Primitive PRS in variable v.
Poly prs_gcd(Poly f, Poly g, Var v) {
  if (f.degree(v) < g.degree(v)) std::swap(f, g);
  Poly cf = content_in(f, v), cg = content_in(g, v);
  Poly c = gcd(cf, cg);
  f = exact_div(f, cf);
  g = exact_div(g, cg);
  while (g.degree(v) > 0) {
    Poly r = pseudo_remainder(f, g, v);
    if (r.is_zero()) break;
    f = std::move(g);
    if (r.degree(v) == 0) {
      g = Poly(1L);
      break;
    }
    g = exact_div(r, content_in(r, v));
  }
  if (g.degree(v) == 0) return normalize_sign(c);
  g = exact_div(g, content_in(g, v)).primitive_part();
  return normalize_sign(c * g);
}

// f, g: nonzero, primitive over Z, no monomial content.
Poly core_gcd(const Poly& f, const Poly& g) {
  if (f.is_constant() || g.is_constant()) return Poly(1L);
  if (f == g || f == -g) return normalize_sign(f);
  if (f.is_monomial() || g.is_monomial()) return Poly(1L);
  auto vf = f.variables();
  auto vg = g.variables();
  for (Var v : vf)
    if (!std::binary_search(vg.begin(), vg.end(), v)) return gcd(content_in(f, v), g);
  for (Var v : vg)
    if (!std::binary_search(vf.begin(), vf.end(), v)) return gcd(f, content_in(g, v));
  const Poly& small = f.size() <= g.size() ? f : g;
  const Poly& large = f.size() <= g.size() ? g : f;
  if (divides(small, large)) return normalize_sign(small);
  // Main variable: the one of lowest combined degree.
  Var best = vf.front();
  std::uint32_t bd = ~0u;
  for (Var v : vf) {
    std::uint32_t d = f.degree(v) + g.degree(v);
    if (d < bd) {
      bd = d;
      best = v;
    }
  }
  if (auto h = heuristic_gcd(f, g, best)) return normalize_sign(*h);
  return prs_gcd(f, g, best);
}

}  // namespace

Poly gcd(const Poly& a, const Poly& b) {
  check_deadline();
  if (a.is_zero()) return normalize_sign(b);
  if (b.is_zero()) return normalize_sign(a);
  Int ca = a.content(), cb = b.content();
  Int c;
  mpz_gcd(c.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
  if (a.is_constant() || b.is_constant()) return Poly(c);
  Monomial ma = a.monomial_content(), mb = b.monomial_content();
  Monomial m = gcd(ma, mb);
  Poly f = a, g = b;
  if (ca != 1) f = f.divided_exact(ca);
  if (cb != 1) g = g.divided_exact(cb);
  if (!ma.is_one()) f = exact_div(f, Poly::monomial(ma, Int(1)));
  if (!mb.is_one()) g = exact_div(g, Poly::monomial(mb, Int(1)));
  Poly h = core_gcd(normalize_sign(f), normalize_sign(g));
  return h.times_monomial(m, c);
}

}  // namespace projmetric
