#pragma once

#include <functional>
#include <random>
#include <tuple>
#include <string>
#include <vector>

#include "projmetric/connection.hpp"
#include "projmetric/parser.hpp"

namespace fixtures {

using namespace projmetric;

inline Chart xyz_chart(std::vector<std::string> functions, std::vector<std::string> params = {}) {
  std::vector<FunctionSymbol> fs;
  for (auto& f : functions) fs.push_back({f, 2, {}});
  return Chart({"x", "y", "z"}, fs, params);
}

// Entry list with 1-based indices, as read off connection 1-forms.
inline Connection conn_from(const Chart& ch, const std::vector<std::tuple<int, int, int, std::string>>& entries) {
  std::vector<GammaEntry> es;
  for (const auto& [a, b, c, s] : entries)
    es.push_back({static_cast<std::size_t>(a - 1), static_cast<std::size_t>(b - 1), static_cast<std::size_t>(c - 1),
                  parse_expression(s, ch)});
  return make_connection(ch, es);
}

// Connection 1-forms with a,b,c functions of z.
inline Connection example1(const Chart& ch) {
  return conn_from(ch, {{1, 1, 1, "(1/2)*a"},
                        {1, 1, 2, "-(1/4)*b"},
                        {2, 2, 1, "-(1/4)*a"},
                        {2, 2, 2, "(1/2)*b"},
                        {3, 1, 2, "c"},
                        {3, 1, 3, "-(1/4)*a"},
                        {3, 2, 3, "-(1/4)*b"},
                        {3, 3, 1, "-(1/4)*a"},
                        {3, 3, 2, "-(1/4)*b"}});
}

// Chart must register h(z); Γ^3_{12} = h'.
inline Connection example2(const Chart& ch) {
  return make_connection(ch, {{2, 0, 1, ch.f("h", 1)}});
}

inline Connection example3(const Chart& ch) {
  return conn_from(ch, {{1, 2, 3, "a"}, {2, 1, 3, "b"}, {3, 1, 2, "c"}});
}

inline Expr random_poly(std::mt19937& rng, const Chart& ch, int degree, double density = 0.5, int coef = 3) {
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> c(-coef, coef);
  const std::size_t n = ch.dimension();
  Expr acc;
  std::vector<int> e(n, 0);
  // enumerate exponents with total degree <= degree
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i == n) {
      if (u(rng) > density) return;
      int k = c(rng);
      if (k == 0) return;
      Expr m(k);
      for (std::size_t a = 0; a < n; ++a) m = m * ch.x(a).pow(e[a]);
      acc += m;
      return;
    }
    for (int k = 0; k <= left; ++k) {
      e[i] = k;
      rec(i + 1, left - k);
    }
    e[i] = 0;
  };
  rec(0, degree);
  return acc;
}

inline Connection random_connection(std::mt19937& rng, const Chart& ch, int degree, double density = 0.3) {
  const std::size_t n = ch.dimension();
  Tensor<Expr> G(n, "udd");
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = b; c < n; ++c) {
        Expr v = random_poly(rng, ch, degree, density);
        G(a, b, c) = v;
        G(a, c, b) = v;
      }
  return Connection(ch, std::move(G));
}

inline Chart coords_chart(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
  return Chart(names);
}

}  // namespace fixtures
