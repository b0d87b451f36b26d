#pragma once

// Relation residuals computed straight from raw table entries, without the
// library's Element arithmetic or evaluator. A value is a set of
// (level, generator) terms over Z/2; operations are expanded term by term.

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "ainf/pairing.hpp"

namespace ainf_test {

using Terms = std::set<std::pair<ainf::Rational, ainf::Index>>;

inline void toggle(Terms& t, const ainf::Rational& level, ainf::Index g) {
  auto key = std::make_pair(level, g);
  if (!t.erase(key)) t.insert(key);
}

inline Terms& operator^=(Terms& a, const Terms& b) {
  for (const auto& [l, g] : b) toggle(a, l, g);
  return a;
}

inline Terms unit_terms(ainf::Index g) { return Terms{{ainf::Rational(0), g}}; }

inline Terms terms_of(const ainf::Element& e) {
  Terms out;
  for (ainf::Index g = 0; g < e.size(); ++g) {
    for (const auto& [l, c] : e[g].terms()) toggle(out, l, g);
  }
  return out;
}

/// Multilinear expansion of one signature of a table over term sets.
inline Terms apply_op(const ainf::GappedOperationTable& table, ainf::Signature sig, const std::vector<Terms>& inputs) {
  Terms out;
  const ainf::Rational cutoff = table.ring()->cutoff();
  const auto& all = table.by_signature();
  auto it = all.find(sig);
  if (it == all.end()) return out;
  for (const auto& [tuple, levels] : it->second) {
    if (tuple.size() != inputs.size()) continue;
    std::vector<std::vector<ainf::Rational>> choices(tuple.size());
    bool empty = false;
    for (std::size_t i = 0; i < tuple.size() && !empty; ++i) {
      for (const auto& [l, g] : inputs[i]) {
        if (g == tuple[i]) choices[i].push_back(l);
      }
      empty = choices[i].empty();
    }
    if (empty) continue;
    std::vector<std::size_t> pos(tuple.size(), 0);
    while (true) {
      ainf::Rational sum = 0;
      for (std::size_t i = 0; i < pos.size(); ++i) sum += choices[i][pos[i]];
      for (const auto& [level, outputs] : levels) {
        if (sum + level < cutoff) {
          for (ainf::Index o : outputs) toggle(out, sum + level, o);
        }
      }
      std::size_t i = 0;
      while (i < pos.size() && ++pos[i] == choices[i].size()) pos[i++] = 0;
      if (i == pos.size()) break;
    }
  }
  return out;
}

using TermList = std::vector<Terms>;

inline TermList concat(std::initializer_list<TermList> parts) {
  TermList out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

inline TermList sub(const TermList& xs, std::size_t b, std::size_t e) {
  return TermList(xs.begin() + static_cast<std::ptrdiff_t>(b), xs.begin() + static_cast<std::ptrdiff_t>(e));
}

/// Every way of replacing a block of xs by m of it.
inline void insert_m(Terms& acc, const ainf::GappedOperationTable& m, const TermList& xs,
                     const std::function<Terms(const TermList&)>& outer) {
  for (std::size_t j = 0; j <= xs.size(); ++j) {
    for (std::size_t i = 0; i + j <= xs.size(); ++i) {
      const Terms inner = apply_op(m, {static_cast<int>(j), 0}, sub(xs, i, i + j));
      if (inner.empty()) continue;
      acc ^= outer(concat({sub(xs, 0, i), {inner}, sub(xs, i + j, xs.size())}));
    }
  }
}

inline ainf::Signature one_string(std::size_t k) { return {static_cast<int>(k), 0}; }

inline Terms oracle_algebra_residual(const ainf::FilteredAlgebra& a, const TermList& xs) {
  Terms acc;
  insert_m(acc, a.ops(), xs, [&](const TermList& o) { return apply_op(a.ops(), one_string(o.size()), o); });
  return acc;
}

inline Terms oracle_module_residual(const ainf::FilteredRightModule& m, const Terms& y, const TermList& xs) {
  Terms acc;
  const auto& n = m.ops();
  for (std::size_t l = 0; l <= xs.size(); ++l) {
    const Terms inner = apply_op(n, one_string(l), concat({{y}, sub(xs, 0, l)}));
    if (!inner.empty()) acc ^= apply_op(n, one_string(xs.size() - l), concat({{inner}, sub(xs, l, xs.size())}));
  }
  insert_m(acc, m.algebra()->ops(), xs,
           [&](const TermList& o) { return apply_op(n, one_string(o.size()), concat({{y}, o})); });
  return acc;
}

inline Terms oracle_homomorphism_residual(const ainf::AInftyHomomorphism& f, const Terms& y, const TermList& xs) {
  Terms acc;
  const auto& src = f.source()->ops();
  const auto& dst = f.target()->ops();
  const std::size_t k = xs.size();
  for (std::size_t l = 0; l <= k; ++l) {
    const Terms img = apply_op(f.ops(), one_string(l), concat({{y}, sub(xs, 0, l)}));
    if (!img.empty()) acc ^= apply_op(dst, one_string(k - l), concat({{img}, sub(xs, l, k)}));
    const Terms mv = apply_op(src, one_string(l), concat({{y}, sub(xs, 0, l)}));
    if (!mv.empty()) acc ^= apply_op(f.ops(), one_string(k - l), concat({{mv}, sub(xs, l, k)}));
  }
  insert_m(acc, f.source()->algebra()->ops(), xs,
           [&](const TermList& o) { return apply_op(f.ops(), one_string(o.size()), concat({{y}, o})); });
  return acc;
}

/// d applied to a term set, d given by boundary weights.
inline Terms oracle_floer_apply(const ainf::FloerComplexData& f, const Terms& x) {
  Terms out;
  const auto cutoff = f.ring()->cutoff();
  for (const auto& [l, g] : x) {
    for (const auto& [pair, list] : f.weights()) {
      if (pair.first != g) continue;
      for (const auto& w : list) {
        if (w.count % 2 != 0 && l + w.energy < cutoff) toggle(out, l + w.energy, pair.second);
      }
    }
  }
  return out;
}

inline Terms oracle_pairing_residual(const ainf::GluingTensor& g, const Terms& y1, const TermList& x1, const Terms& a,
                                     const Terms& y2, const TermList& x2) {
  const auto& phi = g.ops();
  auto Phi = [&](const Terms& u1, const TermList& v1, const Terms& b, const Terms& u2, const TermList& v2) {
    return apply_op(phi, {static_cast<int>(v1.size()), static_cast<int>(v2.size())},
                    concat({{u1}, v1, {b}, {u2}, v2}));
  };
  const std::size_t k1 = x1.size();
  const std::size_t k2 = x2.size();
  Terms acc = oracle_floer_apply(*g.floer(), Phi(y1, x1, a, y2, x2));
  for (std::size_t i = 0; i <= k1; ++i) {
    for (std::size_t j = 0; j <= k2; ++j) {
      const Terms inner = apply_op(g.pair()->ops(), {static_cast<int>(k1 - i), static_cast<int>(j)},
                                   concat({sub(x1, i, k1), {a}, sub(x2, 0, j)}));
      if (!inner.empty()) acc ^= Phi(y1, sub(x1, 0, i), inner, y2, sub(x2, j, k2));
    }
  }
  for (std::size_t l = 0; l <= k1; ++l) {
    const Terms inner = apply_op(g.module1()->ops(), one_string(l), concat({{y1}, sub(x1, 0, l)}));
    if (!inner.empty()) acc ^= Phi(inner, sub(x1, l, k1), a, y2, x2);
  }
  for (std::size_t l = 0; l <= k2; ++l) {
    TermList tail = sub(x2, l, k2);
    std::reverse(tail.begin(), tail.end());
    const Terms inner = apply_op(g.module2()->ops(), one_string(tail.size()), concat({{y2}, tail}));
    if (!inner.empty()) acc ^= Phi(y1, x1, a, inner, sub(x2, 0, l));
  }
  insert_m(acc, g.pair()->left_algebra()->ops(), x1, [&](const TermList& o) { return Phi(y1, o, a, y2, x2); });
  insert_m(acc, g.pair()->right_algebra()->ops(), x2, [&](const TermList& o) { return Phi(y1, x1, a, y2, o); });
  return acc;
}

/// sum_k m_k(b, .., b) up to arity `max_arity`.
inline Terms oracle_mc(const ainf::FilteredAlgebra& a, const Terms& b, int max_arity) {
  Terms acc;
  for (int k = 0; k <= max_arity; ++k) acc ^= apply_op(a.ops(), one_string(static_cast<std::size_t>(k)), TermList(static_cast<std::size_t>(k), b));
  return acc;
}

/// y -> sum_k n_k(y; b, .., b)
inline Terms oracle_twisted(const ainf::FilteredRightModule& m, const Terms& y, const Terms& b, int max_arity) {
  Terms acc;
  for (int k = 0; k <= max_arity; ++k) {
    acc ^= apply_op(m.ops(), one_string(static_cast<std::size_t>(k)), concat({{y}, TermList(static_cast<std::size_t>(k), b)}));
  }
  return acc;
}

/// Lowest level present, if any.
inline std::optional<ainf::Rational> lowest_level(const Terms& t) {
  if (t.empty()) return std::nullopt;
  return t.begin()->first;
}

}  // namespace ainf_test
