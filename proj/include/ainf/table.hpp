#pragma once

/**
 * @file table.hpp
 * @brief Sparse gapped structure constants and their multilinear evaluation.
 *
 * A table stores the decomposition  op = sum_lambda T^lambda op_lambda  of a
 * family of multilinear operations. Each entry is
 *     (signature, level lambda, input generator tuple) -> Z/2 output vector.
 * The signature is (k, 0) for algebra, module and homomorphism operations and
 * (k1, k2) for operations with two strings of algebra inputs. How input slots
 * map to bases is fixed by the owning structure (see SlotLayout).
 */

#include <algorithm>
#include <compare>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ainf/lincomb.hpp"

namespace ainf {

struct Signature {
  int left = 0;
  int right = 0;

  constexpr int total() const noexcept { return left + right; }

  /// Arity order: total arity first, then left count.
  friend constexpr std::strong_ordering operator<=>(const Signature& a, const Signature& b) {
    if (auto c = a.total() <=> b.total(); c != 0) return c;
    return a.left <=> b.left;
  }
  friend constexpr bool operator==(const Signature&, const Signature&) = default;

  std::string str() const {
    return right == 0 ? std::to_string(left) : std::to_string(left) + "," + std::to_string(right);
  }
};

using Tuple = std::vector<Index>;
/// Z/2 vector as the sorted list of generators with coefficient 1.
using Z2Vector = std::vector<Index>;

/// Symmetric difference of two sorted supports.
inline Z2Vector z2_add(const Z2Vector& a, const Z2Vector& b) {
  Z2Vector out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

class GappedOperationTable {
 public:
  /// level -> outputs, for one input tuple
  using LevelMap = std::map<Rational, Z2Vector>;
  using TupleMap = std::map<Tuple, LevelMap>;

  struct EntryView {
    Signature signature;
    const Rational& level;
    const Tuple& inputs;
    const Z2Vector& outputs;
  };

  explicit GappedOperationTable(TruncationPtr ring) : ring_(std::move(ring)) {}

  const TruncationPtr& ring() const noexcept { return ring_; }

  /// Adds outputs to the entry (sum over Z/2; entries that cancel vanish).
  void add(Signature sig, const Rational& level, const Tuple& inputs, Z2Vector outputs) {
    if (!ring_->is_level(level)) {
      throw ValidationError("level " + to_string(level) + " is not a monoid level below the cutoff");
    }
    std::sort(outputs.begin(), outputs.end());
    Z2Vector reduced;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      if (i + 1 < outputs.size() && outputs[i] == outputs[i + 1]) {
        ++i;
      } else {
        reduced.push_back(outputs[i]);
      }
    }
    if (reduced.empty()) return;
    auto& tuples = entries_[sig];
    auto& levels = tuples[inputs];
    auto it = levels.find(level);
    if (it == levels.end()) {
      levels.emplace(level, std::move(reduced));
    } else {
      it->second = z2_add(it->second, reduced);
      if (it->second.empty()) levels.erase(it);
    }
    if (levels.empty()) tuples.erase(inputs);
    if (tuples.empty()) entries_.erase(sig);
  }

  /// Adds `coeff * outputs` at every exponent of coeff.
  void add_scaled(Signature sig, const NovikovScalar& coeff, const Tuple& inputs, const Z2Vector& outputs) {
    for (const auto& t : coeff.terms()) add(sig, t.first, inputs, outputs);
  }

  const TupleMap* find(Signature sig) const {
    auto it = entries_.find(sig);
    return it == entries_.end() ? nullptr : &it->second;
  }

  Z2Vector get(Signature sig, const Rational& level, const Tuple& inputs) const {
    const auto* m = find(sig);
    if (!m) return {};
    auto t = m->find(inputs);
    if (t == m->end()) return {};
    auto it = t->second.find(level);
    return it == t->second.end() ? Z2Vector{} : it->second;
  }

  const std::map<Signature, TupleMap>& by_signature() const noexcept { return entries_; }

  bool empty() const noexcept { return entries_.empty(); }

  /// Number of nonzero (signature, level, tuple) entries.
  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [sig, m] : entries_) {
      for (const auto& [t, levels] : m) n += levels.size();
    }
    return n;
  }

  int max_total() const {
    int k = 0;
    for (const auto& [sig, m] : entries_) k = std::max(k, sig.total());
    return k;
  }
  int max_left() const {
    int k = 0;
    for (const auto& [sig, m] : entries_) k = std::max(k, sig.left);
    return k;
  }
  int max_right() const {
    int k = 0;
    for (const auto& [sig, m] : entries_) k = std::max(k, sig.right);
    return k;
  }

  /// Entries in canonical order: level, then arity, then input tuple.
  std::vector<EntryView> canonical_entries() const {
    std::vector<EntryView> all;
    for (const auto& [sig, m] : entries_) {
      for (const auto& [tuple, levels] : m) {
        for (const auto& [level, outputs] : levels) all.push_back(EntryView{sig, level, tuple, outputs});
      }
    }
    std::vector<std::size_t> order(all.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      const EntryView& a = all[i];
      const EntryView& b = all[j];
      if (a.level != b.level) return a.level < b.level;
      if (a.signature != b.signature) return a.signature < b.signature;
      return a.inputs < b.inputs;
    });
    std::vector<EntryView> out;
    out.reserve(all.size());
    for (std::size_t i : order) out.push_back(all[i]);
    return out;
  }

  /// Copy over another truncation, keeping only entries below its cutoff.
  GappedOperationTable truncated(const TruncationPtr& ring) const {
    GappedOperationTable out(ring);
    for (const auto& e : canonical_entries()) {
      if (e.level < ring->cutoff()) out.add(e.signature, e.level, e.inputs, e.outputs);
    }
    return out;
  }

  friend bool operator==(const GappedOperationTable& a, const GappedOperationTable& b) {
    return a.entries_ == b.entries_;
  }

 private:
  TruncationPtr ring_;
  std::map<Signature, TupleMap> entries_;
};

/// Which basis every input slot of a signature reads from.
using SlotLayout = std::vector<BasisPtr>;

using Inputs = std::vector<const Element*>;

namespace detail {

inline void accumulate(Element& out, const GappedOperationTable::LevelMap& levels, const NovikovScalar& coeff) {
  for (const auto& [level, outputs] : levels) {
    const NovikovScalar c = coeff.shifted_up(level);
    if (c.is_zero()) break;  // levels ascend, so later shifts vanish too
    for (Index o : outputs) out.add(o, c);
  }
}

}  // namespace detail

/// Multilinear extension of the structure constants of one signature:
///   sum over entries  T^level * prod_i inputs[i][tuple_i] * outputs.
inline Element evaluate(const GappedOperationTable& table, Signature sig, std::span<const Element* const> inputs,
                        const BasisPtr& out_basis) {
  Element out(out_basis, table.ring());
  const auto* tuples = table.find(sig);
  if (!tuples) return out;
  if (static_cast<int>(inputs.size()) != static_cast<int>(tuples->begin()->first.size())) {
    throw IncompatibleError("arity " + sig.str() + " expects " + std::to_string(tuples->begin()->first.size()) +
                            " inputs, got " + std::to_string(inputs.size()));
  }
  // Supports of the inputs; when their product is small, look tuples up
  // directly instead of scanning the whole signature.
  std::vector<std::vector<Index>> support(inputs.size());
  double product = 1;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (Index g = 0; g < inputs[i]->size(); ++g) {
      if (!(*inputs[i])[g].is_zero()) support[i].push_back(g);
    }
    if (support[i].empty()) return out;
    product *= static_cast<double>(support[i].size());
  }

  const auto one = NovikovScalar::one(table.ring());
  auto coefficient = [&](const Tuple& tuple) {
    NovikovScalar coeff = one;
    for (std::size_t i = 0; i < tuple.size() && !coeff.is_zero(); ++i) coeff = coeff * (*inputs[i])[tuple[i]];
    return coeff;
  };

  if (product < static_cast<double>(tuples->size())) {
    Tuple tuple(inputs.size());
    std::vector<std::size_t> pos(inputs.size(), 0);
    while (true) {
      for (std::size_t i = 0; i < inputs.size(); ++i) tuple[i] = support[i][pos[i]];
      auto it = tuples->find(tuple);
      if (it != tuples->end()) {
        const NovikovScalar coeff = coefficient(tuple);
        if (!coeff.is_zero()) detail::accumulate(out, it->second, coeff);
      }
      std::size_t i = 0;
      while (i < pos.size() && ++pos[i] == support[i].size()) pos[i++] = 0;
      if (i == pos.size()) break;
    }
    return out;
  }

  for (const auto& [tuple, levels] : *tuples) {
    const NovikovScalar coeff = coefficient(tuple);
    if (!coeff.is_zero()) detail::accumulate(out, levels, coeff);
  }
  return out;
}

inline Element evaluate(const GappedOperationTable& table, Signature sig, const Inputs& inputs,
                        const BasisPtr& out_basis) {
  return evaluate(table, sig, std::span<const Element* const>(inputs.data(), inputs.size()), out_basis);
}

/// Checks that every entry's inputs and outputs index into the right bases.
inline void validate_slots(const GappedOperationTable& table, const std::string& owner,
                           const std::function<SlotLayout(Signature)>& layout, const BasisPtr& out_basis) {
  for (const auto& [sig, m] : table.by_signature()) {
    const SlotLayout slots = layout(sig);
    for (const auto& [tuple, levels] : m) {
      if (tuple.size() != slots.size()) {
        throw ValidationError(owner + ": arity " + sig.str() + " entry has " + std::to_string(tuple.size()) +
                              " inputs, expected " + std::to_string(slots.size()));
      }
      for (std::size_t i = 0; i < slots.size(); ++i) {
        if (tuple[i] >= slots[i]->size()) throw ValidationError(owner + ": input index out of range");
      }
      for (const auto& [level, outputs] : levels) {
        for (Index o : outputs) {
          if (o >= out_basis->size()) throw ValidationError(owner + ": output index out of range");
        }
      }
    }
  }
}

}  // namespace ainf
