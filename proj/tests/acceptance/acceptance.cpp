// Acceptance run: one line per criterion, exit status 0 iff all pass.
// Expected values come from the term-set oracle in ainf_test/oracle.hpp or
// from the construction of each instance, never from the library under test.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ainf/specfmt.hpp"
#include "ainf_test/documents.hpp"
#include "ainf_test/f1.hpp"
#include "ainf_test/generators.hpp"
#include "ainf_test/oracle.hpp"

namespace {

namespace fs = std::filesystem;
using ainf::Element;
using ainf::GappedOperationTable;
using ainf::Index;
using ainf::LinearMap;
using ainf::Rational;
using ainf::Signature;
using ainf_test::Rng;
using ainf_test::TermList;
using ainf_test::Terms;
using ainf_test::operator^=;

// Pinned tolerances. Every comparison is exact; only runtimes and corpus sizes are tunable.
constexpr double kF1Seconds = 1.0;
constexpr double kUniquenessSeconds = 60.0;
constexpr double kHomologySeconds = 10.0;
constexpr double kGluingSeconds = 60.0;
constexpr int kCyclicCorpus = 100;
constexpr int kCorruptions = 100;
constexpr int kCurvedAlgebras = 100;
constexpr int kHomologyMatrices = 300;
constexpr int kOppositeCorpus = 100;
constexpr int kHomomorphisms = 40;
constexpr int kGluingInstances = 24;
constexpr int kGluingOracleArity = 2;  // k1 + k2 for the independent pairing-relation sweep

const fs::path kFixtures = AINF_FIXTURE_DIR;
const std::string kCli = AINF_CLI_PATH;

ainf::TruncationPtr half_ring(const Rational& cutoff = 2) { return ainf::make_truncation({Rational(1, 2)}, cutoff); }

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", s);
  return buf;
}

int max_arity(const GappedOperationTable& t) { return t.empty() ? 0 : t.max_total(); }

TermList copies(const Terms& t, int k) { return TermList(static_cast<std::size_t>(k), t); }

std::string show(const Terms& t) {
  if (t.empty()) return "0";
  std::string out;
  for (const auto& [l, g] : t) out += (out.empty() ? "" : " + ") + ("T^" + ainf::to_string(l) + " e" + std::to_string(g));
  return out;
}

/// Every element of C (x) Lambda_+ below the cutoff, as term sets.
std::vector<Terms> all_positive_elements(std::size_t dim, const ainf::TruncationPtr& ring) {
  std::vector<Rational> levels;
  for (const auto& l : ring->levels()) {
    if (l > 0) levels.push_back(l);
  }
  const std::size_t bits = dim * levels.size();
  std::vector<Terms> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << bits); ++mask) {
    Terms t;
    for (std::size_t i = 0; i < bits; ++i) {
      if (mask >> i & 1) t.insert({levels[i / dim], static_cast<Index>(i % dim)});
    }
    out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------

Verdict fixture_solver() {
  Verdict v;
  const Stopwatch clock;
  const auto f = ainf_test::make_f1();
  const Rational cutoff = 4;
  const auto cert = ainf::certify_cyclic(f.module, f.gen_d("w"));
  const auto b = ainf::solve_bounding_cochain(cert, cutoff);
  v.require(b.value == f.gen_c("p", 1), "b = " + ainf::to_string(b.value) + ", expected T^1 * p");
  v.require(!ainf::verify_mc(*f.algebra, b.value, cutoff), "verify_mc reports a residual");

  const Terms bt = ainf_test::terms_of(b.value);
  v.require(ainf_test::oracle_mc(*f.algebra, bt, max_arity(f.algebra->ops())).empty(), "oracle: Maurer-Cartan fails");
  v.require(ainf_test::oracle_twisted(*f.module, ainf_test::unit_terms(f.d->index("w")), bt, max_arity(f.module->ops()))
                .empty(),
            "oracle: d^b(w) != 0");
  for (Index y = 0; y < f.d->size(); ++y) {
    v.require(ainf_test::oracle_twisted(*f.module, ainf_test::unit_terms(y), bt, max_arity(f.module->ops())).empty(),
              "oracle: d^b is not the zero map");
  }
  const LinearMap d = ainf::twisted_differential(*f.module, b.value);
  v.require(d.is_zero(), "twisted differential is nonzero");
  const auto h = ainf::homology(d);
  v.require(h.free_rank == 2 && h.torsion.empty(), "homology " + h.render());

  // the same through the document layer
  std::ifstream in(kFixtures / "f1.afd");
  std::stringstream text;
  text << in.rdbuf();
  const auto s = ainf::materialize(*ainf::parse_document(text.str()).document);
  const auto& c = s.cyclics.at("one");
  const auto b2 = ainf::solve_bounding_cochain(ainf::certify_cyclic(c.module, c.one), cutoff);
  v.require(ainf_test::terms_of(b2.value) == bt, "fixture file gives b = " + ainf::to_string(b2.value));

  const double t = clock.seconds();
  v.require(t < kF1Seconds, "runtime " + fmt_seconds(t));
  if (v.pass) v.detail = "b = " + ainf::to_string(b.value) + ", " + h.render() + ", " + fmt_seconds(t);
  return v;
}

struct SolvedInstance {
  ainf_test::CyclicInstance inst;
  Element b;
};

std::vector<SolvedInstance>& cyclic_corpus() {
  static std::vector<SolvedInstance> corpus;
  return corpus;
}

Verdict solver_uniqueness() {
  Verdict v;
  const Stopwatch clock;
  Rng rng(2002);
  const auto ring = half_ring();
  const Rational cutoff = ring->cutoff();
  std::size_t candidates = 0;
  int nonzero = 0;
  for (int i = 0; i < kCyclicCorpus; ++i) {
    auto opt = ainf_test::cyclic_corpus_options(rng);
    opt.twist = rng.coin();
    auto inst = ainf_test::random_cyclic_instance(rng, ring, opt);
    const auto& m = *inst.module;
    const auto& a = *m.algebra();
    v.require(a.basis()->size() <= 3 && m.basis()->size() <= 3, "instance too large");
    Element b(a.basis(), ring);
    try {
      b = ainf::solve_bounding_cochain(ainf::certify_cyclic(inst.module, inst.one), cutoff).value;
    } catch (const ainf::Error& e) {
      v.require(false, "instance " + std::to_string(i) + ": " + e.what());
      continue;
    }
    const Terms one = ainf_test::terms_of(inst.one);
    std::vector<Terms> solutions;
    for (const Terms& cand : all_positive_elements(a.basis()->size(), ring)) {
      ++candidates;
      if (!ainf_test::oracle_mc(a, cand, max_arity(a.ops())).empty()) continue;
      if (!ainf_test::oracle_twisted(m, one, cand, max_arity(m.ops())).empty()) continue;
      solutions.push_back(cand);
    }
    const Terms bt = ainf_test::terms_of(b);
    v.require(solutions.size() == 1 && solutions.front() == bt,
              "instance " + std::to_string(i) + ": oracle found " + std::to_string(solutions.size()) +
                  " solutions, solver gave " + show(bt));
    if (!bt.empty()) ++nonzero;
    cyclic_corpus().push_back({std::move(inst), std::move(b)});
  }
  const double t = clock.seconds();
  v.require(t < kUniquenessSeconds, "runtime " + fmt_seconds(t));
  if (v.pass) {
    v.detail = std::to_string(kCyclicCorpus) + " instances (" + std::to_string(nonzero) + " with b != 0), " +
               std::to_string(candidates) + " candidates, " + fmt_seconds(t);
  }
  return v;
}

Verdict square_zero_law() {
  Verdict v;
  if (cyclic_corpus().empty()) return {false, "criterion 2 produced no corpus"};
  for (std::size_t i = 0; i < cyclic_corpus().size(); ++i) {
    const auto& [inst, b] = cyclic_corpus()[i];
    const auto& m = *inst.module;
    const LinearMap d = ainf::twisted_differential(m, b);
    v.require(ainf::compose(d, d).is_zero(), "instance " + std::to_string(i) + ": d^b o d^b != 0");
    const Terms bt = ainf_test::terms_of(b);
    for (Index y = 0; y < m.basis()->size(); ++y) {
      const Terms dy = ainf_test::oracle_twisted(m, ainf_test::unit_terms(y), bt, max_arity(m.ops()));
      const Terms ddy = ainf_test::oracle_twisted(m, dy, bt, max_arity(m.ops()));
      v.require(ddy.empty(), "instance " + std::to_string(i) + ": oracle d^b d^b(e" + std::to_string(y) +
                                 ") = " + show(ddy));
    }
  }
  if (v.pass) v.detail = std::to_string(cyclic_corpus().size()) + " differentials, zero residual";
  return v;
}

/// Lowest-level nonzero module relation instance found by brute force.
struct OracleScan {
  std::optional<Rational> level;
  std::size_t instances = 0;
};

OracleScan scan_module_oracle(const ainf::FilteredRightModule& m) {
  const int kn = max_arity(m.ops());
  const int km = max_arity(m.algebra()->ops());
  const int cap = std::max(2 * kn, kn + km - 1);
  OracleScan out;
  const auto nd = m.basis()->size();
  const auto nc = m.algebra()->basis()->size();
  for (int k = 0; k <= cap; ++k) {
    std::vector<std::size_t> sizes{nd};
    sizes.insert(sizes.end(), static_cast<std::size_t>(k), nc);
    ainf_test::for_each_tuple(sizes, [&](const ainf::Tuple& t) {
      ++out.instances;
      TermList xs;
      for (std::size_t s = 1; s < t.size(); ++s) xs.push_back(ainf_test::unit_terms(t[s]));
      const auto r = ainf_test::lowest_level(ainf_test::oracle_module_residual(m, ainf_test::unit_terms(t[0]), xs));
      if (r && (!out.level || *r < *out.level)) out.level = r;
    });
  }
  return out;
}

Verdict checker_soundness() {
  Verdict v;
  Rng rng(4004);
  const auto ring = half_ring();
  int detected = 0, cancelled = 0;
  for (int i = 0; i < kCorruptions; ++i) {
    auto opt = ainf_test::cyclic_corpus_options(rng);
    opt.twist = rng.coin();
    const auto inst = ainf_test::random_cyclic_instance(rng, ring, opt);
    const auto& m = *inst.module;
    if (auto c = ainf::check_module_relations(m, ring->cutoff())) {
      v.require(false, "uncorrupted instance " + std::to_string(i) + " fails: " + c->render());
      continue;
    }
    // toggle one structure constant
    GappedOperationTable ops = m.ops();
    const int k = rng.uniform(0, std::max(1, max_arity(ops)));
    const Rational level = rng.pick(ring->levels());
    ainf::Tuple tuple{static_cast<Index>(rng.uniform(0, static_cast<int>(m.basis()->size()) - 1))};
    for (int s = 0; s < k; ++s) {
      tuple.push_back(static_cast<Index>(rng.uniform(0, static_cast<int>(m.algebra()->basis()->size()) - 1)));
    }
    const auto out = static_cast<Index>(rng.uniform(0, static_cast<int>(m.basis()->size()) - 1));
    ops.add({k, 0}, level, tuple, {out});
    const ainf::FilteredRightModule bad(m.name(), m.basis(), m.algebra(), ops);

    const auto reported = ainf::check_module_relations(bad, ring->cutoff());
    const OracleScan truth = scan_module_oracle(bad);
    const std::string tag = "corruption " + std::to_string(i) + ": ";
    if (!truth.level) {
      ++cancelled;
      v.require(!reported, tag + "checker reports " + (reported ? reported->render() : "") + " but every instance vanishes");
      continue;
    }
    ++detected;
    if (!reported) {
      v.require(false, tag + "checker missed a failure at level " + ainf::to_string(*truth.level));
      continue;
    }
    v.require(reported->level == *truth.level,
              tag + "reported level " + ainf::to_string(reported->level) + ", lowest is " + ainf::to_string(*truth.level));
    // re-evaluate the reported instance
    TermList xs;
    for (std::size_t s = 1; s < reported->tuple.size(); ++s) xs.push_back(ainf_test::unit_terms(reported->tuple[s]));
    const Terms r = ainf_test::oracle_module_residual(bad, ainf_test::unit_terms(reported->tuple[0]), xs);
    std::vector<std::string> names;
    for (const auto& [l, g] : r) {
      if (l == reported->level) names.push_back(bad.basis()->generator(g));
    }
    v.require(ainf_test::lowest_level(r) == reported->level && names == reported->residual,
              tag + "reported " + reported->render() + " re-evaluates to " + show(r));
  }
  if (v.pass) {
    v.detail = std::to_string(detected) + " corruptions localized, " + std::to_string(cancelled) +
               " left every relation instance intact and were correctly passed";
  }
  return v;
}

/// m_1 at 1/2 or 1 and m_3 high enough that m_1 m_3 reaches the cutoff 2.
void curved_levels(Rng& rng, ainf_test::AlgebraOptions& opt) {
  const bool low = rng.coin();
  opt.derivation_level = low ? Rational(1, 2) : Rational(1);
  opt.coboundary_level = low ? Rational(3, 2) : Rational(1);
}

/// Module relation of n_k(y; xs) := m_{k+1}(y, xs), straight from the algebra table.
Terms oracle_regular_module_defect(const ainf::FilteredAlgebra& a, const Terms& y, const TermList& xs) {
  auto n = [&](const Terms& u, const TermList& v) {
    return ainf_test::apply_op(a.ops(), ainf_test::one_string(v.size() + 1), ainf_test::concat({{u}, v}));
  };
  Terms acc;
  for (std::size_t l = 0; l <= xs.size(); ++l) {
    const Terms inner = n(y, ainf_test::sub(xs, 0, l));
    if (!inner.empty()) acc ^= n(inner, ainf_test::sub(xs, l, xs.size()));
  }
  ainf_test::insert_m(acc, a.ops(), xs, [&](const TermList& o) { return n(y, o); });
  return acc;
}

Verdict curvature_defect() {
  Verdict v;
  Rng rng(5005);
  const auto ring = half_ring();
  int nonzero = 0, instances = 0;
  for (int i = 0; i < kCurvedAlgebras; ++i) {
    ainf_test::AlgebraOptions opt;
    opt.twist = true;
    curved_levels(rng, opt);
    const auto u = ainf_test::random_unital_algebra(rng, ring, opt);
    const auto& a = *u.algebra;
    v.require(max_arity(a.ops()) <= 3, "algebra arity above 3");
    v.require(!ainf::check_algebra_relations(a, ring->cutoff()), "generated algebra " + std::to_string(i) + " is invalid");
    const Terms m0 = ainf_test::apply_op(a.ops(), ainf_test::one_string(0), {});
    const auto n = a.basis()->size();
    for (int k = 0; k <= 2; ++k) {
      ainf_test::for_each_tuple(std::vector<std::size_t>(static_cast<std::size_t>(k) + 1, n), [&](const ainf::Tuple& t) {
        ++instances;
        std::vector<Element> xe;
        TermList xs;
        for (std::size_t s = 1; s < t.size(); ++s) {
          xe.push_back(Element::generator(a.basis(), ring, t[s]));
          xs.push_back(ainf_test::unit_terms(t[s]));
        }
        ainf::Inputs in;
        for (const auto& x : xe) in.push_back(&x);
        const Element y = Element::generator(a.basis(), ring, t[0]);
        const auto [lhs, rhs] = ainf::unit_defect(u.algebra, u.unit, y, in);
        const Terms expected_lhs = oracle_regular_module_defect(a, ainf_test::unit_terms(t[0]), xs);
        const Terms expected_rhs = ainf_test::apply_op(a.ops(), ainf_test::one_string(xs.size() + 2),
                                                       ainf_test::concat({{m0}, {ainf_test::unit_terms(t[0])}, xs}));
        const std::string tag = "algebra " + std::to_string(i) + ", arity " + std::to_string(k) + ": ";
        v.require(expected_lhs == expected_rhs, tag + "oracle defect " + show(expected_lhs) + " vs m(m0, y, x) " +
                                                    show(expected_rhs));
        v.require(ainf_test::terms_of(lhs) == expected_lhs, tag + "library defect " + ainf::to_string(lhs));
        v.require(ainf_test::terms_of(rhs) == expected_rhs, tag + "library m(m0, y, x) " + ainf::to_string(rhs));
        if (!expected_lhs.empty()) ++nonzero;
      });
    }
  }
  v.require(nonzero > 0, "every defect vanished; the corpus has no curvature");
  if (v.pass) {
    v.detail = std::to_string(instances) + " instances over " + std::to_string(kCurvedAlgebras) + " algebras, " +
               std::to_string(nonzero) + " with nonzero defect";
  }
  return v;
}

Verdict homology_invariance() {
  Verdict v;
  const Stopwatch clock;
  Rng rng(6006);
  const auto ring = half_ring(3);
  int torsion_seen = 0;
  for (int i = 0; i < kHomologyMatrices; ++i) {
    const int size = rng.uniform(1, 6);
    std::vector<std::string> names;
    for (int g = 0; g < size; ++g) names.push_back("g" + std::to_string(g));
    const auto basis = ainf::make_basis("B", names);
    // standard form: e_{2i} -> T^{l_i} e_{2i+1}
    const int pairs = rng.uniform(0, size / 2);
    LinearMap d0(basis, basis, ring);
    std::vector<Rational> expected;
    for (int p = 0; p < pairs; ++p) {
      const Rational l = rng.pick(ring->levels());
      d0.at(static_cast<Index>(2 * p + 1), static_cast<Index>(2 * p)) = ainf::novikov(ring, {l});
      if (l > 0) expected.push_back(l);
    }
    std::sort(expected.begin(), expected.end());
    const std::size_t free = static_cast<std::size_t>(size - 2 * pairs);
    const std::string tag = "matrix " + std::to_string(i) + ": ";

    const auto h0 = ainf::homology(d0);
    v.require(h0.free_rank == free && h0.torsion == expected, tag + "standard form gives " + h0.render());

    const auto [g, ginv] = ainf_test::random_basis_change(rng, basis, ring, 10);
    const LinearMap d = ainf::compose(g, ainf::compose(d0, ginv));
    v.require(ainf::compose(d, d).is_zero(), tag + "conjugate is not square-zero");
    const auto h = ainf::homology(d);
    v.require(h.free_rank == free && h.torsion == expected, tag + "conjugate gives " + h.render());
    if (!expected.empty()) ++torsion_seen;
  }
  const double t = clock.seconds();
  v.require(t < kHomologySeconds, "runtime " + fmt_seconds(t));
  if (v.pass) {
    v.detail = std::to_string(kHomologyMatrices) + " conjugated complexes (" + std::to_string(torsion_seen) +
               " with torsion), " + fmt_seconds(t);
  }
  return v;
}

Verdict opposite_algebra() {
  Verdict v;
  Rng rng(7007);
  const auto ring = half_ring();
  int failing = 0;
  for (int i = 0; i < kOppositeCorpus; ++i) {
    ainf_test::AlgebraOptions opt;
    opt.twist = rng.coin();
    curved_levels(rng, opt);
    auto a = ainf_test::random_unital_algebra(rng, ring, opt).algebra;
    if (rng.coin()) {
      GappedOperationTable ops = a->ops();
      const int k = rng.uniform(0, 3);
      ainf::Tuple t;
      for (int s = 0; s < k; ++s) t.push_back(static_cast<Index>(rng.uniform(0, static_cast<int>(a->basis()->size()) - 1)));
      ops.add({k, 0}, rng.pick(ring->levels()), t, {static_cast<Index>(rng.uniform(0, static_cast<int>(a->basis()->size()) - 1))});
      a = std::make_shared<ainf::FilteredAlgebra>(a->name(), a->basis(), ops);
    }
    const auto op = ainf::opposite_algebra(*a);
    const bool fails = ainf::check_algebra_relations(*a, ring->cutoff()).has_value();
    const bool op_fails = ainf::check_algebra_relations(*op, ring->cutoff()).has_value();
    v.require(fails == op_fails, "algebra " + std::to_string(i) + ": verdicts differ");
    if (fails) ++failing;

    auto doc = ainf::new_document(ring);
    ainf::declare_algebra(doc, "A", *a);
    auto twice = ainf::new_document(ring);
    ainf::declare_algebra(twice, "A", *ainf::opposite_algebra(*op));
    v.require(ainf::serialize(doc) == ainf::serialize(twice), "algebra " + std::to_string(i) + ": op(op(A)) != A");
  }
  if (v.pass) {
    v.detail = std::to_string(kOppositeCorpus) + " algebras (" + std::to_string(failing) +
               " failing their relations), verdicts agree, double opposite byte-identical";
  }
  return v;
}

/// phi^b(Y) = sum_k phi_k(Y; b, .., b)
Terms oracle_phi_b(const ainf::AInftyHomomorphism& f, const Terms& y, const Terms& b) {
  Terms acc;
  for (int k = 0; k <= max_arity(f.ops()); ++k) {
    acc ^= ainf_test::apply_op(f.ops(), ainf_test::one_string(static_cast<std::size_t>(k)),
                               ainf_test::concat({{y}, copies(b, k)}));
  }
  return acc;
}

Verdict homomorphism_layer() {
  Verdict v;
  Rng rng(8008);
  const auto ring = half_ring();
  for (int i = 0; i < kHomomorphisms; ++i) {
    const auto inst = ainf_test::random_homomorphism(rng, ring);
    const auto& f = *inst.phi;
    const auto& src = *f.source();
    const auto& tgt = *f.target();
    const std::string tag = "homomorphism " + std::to_string(i) + ": ";
    const Element b =
        ainf::solve_bounding_cochain(ainf::certify_cyclic(inst.source.module, inst.source.one), ring->cutoff()).value;
    const Terms bt = ainf_test::terms_of(b);
    LinearMap phi(src.basis(), tgt.basis(), ring);
    try {
      phi = ainf::realize_phi_b(f, b);
    } catch (const ainf::Error& e) {
      v.require(false, tag + e.what());
      continue;
    }
    for (Index y = 0; y < src.basis()->size(); ++y) {
      const Terms py = oracle_phi_b(f, ainf_test::unit_terms(y), bt);
      v.require(ainf_test::terms_of(phi.column(y)) == py, tag + "phi^b column differs from the oracle");
      Terms r = ainf_test::oracle_twisted(tgt, py, bt, max_arity(tgt.ops()));
      r ^= oracle_phi_b(f, ainf_test::oracle_twisted(src, ainf_test::unit_terms(y), bt, max_arity(src.ops())), bt);
      v.require(r.empty(), tag + "oracle chain-map residual " + show(r));
      // phi_0 = id mod Lambda_+
      Terms leading;
      for (const auto& [l, g] : py) {
        if (l == 0) leading.insert({l, g});
      }
      v.require(leading == ainf_test::unit_terms(y), tag + "phi^b is not the identity mod Lambda_+");
    }
    const auto h1 = ainf::homology(ainf::twisted_differential(src, b));
    const auto h2 = ainf::homology(ainf::twisted_differential(tgt, b));
    v.require(h1.same_invariants(h2), tag + h1.render() + " vs " + h2.render());
  }
  if (v.pass) v.detail = std::to_string(kHomomorphisms) + " homomorphisms, zero chain-map residual, homologies agree";
  return v;
}

/// sum over the table's signatures of op(head..; b1..; a; mid..; b2..)
Terms oracle_twisted_two_string(const GappedOperationTable& ops, const TermList& head, const Terms& b1, const Terms& a,
                                const TermList& mid, const Terms& b2) {
  Terms acc;
  for (const auto& [sig, tuples] : ops.by_signature()) {
    acc ^= ainf_test::apply_op(ops, sig,
                               ainf_test::concat({head, copies(b1, sig.left), {a}, mid, copies(b2, sig.right)}));
  }
  return acc;
}

Verdict gluing_pipeline() {
  Verdict v;
  const Stopwatch clock;
  Rng rng(9009);
  const auto ring = half_ring();
  std::size_t swept = 0;
  for (int i = 0; i < kGluingInstances; ++i) {
    const auto inst = ainf_test::random_gluing_instance(rng, ring);
    const auto& g = *inst.tensor;
    const std::string tag = "gluing " + std::to_string(i) + ": ";
    if (auto c = ainf::check_pairing_relation(g, ring->cutoff())) {
      v.require(false, tag + c->render());
      continue;
    }
    // independent sweep of the pairing relation at low arity
    const auto n1 = g.module1()->basis()->size();
    const auto np = g.pair()->basis()->size();
    const auto n2 = g.module2()->basis()->size();
    const auto c1 = g.pair()->left_algebra()->basis()->size();
    const auto c2 = g.pair()->right_algebra()->basis()->size();
    for (int total = 0; total <= kGluingOracleArity; ++total) {
      for (int k1 = 0; k1 <= total; ++k1) {
        const int k2 = total - k1;
        std::vector<std::size_t> sizes{n1};
        sizes.insert(sizes.end(), static_cast<std::size_t>(k1), c1);
        sizes.insert(sizes.end(), {np, n2});
        sizes.insert(sizes.end(), static_cast<std::size_t>(k2), c2);
        ainf_test::for_each_tuple(sizes, [&](const ainf::Tuple& t) {
          ++swept;
          using ainf_test::unit_terms;
          TermList x1, x2;
          const auto k = static_cast<std::size_t>(k1);
          for (std::size_t s = 1; s <= k; ++s) x1.push_back(unit_terms(t[s]));
          for (std::size_t s = k + 3; s < t.size(); ++s) x2.push_back(unit_terms(t[s]));
          const Terms r =
              ainf_test::oracle_pairing_residual(g, unit_terms(t[0]), x1, unit_terms(t[k + 1]), unit_terms(t[k + 2]), x2);
          v.require(r.empty(), tag + "oracle pairing residual " + show(r));
        });
      }
    }

    const auto cert1 = ainf::certify_cyclic(g.module1(), inst.one1);
    const auto cert2 = ainf::certify_cyclic(g.module2(), inst.one2);
    const Element b1 = ainf::solve_bounding_cochain(cert1, ring->cutoff()).value;
    const Element b2 = ainf::solve_bounding_cochain(cert2, ring->cutoff()).value;
    LinearMap phi(g.pair()->basis(), g.floer()->basis(), ring);
    try {
      phi = ainf::induced_gluing_map(g, cert1, b1, cert2, b2);
    } catch (const ainf::Error& e) {
      v.require(false, tag + e.what());
      continue;
    }
    v.require(!ainf::leading_term_failure(phi), tag + "Phi is not the identity mod Lambda_+");

    const Terms one1 = ainf_test::terms_of(inst.one1);
    const Terms one2 = ainf_test::terms_of(inst.one2);
    const Terms b1t = ainf_test::terms_of(b1);
    const Terms b2t = ainf_test::terms_of(b2);
    for (Index a = 0; a < np; ++a) {
      const Terms at = ainf_test::unit_terms(a);
      const Terms pa = oracle_twisted_two_string(g.ops(), {one1}, b1t, at, {one2}, b2t);
      v.require(ainf_test::terms_of(phi.column(a)) == pa, tag + "Phi column differs from the oracle");
      const Terms delta = oracle_twisted_two_string(g.pair()->ops(), {}, b1t, at, {}, b2t);
      Terms r = ainf_test::oracle_floer_apply(*g.floer(), pa);
      r ^= oracle_twisted_two_string(g.ops(), {one1}, b1t, delta, {one2}, b2t);
      v.require(r.empty(), tag + "oracle chain-map residual " + show(r));
      Terms leading;
      for (const auto& [l, x] : pa) {
        if (l == 0) leading.insert({l, x});
      }
      const Index same = g.floer()->basis()->index(g.pair()->basis()->generator(a));
      v.require(leading == ainf_test::unit_terms(same), tag + "leading term of Phi(" +
                                                            g.pair()->basis()->generator(a) + ") is " + show(leading));
    }
    const auto h1 = ainf::homology(ainf::bimodule_twisted_differential(*g.pair(), b1, b2));
    const auto h2 = ainf::homology(ainf::realize_floer_boundary(*g.floer()));
    v.require(h1.same_invariants(h2), tag + h1.render() + " vs " + h2.render());
  }
  const double t = clock.seconds();
  v.require(t < kGluingSeconds, "runtime " + fmt_seconds(t));
  if (v.pass) {
    v.detail = std::to_string(kGluingInstances) + " instances, " + std::to_string(swept) +
               " oracle relation instances, homologies agree, " + fmt_seconds(t);
  }
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = "'" + kCli + "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Verdict format_and_cli() {
  Verdict v;
  int documents = 0;
  for (const auto& e : fs::directory_iterator(kFixtures)) {
    if (e.path().extension() != ".afd") continue;
    ++documents;
    const std::string name = e.path().filename().string();
    const auto first = ainf::parse_document(slurp(e.path()));
    if (!first.ok()) {
      v.require(false, name + ": " + first.diagnostic->render());
      continue;
    }
    const std::string canonical = ainf::serialize(*first.document);
    const auto second = ainf::parse_document(canonical);
    v.require(second.ok() && *second.document == *first.document, name + ": parse(serialize) differs");
    v.require(second.ok() && ainf::serialize(*second.document) == canonical, name + ": serialize not byte-stable");
  }

  std::set<std::string> triggered;
  for (const auto& e : fs::directory_iterator(kFixtures / "reject")) {
    const auto r = ainf::parse_document(slurp(e.path()));
    if (r.ok()) {
      v.require(false, e.path().filename().string() + " was accepted");
      continue;
    }
    triggered.insert(ainf::code_name(r.diagnostic->code));
  }
  for (auto c : ainf::all_diagnostic_codes()) {
    v.require(triggered.count(ainf::code_name(c)) == 1, "no rejection fixture triggers " + ainf::code_name(c));
  }

  const auto f = [](const std::string& n) { return "'" + (kFixtures / n).string() + "'"; };
  const std::vector<std::pair<std::string, int>> contract{
      {"check " + f("f1.afd"), 0},
      {"check " + f("corrupted.afd") + " --kind module", 1},
      {"check " + f("reject/syntax_error.afd"), 2},
      {"check " + f("does_not_exist.afd"), 2},
      {"solve " + f("f1.afd"), 0},
      {"solve " + f("singular.afd"), 1},
      {"solve " + f("f1.afd") + " --cutoff 9", 2},
      {"homology " + f("complex.afd") + " --differential floer", 0},
      {"homology " + f("f1.afd") + " --differential twisted --cochain none", 2},
      {"pair " + f("gluing_synthetic.afd"), 0},
      {"pair " + f("gluing_broken.afd"), 1},
      {"pair " + f("f1.afd"), 2},
  };
  for (const auto& [args, expected] : contract) {
    const int got = run_cli(args);
    v.require(got == expected, "ainf " + args + " exited " + std::to_string(got) + ", expected " + std::to_string(expected));
  }
  if (v.pass) {
    v.detail = std::to_string(documents) + " documents round-trip, " + std::to_string(triggered.size()) +
               " diagnostic codes triggered, " + std::to_string(contract.size()) + " CLI exit codes";
  }
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"solver on the worked fixture", fixture_solver},
      {"solver uniqueness against brute force", solver_uniqueness},
      {"twisted differential squares to zero", square_zero_law},
      {"module-relation checker localizes corruptions", checker_soundness},
      {"regular-module defect equals m(m0, y, x)", curvature_defect},
      {"homology invariant under basis change", homology_invariance},
      {"opposite algebra", opposite_algebra},
      {"homomorphism chain map and homology", homomorphism_layer},
      {"gluing pipeline", gluing_pipeline},
      {"format round trip, diagnostics, CLI exit codes", format_and_cli},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const Stopwatch clock;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("criterion %2zu %s: %s (%s) [%s]\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                v.detail.c_str(), fmt_seconds(clock.seconds()).c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
