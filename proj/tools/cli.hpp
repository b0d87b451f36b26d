#pragma once

// Commands of the ainf driver. Each returns a RunReport; exit codes are
// 0 pass, 1 mathematical failure, 2 input or environment error.

#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ainf/specfmt.hpp"

namespace ainf::cli {

inline constexpr int kReportVersion = 1;

enum class Outcome { Pass, Fail, Error };

inline std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    case Outcome::Error: return "error";
  }
  return "error";
}

struct RunReport {
  std::string command;
  std::string input;
  std::string digest;  // hex SHA-256 of the input bytes, empty if unreadable
  Outcome outcome = Outcome::Pass;
  std::vector<std::string> details;
  double seconds = 0;

  int exit_code() const { return outcome == Outcome::Pass ? 0 : outcome == Outcome::Fail ? 1 : 2; }

  /// Everything but the last line is a function of the input.
  std::string render_text() const {
    std::ostringstream os;
    os << "ainf report " << kReportVersion << '\n'
       << "command: " << command << '\n'
       << "input: " << input << '\n'
       << "sha256: " << (digest.empty() ? "-" : digest) << '\n'
       << "outcome: " << outcome_name(outcome) << '\n';
    for (const auto& d : details) os << d << '\n';
    os << "time: " << format_seconds() << " s\n";
    return os.str();
  }

  /// JSON; the wall time is the last key and sits on its own line.
  std::string render_machine() const {
    nlohmann::ordered_json j;
    j["report_version"] = kReportVersion;
    j["command"] = command;
    j["input"] = input;
    j["sha256"] = digest;
    j["outcome"] = outcome_name(outcome);
    j["exit_code"] = exit_code();
    j["details"] = details;
    j["wall_time_s"] = std::stod(format_seconds());
    return j.dump(2) + "\n";
  }

 private:
  std::string format_seconds() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", seconds);
    return buf;
  }
};

/// Problems with the invocation or the input file.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A mathematical failure at a named stage.
class StageFailure : public Error {
 public:
  StageFailure(std::string stage, const std::string& what) : Error(what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct Options {
  std::optional<std::string> cutoff;
  std::string kind;           // check: algebra|module|bimodule|homomorphism|floer|pairing, empty for all
  std::string name;           // structure selector
  bool trace = false;         // solve
  bool oracle = false;        // solve: cross-check by enumeration
  std::string differential;   // homology: bare|twisted|pair|floer
  std::string cyclic;         // cyclic element selector
  std::string cochain;        // cochain selector (twisted)
  std::string b1, b2;         // cochain selectors (pair)
};

using DigestFn = std::function<std::string(const std::string&)>;

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw InputError("cannot read '" + path + "'");
  return ss.str();
}

struct Loaded {
  Document doc;
  Structures s;
  Rational bound;
};

inline Loaded load(const std::string& text, const Options& opt) {
  auto parsed = parse_document(text);
  if (!parsed.ok()) throw InputError(parsed.diagnostic->render());
  Document doc = std::move(*parsed.document);
  if (opt.cutoff) {
    const auto c = parse_rational(*opt.cutoff);
    if (!c || *c <= 0) throw InputError("--cutoff: '" + *opt.cutoff + "' is not a positive rational");
    if (!doc.cutoff) throw InputError("--cutoff: the document has no cutoff");
    try {
      doc = lower_cutoff(doc, *c);
    } catch (const ValidationError& e) {
      throw InputError(std::string("--cutoff: ") + e.what());
    }
  }
  Structures s = materialize(doc);
  const Rational bound = doc.cutoff.value_or(Rational(1));
  return {std::move(doc), std::move(s), bound};
}

/// The structure called `name`, or the only one when `name` is empty.
template <class Map>
const typename Map::mapped_type& pick(const Map& m, const std::string& name, const std::string& what) {
  if (!name.empty()) {
    auto it = m.find(name);
    if (it == m.end()) throw InputError("no " + what + " named '" + name + "'");
    return it->second;
  }
  if (m.size() != 1) {
    throw InputError("the document has " + std::to_string(m.size()) + " " + what + " sections; select one by name");
  }
  return m.begin()->second;
}

/// The cyclic element on `module`: by name, or the only one on that module.
inline const CyclicElement& cyclic_on(const Structures& s, const ModulePtr& module, const std::string& name) {
  if (!name.empty()) {
    const auto& c = pick(s.cyclics, name, "cyclic element");
    if (c.module != module) throw InputError("cyclic element '" + name + "' is not on module " + module->name());
    return c;
  }
  const CyclicElement* found = nullptr;
  for (const auto& [n, c] : s.cyclics) {
    if (c.module != module) continue;
    if (found) throw InputError("module " + module->name() + " has several cyclic elements; select one by name");
    found = &c;
  }
  if (!found) throw InputError("module " + module->name() + " has no cyclic element");
  return *found;
}

struct Solved {
  CyclicElementCertificate cert;
  BoundingCochain b;
};

/// Certifies, solves, and re-verifies Maurer-Cartan and d^b(1) = 0.
inline Solved solve(const CyclicElement& c, const Rational& bound, const std::string& stage) {
  try {
    auto cert = certify_cyclic(c.module, c.one);
    auto b = solve_bounding_cochain(cert, bound);
    if (auto r = verify_mc(*c.module->algebra(), b.value, bound)) throw StageFailure(stage, "Maurer-Cartan " + r->render());
    const Valuation v = twisted_map_unchecked(*c.module, b.value).apply(c.one).valuation();
    if (!v.is_infinite() && v.value() < bound) {
      throw StageFailure(stage, "d^b(1) is nonzero at level " + to_string(v.value()));
    }
    return {std::move(cert), std::move(b)};
  } catch (const NotCyclicError& e) {
    throw StageFailure(stage, e.what());
  } catch (const InconsistencyError& e) {
    throw StageFailure(stage, e.what());
  }
}

inline std::vector<std::string> level_lines(const Element& b) {
  std::vector<std::string> out;
  for (const auto& l : b.levels()) {
    std::string names;
    for (Index g : b.level_component(l)) names += (names.empty() ? "" : " + ") + b.basis()->generator(g);
    out.push_back("b at level " + to_string(l) + ": " + names);
  }
  return out;
}

inline std::string witness(const NotAComplexError& e) {
  return std::string(e.what()) + " (witness " + e.witness() + ", level " + e.level() + ")";
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline void cmd_check(const detail::Loaded& in, const Options& opt, RunReport& r) {
  static const std::vector<std::string> kinds{"algebra", "module", "bimodule", "homomorphism", "floer", "pairing"};
  if (!opt.kind.empty() && std::find(kinds.begin(), kinds.end(), opt.kind) == kinds.end()) {
    throw InputError("--kind must be one of algebra, module, bimodule, homomorphism, floer, pairing");
  }
  const auto& s = in.s;
  std::size_t checked = 0;
  auto run = [&](const std::string& kind, const std::string& name, const std::function<CheckResult()>& check) {
    if (!opt.kind.empty() && opt.kind != kind) return;
    if (!opt.name.empty() && opt.name != name) return;
    ++checked;
    if (auto c = check()) {
      r.outcome = Outcome::Fail;
      r.details.push_back(kind + " " + name + ": fail");
      r.details.push_back("counterexample: " + c->render());
      throw StageFailure("", "");
    }
    r.details.push_back(kind + " " + name + ": pass");
  };
  try {
    for (const auto& [n, a] : s.algebras) run("algebra", n, [&] { return check_algebra_relations(*a, in.bound); });
    for (const auto& [n, m] : s.modules) run("module", n, [&] { return check_module_relations(*m, in.bound); });
    for (const auto& [n, b] : s.bimodules) run("bimodule", n, [&] { return check_bimodule_relations(*b, in.bound); });
    for (const auto& [n, f] : s.homomorphisms) run("homomorphism", n, [&] { return check_homomorphism(*f, in.bound); });
    for (const auto& [n, f] : s.floers) {
      run("floer", n, [&]() -> CheckResult {
        try {
          realize_floer_boundary(*f);
        } catch (const NotAComplexError& e) {
          r.outcome = Outcome::Fail;
          r.details.push_back("floer " + n + ": fail");
          r.details.push_back("witness: " + detail::witness(e));
          throw StageFailure("", "");
        }
        return std::nullopt;
      });
    }
    for (const auto& [n, g] : s.gluings) {
      run("pairing", n, [&]() -> CheckResult {
        try {
          return check_pairing_relation(*g, in.bound);
        } catch (const NotAComplexError& e) {
          r.outcome = Outcome::Fail;
          r.details.push_back("pairing " + n + ": fail");
          r.details.push_back("witness: " + detail::witness(e));
          throw StageFailure("", "");
        }
      });
    }
  } catch (const StageFailure&) {
    return;  // details already recorded
  }
  if (checked == 0) throw InputError("nothing to check" + (opt.kind.empty() ? "" : " of kind " + opt.kind) +
                                     (opt.name.empty() ? "" : " named " + opt.name));
  r.details.push_back("checked " + std::to_string(checked) + " structure" + (checked == 1 ? "" : "s") +
                      " below level " + to_string(in.bound));
}

inline void cmd_solve(const detail::Loaded& in, const Options& opt, RunReport& r) {
  const CyclicElement& c = detail::pick(in.s.cyclics, opt.cyclic, "cyclic element");
  const auto solved = detail::solve(c, in.bound, "solve");
  if (opt.trace) {
    for (const auto& line : solved.b.trace) r.details.push_back(line);
  }
  for (const auto& line : detail::level_lines(solved.b.value)) r.details.push_back(line);
  r.details.push_back("b = " + to_string(solved.b.value));
  r.details.push_back("Maurer-Cartan holds below " + to_string(in.bound));
  r.details.push_back("d^b(1) = 0 below " + to_string(in.bound));
  if (opt.oracle) {
    const auto all = oracle_bounding_cochains(*c.module, c.one, in.bound, oracle_budget_from_env());
    if (all.size() != 1 || !(all.front() == solved.b.value)) {
      r.outcome = Outcome::Fail;
      r.details.push_back("oracle: " + std::to_string(all.size()) + " solutions, expected exactly the solver's");
      return;
    }
    r.details.push_back("oracle: unique solution, equal to the solver's");
  }
}

inline void cmd_homology(const detail::Loaded& in, const Options& opt, RunReport& r) {
  const auto& s = in.s;
  LinearMap d = [&]() -> LinearMap {
    if (opt.differential == "floer") return detail::pick(s.floers, opt.name, "floer")->boundary();
    if (opt.differential == "bare") {
      const auto& m = detail::pick(s.modules, opt.name, "module");
      return twisted_map_unchecked(*m, m->algebra()->zero());
    }
    if (opt.differential == "twisted") {
      const auto& m = detail::pick(s.modules, opt.name, "module");
      Element b = m->algebra()->zero();
      if (!opt.cochain.empty()) {
        const auto& c = detail::pick(s.cochains, opt.cochain, "cochain");
        if (!same_algebra(*c.algebra, *m->algebra())) {
          throw InputError("cochain '" + opt.cochain + "' is not over the algebra of module " + m->name());
        }
        b = c.b;
      } else {
        b = detail::solve(detail::cyclic_on(s, m, opt.cyclic), in.bound, "solve").b.value;
      }
      r.details.push_back("b = " + to_string(b));
      try {
        return twisted_differential(*m, b);
      } catch (const MaurerCartanError& e) {
        throw StageFailure("twist", e.what());
      }
    }
    if (opt.differential == "pair") {
      const auto& p = detail::pick(s.bimodules, opt.name, "bimodule");
      auto side = [&](const std::string& sel, const AlgebraPtr& algebra, bool left) -> Element {
        if (!sel.empty()) {
          const auto& c = detail::pick(s.cochains, sel, "cochain");
          if (!same_algebra(*c.algebra, *algebra)) throw InputError("cochain '" + sel + "' is over the wrong algebra");
          return c.b;
        }
        // from a gluing tensor over this bimodule and its cyclic elements
        for (const auto& [n, g] : s.gluings) {
          if (g->pair() != p) continue;
          const ModulePtr& m = left ? g->module1() : g->module2();
          return detail::solve(detail::cyclic_on(s, m, ""), in.bound, "solve").b.value;
        }
        throw InputError(std::string("no --") + (left ? "b1" : "b2") +
                         " cochain and no gluing tensor to solve it from");
      };
      const Element b1 = side(opt.b1, p->left_algebra(), true);
      const Element b2 = side(opt.b2, p->right_algebra(), false);
      r.details.push_back("b1 = " + to_string(b1));
      r.details.push_back("b2 = " + to_string(b2));
      try {
        return bimodule_twisted_differential(*p, b1, b2);
      } catch (const MaurerCartanError& e) {
        throw StageFailure("twist", e.what());
      }
    }
    throw InputError("--differential must be one of bare, twisted, pair, floer");
  }();
  try {
    for (const auto& line : homology(d).render_lines()) r.details.push_back(line);
  } catch (const NotAComplexError& e) {
    throw StageFailure("homology", "differential does not square to zero: " + detail::witness(e));
  }
}

inline void cmd_pair(const detail::Loaded& in, const Options& opt, RunReport& r) {
  const auto& s = in.s;
  const GluingPtr& g = detail::pick(s.gluings, opt.name, "gluing");
  const CyclicElement& c1 = detail::cyclic_on(s, g->module1(), "");
  const CyclicElement& c2 = detail::cyclic_on(s, g->module2(), "");
  auto stage = [&](const std::string& name, const std::function<void()>& body) {
    body();
    r.details.push_back("stage " + name + ": pass");
  };

  stage("relations", [&] {
    for (const auto& c : {check_module_relations(*g->module1(), in.bound),
                          check_module_relations(*g->module2(), in.bound),
                          check_bimodule_relations(*g->pair(), in.bound)}) {
      if (c) throw StageFailure("relations", "counterexample: " + c->render());
    }
    try {
      realize_floer_boundary(*g->floer());
    } catch (const NotAComplexError& e) {
      throw StageFailure("relations", "floer boundary: " + detail::witness(e));
    }
  });
  std::optional<detail::Solved> s1, s2;
  stage("solve", [&] {
    s1 = detail::solve(c1, in.bound, "solve");
    s2 = detail::solve(c2, in.bound, "solve");
    r.details.push_back("b1 = " + to_string(s1->b.value));
    r.details.push_back("b2 = " + to_string(s2->b.value));
  });
  stage("pairing-relation", [&] {
    if (auto c = check_pairing_relation(*g, in.bound)) {
      throw StageFailure("pairing-relation", "counterexample: " + c->render());
    }
  });
  std::optional<LinearMap> phi;
  stage("chain-map", [&] {
    try {
      phi = induced_gluing_map(*g, s1->cert, s1->b.value, s2->cert, s2->b.value);
    } catch (const InconsistencyError& e) {
      throw StageFailure("chain-map", e.what());
    }
  });
  stage("leading-term", [&] {
    if (auto why = leading_term_failure(*phi)) throw StageFailure("leading-term", *why);
  });
  stage("homology", [&] {
    const auto source = homology(bimodule_twisted_differential(*g->pair(), s1->b.value, s2->b.value));
    const auto target = homology(realize_floer_boundary(*g->floer()));
    r.details.push_back("pair complex: " + source.render());
    r.details.push_back("floer complex: " + target.render());
    if (!source.same_invariants(target)) throw StageFailure("homology", "homologies differ");
  });
  const auto h = homology(realize_floer_boundary(*g->floer()));
  r.details.push_back("isomorphism verified: " + HomologyReport::render_parts(h.free_rank, h.torsion));
}

/// Runs one command end to end; never throws.
inline RunReport run(const std::string& command, const std::string& path, const Options& opt, const DigestFn& digest) {
  const auto start = std::chrono::steady_clock::now();
  RunReport r;
  r.command = command;
  r.input = path;
  try {
    const std::string text = detail::read_file(path);
    r.digest = digest(text);
    const detail::Loaded in = detail::load(text, opt);
    if (command == "check") {
      cmd_check(in, opt, r);
    } else if (command == "solve") {
      cmd_solve(in, opt, r);
    } else if (command == "homology") {
      cmd_homology(in, opt, r);
    } else if (command == "pair") {
      cmd_pair(in, opt, r);
    } else {
      throw InputError("unknown command '" + command + "'");
    }
  } catch (const StageFailure& e) {
    r.outcome = Outcome::Fail;
    r.details.push_back("stage " + e.stage() + ": fail");
    r.details.push_back(e.what());
  } catch (const InputError& e) {
    r.outcome = Outcome::Error;
    r.details.push_back(std::string("error: ") + e.what());
  } catch (const BudgetExceededError& e) {
    r.outcome = Outcome::Error;
    r.details.push_back(std::string("error: ") + e.what() + " (raise AINF_ORACLE_BUDGET)");
  } catch (const std::exception& e) {
    r.outcome = Outcome::Error;
    r.details.push_back(std::string("error: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace ainf::cli
