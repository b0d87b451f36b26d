#pragma once

/**
 * @file specfmt.hpp
 * @brief The .afd structure document: strict parser with positioned
 *        diagnostics, canonical serializer and a JSON rendering.
 *
 * The grammar is documented in docs/format.md. Parsing runs in two passes:
 * the first splits the text into a header and sections of key lines and
 * entry lines, the second resolves names and builds tables in a fixed kind
 * order (bases, algebras, modules, bimodules, homomorphisms, floer data,
 * gluing tensors, cyclic elements, cochains), so references may point
 * forward. Parsing never throws; every failure becomes one Diagnostic.
 */

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "ainf/pairing.hpp"

namespace ainf {

inline constexpr int kFormatVersion = 1;

enum class DiagnosticCode {
  SyntaxError,
  UnknownSection,
  UnresolvedName,
  LevelNotInMonoid,
  DuplicateEntry,
  UnsupportedVersion,
  InvalidValue,
  ArityMismatch,
  DuplicateName,
  LevelAboveCutoff,
  IncompatibleStructures,
};

inline const std::vector<DiagnosticCode>& all_diagnostic_codes() {
  static const std::vector<DiagnosticCode> codes{
      DiagnosticCode::SyntaxError,      DiagnosticCode::UnknownSection,     DiagnosticCode::UnresolvedName,
      DiagnosticCode::LevelNotInMonoid, DiagnosticCode::DuplicateEntry,     DiagnosticCode::UnsupportedVersion,
      DiagnosticCode::InvalidValue,     DiagnosticCode::ArityMismatch,      DiagnosticCode::DuplicateName,
      DiagnosticCode::LevelAboveCutoff, DiagnosticCode::IncompatibleStructures};
  return codes;
}

inline std::string code_name(DiagnosticCode c) {
  switch (c) {
    case DiagnosticCode::SyntaxError: return "SYNTAX_ERROR";
    case DiagnosticCode::UnknownSection: return "UNKNOWN_SECTION";
    case DiagnosticCode::UnresolvedName: return "UNRESOLVED_NAME";
    case DiagnosticCode::LevelNotInMonoid: return "LEVEL_NOT_IN_MONOID";
    case DiagnosticCode::DuplicateEntry: return "DUPLICATE_ENTRY";
    case DiagnosticCode::UnsupportedVersion: return "UNSUPPORTED_VERSION";
    case DiagnosticCode::InvalidValue: return "INVALID_VALUE";
    case DiagnosticCode::ArityMismatch: return "ARITY_MISMATCH";
    case DiagnosticCode::DuplicateName: return "DUPLICATE_NAME";
    case DiagnosticCode::LevelAboveCutoff: return "LEVEL_ABOVE_CUTOFF";
    case DiagnosticCode::IncompatibleStructures: return "INCOMPATIBLE_STRUCTURES";
  }
  return "UNKNOWN";
}

struct Diagnostic {
  DiagnosticCode code = DiagnosticCode::SyntaxError;
  int line = 0;    // 1-based
  int column = 0;  // 1-based
  std::string message;

  /// "3:7: UNRESOLVED_NAME: no generator 'z' in basis C"
  std::string render() const {
    return std::to_string(line) + ":" + std::to_string(column) + ": " + code_name(code) + ": " + message;
  }
};

// ---------------------------------------------------------------------------
// Document model. Names and tables only; structures are built by materialize.

struct AlgebraRef {
  std::string name;
  bool opposite = false;
  friend bool operator==(const AlgebraRef&, const AlgebraRef&) = default;
};

struct BasisDecl {
  std::vector<std::string> generators;
  std::optional<std::vector<int>> degrees;  // reduced mod modulus when modulus > 0
  int modulus = 0;
  friend bool operator==(const BasisDecl&, const BasisDecl&) = default;
};

struct AlgebraDecl {
  std::string basis;
  GappedOperationTable ops;
  friend bool operator==(const AlgebraDecl&, const AlgebraDecl&) = default;
};

struct ModuleDecl {
  std::string basis;
  AlgebraRef algebra;
  GappedOperationTable ops;
  friend bool operator==(const ModuleDecl&, const ModuleDecl&) = default;
};

struct BimoduleDecl {
  std::string basis;
  AlgebraRef left;
  AlgebraRef right;
  GappedOperationTable ops;
  friend bool operator==(const BimoduleDecl&, const BimoduleDecl&) = default;
};

struct HomomorphismDecl {
  std::string source;
  std::string target;
  GappedOperationTable ops;
  friend bool operator==(const HomomorphismDecl&, const HomomorphismDecl&) = default;
};

/// (energy, from, to), Z/2 count 1 each.
using WeightEntry = std::tuple<Rational, Index, Index>;

struct FloerDecl {
  std::string basis;
  std::set<WeightEntry> weights;
  friend bool operator==(const FloerDecl&, const FloerDecl&) = default;
};

struct GluingDecl {
  std::string module1;
  std::string pair;
  std::string module2;
  std::string floer;
  GappedOperationTable ops;
  friend bool operator==(const GluingDecl&, const GluingDecl&) = default;
};

/// (level, generator index)
using TermEntry = std::pair<Rational, Index>;

struct CyclicDecl {
  std::string module;
  std::set<TermEntry> terms;
  friend bool operator==(const CyclicDecl&, const CyclicDecl&) = default;
};

struct CochainDecl {
  AlgebraRef algebra;
  std::set<TermEntry> terms;
  friend bool operator==(const CochainDecl&, const CochainDecl&) = default;
};

struct Document {
  int version = kFormatVersion;
  std::vector<Rational> monoid;  // sorted, distinct
  std::optional<Rational> cutoff;
  TruncationPtr ring;            // set exactly when cutoff is

  std::map<std::string, BasisDecl> bases;
  std::map<std::string, AlgebraDecl> algebras;
  std::map<std::string, ModuleDecl> modules;
  std::map<std::string, BimoduleDecl> bimodules;
  std::map<std::string, HomomorphismDecl> homomorphisms;
  std::map<std::string, FloerDecl> floers;
  std::map<std::string, GluingDecl> gluings;
  std::map<std::string, CyclicDecl> cyclics;
  std::map<std::string, CochainDecl> cochains;

  bool has_sections() const {
    return !(bases.empty() && algebras.empty() && modules.empty() && bimodules.empty() && homomorphisms.empty() &&
             floers.empty() && gluings.empty() && cyclics.empty() && cochains.empty());
  }

  // The ring pointer is derived from monoid and cutoff.
  friend bool operator==(const Document& a, const Document& b) {
    return a.version == b.version && a.monoid == b.monoid && a.cutoff == b.cutoff && a.bases == b.bases &&
           a.algebras == b.algebras && a.modules == b.modules && a.bimodules == b.bimodules &&
           a.homomorphisms == b.homomorphisms && a.floers == b.floers && a.gluings == b.gluings &&
           a.cyclics == b.cyclics && a.cochains == b.cochains;
  }
};

// ---------------------------------------------------------------------------
// Materialized structures.

struct CyclicElement {
  ModulePtr module;
  Element one;
};

struct Cochain {
  AlgebraPtr algebra;
  Element b;
};

struct Structures {
  TruncationPtr ring;
  std::map<std::string, BasisPtr> bases;
  std::map<std::string, AlgebraPtr> algebras;
  std::map<std::string, ModulePtr> modules;
  std::map<std::string, BimodulePtr> bimodules;
  std::map<std::string, HomomorphismPtr> homomorphisms;
  std::map<std::string, FloerPtr> floers;
  std::map<std::string, GluingPtr> gluings;
  std::map<std::string, CyclicElement> cyclics;
  std::map<std::string, Cochain> cochains;
};

namespace fmt_detail {

/// The referenced algebra, or its opposite built once per name.
inline AlgebraPtr resolve_algebra(const Structures& s, std::map<std::string, AlgebraPtr>& opposites,
                                  const AlgebraRef& ref) {
  const AlgebraPtr& base = s.algebras.at(ref.name);
  if (!ref.opposite) return base;
  auto it = opposites.find(ref.name);
  if (it == opposites.end()) it = opposites.emplace(ref.name, opposite_algebra(*base, ref.name + " op")).first;
  return it->second;
}

inline Element element_from_terms(const BasisPtr& basis, const TruncationPtr& ring, const std::set<TermEntry>& terms) {
  Element e(basis, ring);
  for (const auto& [level, g] : terms) e.add(g, NovikovScalar::monomial(ring, level));
  return e;
}

/// Builds every structure. Construction failures are reported through
/// `fail(kind, name, message)`, which must throw.
inline Structures build(const Document& doc,
                        const std::function<void(const std::string&, const std::string&, const std::string&)>& fail) {
  Structures s;
  s.ring = doc.ring;
  if (!doc.has_sections()) return s;
  auto guarded = [&](const std::string& kind, const std::string& name, auto&& make) {
    try {
      return make();
    } catch (const Error& e) {
      fail(kind, name, e.what());
      throw;  // unreachable when fail throws
    }
  };
  for (const auto& [name, b] : doc.bases) {
    auto basis = std::make_shared<Basis>(name, b.generators);
    if (b.degrees) basis->set_grading(b.modulus, *b.degrees);
    s.bases.emplace(name, std::move(basis));
  }
  for (const auto& [name, a] : doc.algebras) {
    s.algebras.emplace(name, guarded("algebra", name, [&] {
                         return std::make_shared<const FilteredAlgebra>(name, s.bases.at(a.basis), a.ops);
                       }));
  }
  std::map<std::string, AlgebraPtr> opposites;
  for (const auto& [name, m] : doc.modules) {
    s.modules.emplace(name, guarded("module", name, [&] {
                        return std::make_shared<const FilteredRightModule>(
                            name, s.bases.at(m.basis), resolve_algebra(s, opposites, m.algebra), m.ops);
                      }));
  }
  for (const auto& [name, b] : doc.bimodules) {
    s.bimodules.emplace(name, guarded("bimodule", name, [&] {
                          return std::make_shared<const FilteredBimodule>(
                              name, s.bases.at(b.basis), resolve_algebra(s, opposites, b.left),
                              resolve_algebra(s, opposites, b.right), b.ops);
                        }));
  }
  for (const auto& [name, h] : doc.homomorphisms) {
    s.homomorphisms.emplace(name, guarded("homomorphism", name, [&] {
                              return std::make_shared<const AInftyHomomorphism>(name, s.modules.at(h.source),
                                                                                s.modules.at(h.target), h.ops);
                            }));
  }
  for (const auto& [name, f] : doc.floers) {
    s.floers.emplace(name, guarded("floer", name, [&] {
                       FloerComplexData::Weights weights;
                       for (const auto& [energy, from, to] : f.weights) weights[{from, to}].push_back({energy, 1});
                       return std::make_shared<const FloerComplexData>(name, s.bases.at(f.basis), doc.ring,
                                                                       std::move(weights));
                     }));
  }
  for (const auto& [name, g] : doc.gluings) {
    s.gluings.emplace(name, guarded("gluing", name, [&] {
                        return std::make_shared<const GluingTensor>(name, s.modules.at(g.module1),
                                                                    s.bimodules.at(g.pair), s.modules.at(g.module2),
                                                                    s.floers.at(g.floer), g.ops);
                      }));
  }
  for (const auto& [name, c] : doc.cyclics) {
    const ModulePtr& m = s.modules.at(c.module);
    s.cyclics.emplace(name, CyclicElement{m, element_from_terms(m->basis(), doc.ring, c.terms)});
  }
  for (const auto& [name, c] : doc.cochains) {
    AlgebraPtr a = resolve_algebra(s, opposites, c.algebra);
    Element b = element_from_terms(a->basis(), doc.ring, c.terms);
    s.cochains.emplace(name, Cochain{std::move(a), std::move(b)});
  }
  return s;
}

}  // namespace fmt_detail

/// Builds the structures of a parsed document; throws ValidationError if
/// they are mutually incompatible (parse already rules that out).
inline Structures materialize(const Document& doc) {
  return fmt_detail::build(doc, [](const std::string& kind, const std::string& name, const std::string& message) {
    throw ValidationError(kind + " " + name + ": " + message);
  });
}

// ---------------------------------------------------------------------------
// Parser.

struct ParseResult {
  std::optional<Document> document;
  std::optional<Diagnostic> diagnostic;

  bool ok() const noexcept { return document.has_value(); }
};

namespace fmt_detail {

struct Token {
  std::string text;
  int column = 0;
};

struct Line {
  int number = 0;
  std::vector<Token> tokens;
  int end_column = 1;  // column just past the last character
};

struct DiagnosticThrow {
  Diagnostic diagnostic;
};

[[noreturn]] inline void fail_at(DiagnosticCode code, int line, int column, std::string message) {
  throw DiagnosticThrow{Diagnostic{code, line, column, std::move(message)}};
}

[[noreturn]] inline void fail_at(DiagnosticCode code, const Line& l, const Token& t, std::string message) {
  fail_at(code, l.number, t.column, std::move(message));
}

inline bool is_special(char c) { return c == '=' || c == ':' || c == '[' || c == ']'; }

/// Splits a line into tokens; '=', ':', '[', ']' and "->" stand alone and
/// '#' starts a comment.
inline Line tokenize(std::string_view text, int number) {
  Line line;
  line.number = number;
  line.end_column = static_cast<int>(text.size()) + 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    const int column = static_cast<int>(i) + 1;
    if (is_special(c)) {
      line.tokens.push_back({std::string(1, c), column});
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      line.tokens.push_back({"->", column});
      i += 2;
      continue;
    }
    std::size_t j = i;
    while (j < text.size()) {
      const char d = text[j];
      if (d == ' ' || d == '\t' || d == '\r' || d == '#' || is_special(d)) break;
      if (d == '-' && j + 1 < text.size() && text[j + 1] == '>') break;
      ++j;
    }
    line.tokens.push_back({std::string(text.substr(i, j - i)), column});
    i = j;
  }
  return line;
}

inline bool valid_name(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  });
}

struct RawSection {
  std::string kind;
  std::string name;
  Line header;
  std::map<std::string, Line> keys;  // key -> whole line
  std::vector<Line> entries;
};

inline const std::map<std::string, std::vector<std::string>>& section_keys() {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"basis", {"generators", "degrees", "modulus"}},
      {"algebra", {"basis"}},
      {"module", {"basis", "algebra"}},
      {"bimodule", {"basis", "left", "right"}},
      {"homomorphism", {"source", "target"}},
      {"floer", {"basis"}},
      {"gluing", {"module1", "pair", "module2", "floer"}},
      {"cyclic", {"module"}},
      {"cochain", {"algebra"}},
  };
  return keys;
}

inline const std::map<std::string, std::string>& entry_keyword() {
  static const std::map<std::string, std::string> words{
      {"algebra", "op"},      {"module", "op"}, {"bimodule", "op"}, {"homomorphism", "op"},
      {"floer", "weight"},    {"gluing", "op"}, {"cyclic", "term"}, {"cochain", "term"},
  };
  return words;
}

inline bool two_string_kind(const std::string& kind) { return kind == "bimodule" || kind == "gluing"; }

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Document run() {
    split();
    read_header_keys();
    for (const auto& kind : {"basis", "algebra", "module", "bimodule", "homomorphism", "floer", "gluing", "cyclic",
                             "cochain"}) {
      for (auto& sec : sections_) {
        if (sec.kind == kind) read_section(sec);
      }
    }
    if (!sections_.empty()) {
      build(doc_, [this](const std::string& kind, const std::string& name, const std::string& message) {
        const RawSection& sec = *sections_by_key_.at({kind, name});
        fail_at(DiagnosticCode::IncompatibleStructures, sec.header, sec.header.tokens[2], message);
      });
    }
    return std::move(doc_);
  }

 private:
  // ---- pass 1 ----

  void split() {
    std::vector<Line> lines;
    int number = 0;
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      const std::size_t end = std::min(text_.find('\n', pos), text_.size());
      ++number;
      Line l = tokenize(text_.substr(pos, end - pos), number);
      if (!l.tokens.empty()) lines.push_back(std::move(l));
      if (end == text_.size()) break;
      pos = end + 1;
    }
    if (lines.empty()) fail_at(DiagnosticCode::SyntaxError, 1, 1, "missing 'afd <version>' header");
    const Line& head = lines.front();
    if (head.tokens[0].text != "afd") {
      fail_at(DiagnosticCode::SyntaxError, head, head.tokens[0], "expected 'afd <version>' header");
    }
    if (head.tokens.size() != 2) {
      fail_at(DiagnosticCode::SyntaxError, head.number, head.tokens.size() < 2 ? head.end_column : head.tokens[2].column,
              "header is 'afd <version>'");
    }
    const auto version = detail::parse_int(head.tokens[1].text, false);
    if (!version) fail_at(DiagnosticCode::SyntaxError, head, head.tokens[1], "version must be an integer");
    if (*version != kFormatVersion) {
      fail_at(DiagnosticCode::UnsupportedVersion, head, head.tokens[1],
              "format version " + head.tokens[1].text + " is not supported (this reader knows " +
                  std::to_string(kFormatVersion) + ")");
    }
    doc_.version = static_cast<int>(*version);

    RawSection* current = nullptr;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      Line& l = lines[i];
      const Token& first = l.tokens[0];
      if (first.text == "[") {
        current = &open_section(l);
        continue;
      }
      if (l.tokens.size() >= 2 && l.tokens[1].text == "=") {
        auto& keys = current ? current->keys : header_keys_;
        const auto& allowed = current ? section_keys().at(current->kind) : std::vector<std::string>{"monoid", "cutoff"};
        if (std::find(allowed.begin(), allowed.end(), first.text) == allowed.end()) {
          fail_at(DiagnosticCode::SyntaxError, l, first,
                  "unknown key '" + first.text + "'" + (current ? " in " + current->kind + " section" : ""));
        }
        if (keys.count(first.text)) fail_at(DiagnosticCode::DuplicateEntry, l, first, "key '" + first.text + "' given twice");
        keys.emplace(first.text, std::move(l));
        continue;
      }
      if (!current) fail_at(DiagnosticCode::SyntaxError, l, first, "expected 'key = value' or a section header");
      auto kw = entry_keyword().find(current->kind);
      if (kw == entry_keyword().end() || kw->second != first.text) {
        fail_at(DiagnosticCode::SyntaxError, l, first,
                "unexpected '" + first.text + "' in " + current->kind + " section" +
                    (kw == entry_keyword().end() ? "" : " (entries start with '" + kw->second + "')"));
      }
      current->entries.push_back(std::move(l));
    }
  }

  RawSection& open_section(const Line& l) {
    const auto& t = l.tokens;
    if (t.size() < 2 || t[1].text == "]") fail_at(DiagnosticCode::SyntaxError, l, t[0], "empty section header");
    if (!section_keys().count(t[1].text)) {
      fail_at(DiagnosticCode::UnknownSection, l, t[1], "unknown section kind '" + t[1].text + "'");
    }
    if (t.size() != 4 || t[3].text != "]") {
      fail_at(DiagnosticCode::SyntaxError, l.number, t.size() > 3 ? t[3].column : l.end_column,
              "section header is '[<kind> <name>]'");
    }
    if (!valid_name(t[2].text)) fail_at(DiagnosticCode::InvalidValue, l, t[2], "invalid name '" + t[2].text + "'");
    if (auto it = sections_by_key_.find({t[1].text, t[2].text}); it != sections_by_key_.end()) {
      fail_at(DiagnosticCode::DuplicateName, l, t[2],
              "a " + t[1].text + " named '" + t[2].text + "' is already declared on line " +
                  std::to_string(it->second->header.number));
    }
    sections_.push_back(RawSection{t[1].text, t[2].text, l, {}, {}});
    sections_by_key_[{t[1].text, t[2].text}] = &sections_.back();
    return sections_.back();
  }

  // ---- header ----

  void read_header_keys() {
    auto monoid = header_keys_.find("monoid");
    auto cutoff = header_keys_.find("cutoff");
    if (monoid != header_keys_.end()) {
      const Line& l = monoid->second;
      std::vector<Rational> gens;
      for (std::size_t i = 2; i < l.tokens.size(); ++i) {
        const auto r = parse_rational(l.tokens[i].text);
        if (!r) fail_at(DiagnosticCode::InvalidValue, l, l.tokens[i], "'" + l.tokens[i].text + "' is not a rational");
        if (*r <= 0) fail_at(DiagnosticCode::InvalidValue, l, l.tokens[i], "monoid generators must be positive");
        gens.push_back(*r);
      }
      if (gens.empty()) fail_at(DiagnosticCode::SyntaxError, l.number, l.end_column, "monoid needs a generator");
      std::sort(gens.begin(), gens.end());
      gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
      doc_.monoid = std::move(gens);
    }
    if (cutoff != header_keys_.end()) {
      const Line& l = cutoff->second;
      if (l.tokens.size() != 3) {
        fail_at(DiagnosticCode::SyntaxError, l.number, l.tokens.size() > 3 ? l.tokens[3].column : l.end_column,
                "cutoff takes one rational");
      }
      const auto r = parse_rational(l.tokens[2].text);
      if (!r) fail_at(DiagnosticCode::InvalidValue, l, l.tokens[2], "'" + l.tokens[2].text + "' is not a rational");
      if (*r <= 0) fail_at(DiagnosticCode::InvalidValue, l, l.tokens[2], "cutoff must be positive");
      doc_.cutoff = *r;
    }
    if ((monoid == header_keys_.end()) != (cutoff == header_keys_.end())) {
      const Line& l = monoid != header_keys_.end() ? monoid->second : cutoff->second;
      fail_at(DiagnosticCode::SyntaxError, l, l.tokens[0], "monoid and cutoff must be given together");
    }
    if (doc_.cutoff) doc_.ring = make_truncation(doc_.monoid, *doc_.cutoff);
    if (!sections_.empty() && !doc_.ring) {
      const Line& l = sections_.front().header;
      fail_at(DiagnosticCode::SyntaxError, l, l.tokens[0], "sections need 'monoid' and 'cutoff' in the header");
    }
  }

  // ---- pass 2 helpers ----

  const Line& require_key(const RawSection& sec, const std::string& key) {
    auto it = sec.keys.find(key);
    if (it == sec.keys.end()) {
      fail_at(DiagnosticCode::SyntaxError, sec.header, sec.header.tokens[2],
              sec.kind + " " + sec.name + " needs '" + key + " = ...'");
    }
    return it->second;
  }

  /// Single-name value of a key line.
  const Token& single_value(const Line& l) {
    if (l.tokens.size() != 3) {
      fail_at(DiagnosticCode::SyntaxError, l.number, l.tokens.size() > 3 ? l.tokens[3].column : l.end_column,
              "'" + l.tokens[0].text + "' takes one name");
    }
    return l.tokens[2];
  }

  std::string reference(const RawSection& sec, const std::string& key, const std::string& kind) {
    const Line& l = require_key(sec, key);
    const Token& t = single_value(l);
    check_kind(l, t, kind);
    return t.text;
  }

  void check_kind(const Line& l, const Token& t, const std::string& kind) {
    if (!sections_by_key_.count({kind, t.text})) {
      fail_at(DiagnosticCode::UnresolvedName, l, t, "no " + kind + " named '" + t.text + "'");
    }
  }

  /// "A" or "A op"
  AlgebraRef algebra_reference(const RawSection& sec, const std::string& key) {
    const Line& l = require_key(sec, key);
    if (l.tokens.size() < 3 || l.tokens.size() > 4) {
      fail_at(DiagnosticCode::SyntaxError, l.number, l.tokens.size() > 4 ? l.tokens[4].column : l.end_column,
              "'" + key + "' takes an algebra name, optionally followed by 'op'");
    }
    check_kind(l, l.tokens[2], "algebra");
    if (l.tokens.size() == 4 && l.tokens[3].text != "op") {
      fail_at(DiagnosticCode::SyntaxError, l, l.tokens[3], "expected 'op' after the algebra name");
    }
    return AlgebraRef{l.tokens[2].text, l.tokens.size() == 4};
  }

  BasisPtr basis_of(const std::string& name) {
    auto it = bases_.find(name);
    if (it != bases_.end()) return it->second;
    const auto& d = doc_.bases.at(name);
    auto b = make_basis(name, d.generators);
    bases_.emplace(name, b);
    return b;
  }

  BasisPtr algebra_basis(const AlgebraRef& ref) { return basis_of(doc_.algebras.at(ref.name).basis); }

  Rational level(const Line& l, const Token& t) {
    const auto r = parse_rational(t.text);
    if (!r) fail_at(DiagnosticCode::InvalidValue, l, t, "'" + t.text + "' is not a rational level");
    if (*r >= *doc_.cutoff) {
      fail_at(DiagnosticCode::LevelAboveCutoff, l, t,
              "level " + to_string(*r) + " is not below the cutoff " + to_string(*doc_.cutoff));
    }
    if (!doc_.ring->is_level(*r)) {
      fail_at(DiagnosticCode::LevelNotInMonoid, l, t, "level " + to_string(*r) + " is not in the monoid");
    }
    return *r;
  }

  Index generator(const Line& l, const Token& t, const BasisPtr& basis) {
    const auto i = basis->find(t.text);
    if (!i) fail_at(DiagnosticCode::UnresolvedName, l, t, "no generator '" + t.text + "' in basis " + basis->name());
    return *i;
  }

  int count(const Line& l, const Token& t, const std::string& text) {
    const auto v = detail::parse_int(text, false);
    if (!v || *v > 64) fail_at(DiagnosticCode::InvalidValue, l, t, "'" + t.text + "' is not an arity");
    return static_cast<int>(*v);
  }

  /// "op <level> <arity> : <inputs> -> <outputs>"
  GappedOperationTable read_ops(const RawSection& sec, const std::function<SlotLayout(Signature)>& layout,
                                const BasisPtr& out) {
    GappedOperationTable table(doc_.ring);
    const bool two = two_string_kind(sec.kind);
    for (const Line& l : sec.entries) {
      const auto& t = l.tokens;
      if (t.size() < 4 || t[3].text != ":") {
        fail_at(DiagnosticCode::SyntaxError, l.number, t.size() > 3 ? t[3].column : l.end_column,
                "entry is 'op <level> <arity> : <inputs> -> <outputs>'");
      }
      const Rational lv = level(l, t[1]);
      Signature sig;
      const auto comma = t[2].text.find(',');
      if (two) {
        if (comma == std::string::npos) {
          fail_at(DiagnosticCode::InvalidValue, l, t[2], "arity of a " + sec.kind + " entry is '<k1>,<k2>'");
        }
        sig = {count(l, t[2], t[2].text.substr(0, comma)), count(l, t[2], t[2].text.substr(comma + 1))};
      } else {
        if (comma != std::string::npos) {
          fail_at(DiagnosticCode::InvalidValue, l, t[2], "arity of a " + sec.kind + " entry is a single count");
        }
        sig = {count(l, t[2], t[2].text), 0};
      }
      std::size_t arrow = 4;
      while (arrow < t.size() && t[arrow].text != "->") ++arrow;
      if (arrow == t.size()) fail_at(DiagnosticCode::SyntaxError, l.number, l.end_column, "missing '->'");
      const SlotLayout slots = layout(sig);
      const std::size_t given = arrow - 4;
      if (given != slots.size()) {
        fail_at(DiagnosticCode::ArityMismatch, l, t[2],
                "arity " + sig.str() + " takes " + std::to_string(slots.size()) + " inputs, got " +
                    std::to_string(given));
      }
      Tuple inputs;
      for (std::size_t i = 0; i < given; ++i) inputs.push_back(generator(l, t[4 + i], slots[i]));
      Z2Vector outputs;
      for (std::size_t i = arrow + 1; i < t.size(); ++i) {
        const Index o = generator(l, t[i], out);
        if (std::find(outputs.begin(), outputs.end(), o) != outputs.end()) {
          fail_at(DiagnosticCode::InvalidValue, l, t[i], "output '" + t[i].text + "' listed twice");
        }
        outputs.push_back(o);
      }
      if (outputs.empty()) fail_at(DiagnosticCode::InvalidValue, l.number, l.end_column, "entry has no outputs");
      if (!table.get(sig, lv, inputs).empty()) {
        fail_at(DiagnosticCode::DuplicateEntry, l, t[0],
                "second entry for level " + to_string(lv) + ", arity " + sig.str() + " and these inputs");
      }
      table.add(sig, lv, inputs, outputs);
    }
    return table;
  }

  /// "term <level> : <generator>"
  std::set<TermEntry> read_terms(const RawSection& sec, const BasisPtr& basis) {
    std::set<TermEntry> terms;
    for (const Line& l : sec.entries) {
      const auto& t = l.tokens;
      if (t.size() != 4 || t[2].text != ":") {
        fail_at(DiagnosticCode::SyntaxError, l.number, t.size() > 2 ? t[2].column : l.end_column,
                "term is 'term <level> : <generator>'");
      }
      const TermEntry e{level(l, t[1]), generator(l, t[3], basis)};
      if (!terms.insert(e).second) fail_at(DiagnosticCode::DuplicateEntry, l, t[0], "term given twice");
    }
    return terms;
  }

  // ---- pass 2 ----

  void read_section(const RawSection& sec) {
    const std::string& name = sec.name;
    if (sec.kind == "basis") {
      read_basis(sec);
    } else if (sec.kind == "algebra") {
      const std::string b = reference(sec, "basis", "basis");
      const BasisPtr basis = basis_of(b);
      auto ops = read_ops(sec, [&](Signature s) { return SlotLayout(static_cast<std::size_t>(s.left), basis); }, basis);
      doc_.algebras.emplace(name, AlgebraDecl{b, std::move(ops)});
    } else if (sec.kind == "module") {
      const std::string b = reference(sec, "basis", "basis");
      const AlgebraRef a = algebra_reference(sec, "algebra");
      const BasisPtr basis = basis_of(b);
      const BasisPtr cb = algebra_basis(a);
      auto ops = read_ops(
          sec,
          [&](Signature s) {
            SlotLayout out{basis};
            out.insert(out.end(), static_cast<std::size_t>(s.left), cb);
            return out;
          },
          basis);
      doc_.modules.emplace(name, ModuleDecl{b, a, std::move(ops)});
    } else if (sec.kind == "bimodule") {
      const std::string b = reference(sec, "basis", "basis");
      const AlgebraRef left = algebra_reference(sec, "left");
      const AlgebraRef right = algebra_reference(sec, "right");
      const BasisPtr basis = basis_of(b);
      const BasisPtr lb = algebra_basis(left);
      const BasisPtr rb = algebra_basis(right);
      auto ops = read_ops(
          sec,
          [&](Signature s) {
            SlotLayout out(static_cast<std::size_t>(s.left), lb);
            out.push_back(basis);
            out.insert(out.end(), static_cast<std::size_t>(s.right), rb);
            return out;
          },
          basis);
      doc_.bimodules.emplace(name, BimoduleDecl{b, left, right, std::move(ops)});
    } else if (sec.kind == "homomorphism") {
      const std::string src = reference(sec, "source", "module");
      const std::string dst = reference(sec, "target", "module");
      const BasisPtr sb = basis_of(doc_.modules.at(src).basis);
      const BasisPtr tb = basis_of(doc_.modules.at(dst).basis);
      const BasisPtr cb = algebra_basis(doc_.modules.at(src).algebra);
      auto ops = read_ops(
          sec,
          [&](Signature s) {
            SlotLayout out{sb};
            out.insert(out.end(), static_cast<std::size_t>(s.left), cb);
            return out;
          },
          tb);
      doc_.homomorphisms.emplace(name, HomomorphismDecl{src, dst, std::move(ops)});
    } else if (sec.kind == "floer") {
      read_floer(sec);
    } else if (sec.kind == "gluing") {
      const std::string m1 = reference(sec, "module1", "module");
      const std::string p = reference(sec, "pair", "bimodule");
      const std::string m2 = reference(sec, "module2", "module");
      const std::string f = reference(sec, "floer", "floer");
      const BasisPtr b1 = basis_of(doc_.modules.at(m1).basis);
      const BasisPtr b2 = basis_of(doc_.modules.at(m2).basis);
      const BasisPtr pb = basis_of(doc_.bimodules.at(p).basis);
      const BasisPtr c1 = algebra_basis(doc_.bimodules.at(p).left);
      const BasisPtr c2 = algebra_basis(doc_.bimodules.at(p).right);
      const BasisPtr fb = basis_of(doc_.floers.at(f).basis);
      auto ops = read_ops(
          sec,
          [&](Signature s) {
            SlotLayout out{b1};
            out.insert(out.end(), static_cast<std::size_t>(s.left), c1);
            out.push_back(pb);
            out.push_back(b2);
            out.insert(out.end(), static_cast<std::size_t>(s.right), c2);
            return out;
          },
          fb);
      doc_.gluings.emplace(name, GluingDecl{m1, p, m2, f, std::move(ops)});
    } else if (sec.kind == "cyclic") {
      const std::string m = reference(sec, "module", "module");
      doc_.cyclics.emplace(name, CyclicDecl{m, read_terms(sec, basis_of(doc_.modules.at(m).basis))});
    } else if (sec.kind == "cochain") {
      const AlgebraRef a = algebra_reference(sec, "algebra");
      doc_.cochains.emplace(name, CochainDecl{a, read_terms(sec, algebra_basis(a))});
    }
  }

  void read_basis(const RawSection& sec) {
    if (!sec.entries.empty()) {
      const Line& l = sec.entries.front();
      fail_at(DiagnosticCode::SyntaxError, l, l.tokens[0], "basis sections have no entries");
    }
    BasisDecl d;
    const Line& g = require_key(sec, "generators");
    std::set<std::string> seen;
    for (std::size_t i = 2; i < g.tokens.size(); ++i) {
      const Token& t = g.tokens[i];
      if (!valid_name(t.text)) fail_at(DiagnosticCode::InvalidValue, g, t, "invalid generator name '" + t.text + "'");
      if (!seen.insert(t.text).second) {
        fail_at(DiagnosticCode::DuplicateName, g, t, "generator '" + t.text + "' listed twice");
      }
      d.generators.push_back(t.text);
    }
    auto mod = sec.keys.find("modulus");
    auto deg = sec.keys.find("degrees");
    if (mod != sec.keys.end()) {
      const Line& l = mod->second;
      const Token& t = single_value(l);
      const auto v = detail::parse_int(t.text, false);
      if (!v || *v > 1'000'000) fail_at(DiagnosticCode::InvalidValue, l, t, "modulus must be a non-negative integer");
      if (deg == sec.keys.end()) fail_at(DiagnosticCode::InvalidValue, l, l.tokens[0], "modulus without degrees");
      d.modulus = static_cast<int>(*v);
    }
    if (deg != sec.keys.end()) {
      const Line& l = deg->second;
      std::vector<int> degrees;
      for (std::size_t i = 2; i < l.tokens.size(); ++i) {
        const auto v = detail::parse_int(l.tokens[i].text, true);
        if (!v || *v > 1'000'000 || *v < -1'000'000) {
          fail_at(DiagnosticCode::InvalidValue, l, l.tokens[i], "'" + l.tokens[i].text + "' is not a degree");
        }
        int x = static_cast<int>(*v);
        if (d.modulus > 0) x = ((x % d.modulus) + d.modulus) % d.modulus;
        degrees.push_back(x);
      }
      if (degrees.size() != d.generators.size()) {
        fail_at(DiagnosticCode::ArityMismatch, l, l.tokens[0],
                std::to_string(d.generators.size()) + " generators but " + std::to_string(degrees.size()) +
                    " degrees");
      }
      d.degrees = std::move(degrees);
    }
    doc_.bases.emplace(sec.name, std::move(d));
  }

  void read_floer(const RawSection& sec) {
    const std::string b = reference(sec, "basis", "basis");
    const BasisPtr basis = basis_of(b);
    FloerDecl d{b, {}};
    for (const Line& l : sec.entries) {
      const auto& t = l.tokens;
      if (t.size() != 6 || t[2].text != ":" || t[4].text != "->") {
        fail_at(DiagnosticCode::SyntaxError, l.number, t.size() > 2 ? t[2].column : l.end_column,
                "weight is 'weight <energy> : <from> -> <to>'");
      }
      const Rational e = level(l, t[1]);
      const Index from = generator(l, t[3], basis);
      const Index to = generator(l, t[5], basis);
      if (e == 0 && from != to) {
        fail_at(DiagnosticCode::InvalidValue, l, t[1], "weights between distinct generators need positive energy");
      }
      if (!d.weights.insert({e, from, to}).second) fail_at(DiagnosticCode::DuplicateEntry, l, t[0], "weight given twice");
    }
    doc_.floers.emplace(sec.name, std::move(d));
  }

  std::string_view text_;
  Document doc_;
  std::map<std::string, Line> header_keys_;
  std::deque<RawSection> sections_;  // stable addresses
  std::map<std::pair<std::string, std::string>, const RawSection*> sections_by_key_;  // (kind, name)
  std::map<std::string, BasisPtr> bases_;
};

}  // namespace fmt_detail

/// Parses and validates a document. Never throws for malformed input.
inline ParseResult parse_document(std::string_view text) {
  ParseResult out;
  try {
    out.document = fmt_detail::Parser(text).run();
  } catch (const fmt_detail::DiagnosticThrow& d) {
    out.diagnostic = d.diagnostic;
  }
  return out;
}

/// Returns a copy with a lower cutoff; entries at or above it are dropped.
inline Document lower_cutoff(const Document& doc, const Rational& cutoff) {
  if (!doc.cutoff) throw ValidationError("document has no cutoff to lower");
  if (cutoff > *doc.cutoff) {
    throw ValidationError("cutoff override " + to_string(cutoff) + " exceeds the document cutoff " +
                          to_string(*doc.cutoff) + "; it can only lower it");
  }
  Document out = doc;
  out.cutoff = cutoff;
  out.ring = make_truncation(doc.monoid, cutoff);
  for (auto& [n, d] : out.algebras) d.ops = d.ops.truncated(out.ring);
  for (auto& [n, d] : out.modules) d.ops = d.ops.truncated(out.ring);
  for (auto& [n, d] : out.bimodules) d.ops = d.ops.truncated(out.ring);
  for (auto& [n, d] : out.homomorphisms) d.ops = d.ops.truncated(out.ring);
  for (auto& [n, d] : out.gluings) d.ops = d.ops.truncated(out.ring);
  for (auto& [n, d] : out.floers) std::erase_if(d.weights, [&](const WeightEntry& w) { return std::get<0>(w) >= cutoff; });
  auto drop = [&](std::set<TermEntry>& terms) {
    std::erase_if(terms, [&](const TermEntry& t) { return t.first >= cutoff; });
  };
  for (auto& [n, d] : out.cyclics) drop(d.terms);
  for (auto& [n, d] : out.cochains) drop(d.terms);
  return out;
}

// ---------------------------------------------------------------------------
// Serializer.

namespace fmt_detail {

inline std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += " " + p;
  return out;
}

inline std::string algebra_ref(const AlgebraRef& r) { return r.opposite ? r.name + " op" : r.name; }

struct Names {
  const Document& doc;

  const std::vector<std::string>& basis(const std::string& name) const { return doc.bases.at(name).generators; }
  const std::vector<std::string>& algebra(const AlgebraRef& r) const {
    return basis(doc.algebras.at(r.name).basis);
  }
};

using SlotNames = std::function<std::vector<const std::vector<std::string>*>(Signature)>;

inline void write_ops(std::ostream& os, const GappedOperationTable& ops, bool two, const SlotNames& slots,
                      const std::vector<std::string>& out) {
  for (const auto& e : ops.canonical_entries()) {
    const auto names = slots(e.signature);
    os << "op " << to_string(e.level) << ' '
       << (two ? std::to_string(e.signature.left) + "," + std::to_string(e.signature.right) : e.signature.str())
       << " :";
    for (std::size_t i = 0; i < e.inputs.size(); ++i) os << ' ' << (*names[i])[e.inputs[i]];
    os << " ->";
    for (Index o : e.outputs) os << ' ' << out[o];
    os << '\n';
  }
}

inline std::vector<const std::vector<std::string>*> layout_names(const std::vector<std::string>* head, int k,
                                                                 const std::vector<std::string>* algebra) {
  std::vector<const std::vector<std::string>*> out;
  if (head) out.push_back(head);
  out.insert(out.end(), static_cast<std::size_t>(k), algebra);
  return out;
}

}  // namespace fmt_detail

/// Canonical text: header, then sections by kind and name, keys in a fixed
/// order, entries sorted by (level, arity, inputs).
inline std::string serialize(const Document& doc) {
  using namespace fmt_detail;
  std::ostringstream os;
  const Names names{doc};
  os << "afd " << doc.version << '\n';
  if (doc.cutoff) {
    os << "monoid =";
    for (const auto& g : doc.monoid) os << ' ' << to_string(g);
    os << "\ncutoff = " << to_string(*doc.cutoff) << '\n';
  }
  for (const auto& [name, b] : doc.bases) {
    os << "\n[basis " << name << "]\ngenerators =" << join(b.generators) << '\n';
    if (b.degrees) {
      os << "degrees =";
      for (int d : *b.degrees) os << ' ' << d;
      os << '\n';
      if (b.modulus > 0) os << "modulus = " << b.modulus << '\n';
    }
  }
  for (const auto& [name, a] : doc.algebras) {
    os << "\n[algebra " << name << "]\nbasis = " << a.basis << '\n';
    const auto* c = &names.basis(a.basis);
    write_ops(os, a.ops, false, [&](Signature s) { return layout_names(nullptr, s.left, c); }, *c);
  }
  for (const auto& [name, m] : doc.modules) {
    os << "\n[module " << name << "]\nbasis = " << m.basis << "\nalgebra = " << algebra_ref(m.algebra) << '\n';
    const auto* d = &names.basis(m.basis);
    const auto* c = &names.algebra(m.algebra);
    write_ops(os, m.ops, false, [&](Signature s) { return layout_names(d, s.left, c); }, *d);
  }
  for (const auto& [name, b] : doc.bimodules) {
    os << "\n[bimodule " << name << "]\nbasis = " << b.basis << "\nleft = " << algebra_ref(b.left)
       << "\nright = " << algebra_ref(b.right) << '\n';
    const auto* p = &names.basis(b.basis);
    const auto* l = &names.algebra(b.left);
    const auto* r = &names.algebra(b.right);
    write_ops(
        os, b.ops, true,
        [&](Signature s) {
          auto out = layout_names(nullptr, s.left, l);
          out.push_back(p);
          out.insert(out.end(), static_cast<std::size_t>(s.right), r);
          return out;
        },
        *p);
  }
  for (const auto& [name, h] : doc.homomorphisms) {
    os << "\n[homomorphism " << name << "]\nsource = " << h.source << "\ntarget = " << h.target << '\n';
    const auto& src = doc.modules.at(h.source);
    const auto* d = &names.basis(src.basis);
    const auto* c = &names.algebra(src.algebra);
    write_ops(os, h.ops, false, [&](Signature s) { return layout_names(d, s.left, c); },
              names.basis(doc.modules.at(h.target).basis));
  }
  for (const auto& [name, f] : doc.floers) {
    os << "\n[floer " << name << "]\nbasis = " << f.basis << '\n';
    const auto& g = names.basis(f.basis);
    for (const auto& [e, from, to] : f.weights) os << "weight " << to_string(e) << " : " << g[from] << " -> " << g[to] << '\n';
  }
  for (const auto& [name, g] : doc.gluings) {
    os << "\n[gluing " << name << "]\nmodule1 = " << g.module1 << "\npair = " << g.pair << "\nmodule2 = " << g.module2
       << "\nfloer = " << g.floer << '\n';
    const auto& p = doc.bimodules.at(g.pair);
    const auto* d1 = &names.basis(doc.modules.at(g.module1).basis);
    const auto* d2 = &names.basis(doc.modules.at(g.module2).basis);
    const auto* pb = &names.basis(p.basis);
    const auto* c1 = &names.algebra(p.left);
    const auto* c2 = &names.algebra(p.right);
    write_ops(
        os, g.ops, true,
        [&](Signature s) {
          auto out = layout_names(d1, s.left, c1);
          out.push_back(pb);
          out.push_back(d2);
          out.insert(out.end(), static_cast<std::size_t>(s.right), c2);
          return out;
        },
        names.basis(doc.floers.at(g.floer).basis));
  }
  for (const auto& [name, c] : doc.cyclics) {
    os << "\n[cyclic " << name << "]\nmodule = " << c.module << '\n';
    const auto& g = names.basis(doc.modules.at(c.module).basis);
    for (const auto& [l, i] : c.terms) os << "term " << to_string(l) << " : " << g[i] << '\n';
  }
  for (const auto& [name, c] : doc.cochains) {
    os << "\n[cochain " << name << "]\nalgebra = " << algebra_ref(c.algebra) << '\n';
    const auto& g = names.algebra(c.algebra);
    for (const auto& [l, i] : c.terms) os << "term " << to_string(l) << " : " << g[i] << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// JSON rendering, same content and order as the text form.

namespace fmt_detail {

using Json = nlohmann::ordered_json;

inline Json json_ops(const GappedOperationTable& ops, const SlotNames& slots, const std::vector<std::string>& out) {
  Json entries = Json::array();
  for (const auto& e : ops.canonical_entries()) {
    const auto names = slots(e.signature);
    Json inputs = Json::array();
    for (std::size_t i = 0; i < e.inputs.size(); ++i) inputs.push_back((*names[i])[e.inputs[i]]);
    Json outputs = Json::array();
    for (Index o : e.outputs) outputs.push_back(out[o]);
    entries.push_back(Json{{"level", to_string(e.level)},
                           {"arity", Json::array({e.signature.left, e.signature.right})},
                           {"inputs", std::move(inputs)},
                           {"outputs", std::move(outputs)}});
  }
  return entries;
}

inline Json json_ref(const AlgebraRef& r) { return Json{{"name", r.name}, {"opposite", r.opposite}}; }

inline Json json_terms(const std::set<TermEntry>& terms, const std::vector<std::string>& g) {
  Json out = Json::array();
  for (const auto& [l, i] : terms) out.push_back(Json{{"level", to_string(l)}, {"generator", g[i]}});
  return out;
}

}  // namespace fmt_detail

inline nlohmann::ordered_json to_json(const Document& doc) {
  using namespace fmt_detail;
  const Names names{doc};
  Json j;
  j["format_version"] = doc.version;
  Json monoid = Json::array();
  for (const auto& g : doc.monoid) monoid.push_back(to_string(g));
  j["monoid"] = std::move(monoid);
  j["cutoff"] = doc.cutoff ? Json(to_string(*doc.cutoff)) : Json(nullptr);

  Json bases = Json::array();
  for (const auto& [name, b] : doc.bases) {
    Json e{{"name", name}, {"generators", b.generators}};
    if (b.degrees) {
      e["degrees"] = *b.degrees;
      e["modulus"] = b.modulus;
    }
    bases.push_back(std::move(e));
  }
  j["bases"] = std::move(bases);

  Json algebras = Json::array();
  for (const auto& [name, a] : doc.algebras) {
    const auto* c = &names.basis(a.basis);
    algebras.push_back(Json{{"name", name},
                            {"basis", a.basis},
                            {"entries", json_ops(a.ops, [&](Signature s) { return layout_names(nullptr, s.left, c); }, *c)}});
  }
  j["algebras"] = std::move(algebras);

  Json modules = Json::array();
  for (const auto& [name, m] : doc.modules) {
    const auto* d = &names.basis(m.basis);
    const auto* c = &names.algebra(m.algebra);
    modules.push_back(Json{{"name", name},
                           {"basis", m.basis},
                           {"algebra", json_ref(m.algebra)},
                           {"entries", json_ops(m.ops, [&](Signature s) { return layout_names(d, s.left, c); }, *d)}});
  }
  j["modules"] = std::move(modules);

  Json bimodules = Json::array();
  for (const auto& [name, b] : doc.bimodules) {
    const auto* p = &names.basis(b.basis);
    const auto* l = &names.algebra(b.left);
    const auto* r = &names.algebra(b.right);
    bimodules.push_back(Json{{"name", name},
                             {"basis", b.basis},
                             {"left", json_ref(b.left)},
                             {"right", json_ref(b.right)},
                             {"entries", json_ops(
                                             b.ops,
                                             [&](Signature s) {
                                               auto out = layout_names(nullptr, s.left, l);
                                               out.push_back(p);
                                               out.insert(out.end(), static_cast<std::size_t>(s.right), r);
                                               return out;
                                             },
                                             *p)}});
  }
  j["bimodules"] = std::move(bimodules);

  Json homs = Json::array();
  for (const auto& [name, h] : doc.homomorphisms) {
    const auto& src = doc.modules.at(h.source);
    const auto* d = &names.basis(src.basis);
    const auto* c = &names.algebra(src.algebra);
    homs.push_back(Json{{"name", name},
                        {"source", h.source},
                        {"target", h.target},
                        {"entries", json_ops(h.ops, [&](Signature s) { return layout_names(d, s.left, c); },
                                             names.basis(doc.modules.at(h.target).basis))}});
  }
  j["homomorphisms"] = std::move(homs);

  Json floers = Json::array();
  for (const auto& [name, f] : doc.floers) {
    const auto& g = names.basis(f.basis);
    Json weights = Json::array();
    for (const auto& [e, from, to] : f.weights) {
      weights.push_back(Json{{"energy", to_string(e)}, {"from", g[from]}, {"to", g[to]}});
    }
    floers.push_back(Json{{"name", name}, {"basis", f.basis}, {"weights", std::move(weights)}});
  }
  j["floers"] = std::move(floers);

  Json gluings = Json::array();
  for (const auto& [name, g] : doc.gluings) {
    const auto& p = doc.bimodules.at(g.pair);
    const auto* d1 = &names.basis(doc.modules.at(g.module1).basis);
    const auto* d2 = &names.basis(doc.modules.at(g.module2).basis);
    const auto* pb = &names.basis(p.basis);
    const auto* c1 = &names.algebra(p.left);
    const auto* c2 = &names.algebra(p.right);
    gluings.push_back(Json{{"name", name},
                           {"module1", g.module1},
                           {"pair", g.pair},
                           {"module2", g.module2},
                           {"floer", g.floer},
                           {"entries", json_ops(
                                           g.ops,
                                           [&](Signature s) {
                                             auto out = layout_names(d1, s.left, c1);
                                             out.push_back(pb);
                                             out.push_back(d2);
                                             out.insert(out.end(), static_cast<std::size_t>(s.right), c2);
                                             return out;
                                           },
                                           names.basis(doc.floers.at(g.floer).basis))}});
  }
  j["gluings"] = std::move(gluings);

  Json cyclics = Json::array();
  for (const auto& [name, c] : doc.cyclics) {
    cyclics.push_back(Json{{"name", name},
                           {"module", c.module},
                           {"terms", json_terms(c.terms, names.basis(doc.modules.at(c.module).basis))}});
  }
  j["cyclics"] = std::move(cyclics);

  Json cochains = Json::array();
  for (const auto& [name, c] : doc.cochains) {
    cochains.push_back(Json{{"name", name},
                            {"algebra", json_ref(c.algebra)},
                            {"terms", json_terms(c.terms, names.algebra(c.algebra))}});
  }
  j["cochains"] = std::move(cochains);
  return j;
}

// ---------------------------------------------------------------------------
// Declaring existing structures. References are by section name and are only
// resolved by checked().

inline Document new_document(const TruncationPtr& ring) {
  Document doc;
  doc.monoid = ring->monoid().generators();
  doc.cutoff = ring->cutoff();
  doc.ring = ring;
  return doc;
}

/// Adds a basis under its own name; an identical redeclaration is a no-op.
inline void declare_basis(Document& doc, const Basis& b) {
  BasisDecl d{b.generators(), std::nullopt, 0};
  if (b.graded()) {
    d.degrees = b.degrees();
    d.modulus = b.modulus();
  }
  auto [it, inserted] = doc.bases.emplace(b.name(), d);
  if (!inserted && !(it->second == d)) throw ValidationError("basis " + b.name() + " declared twice with different data");
}

inline void declare_algebra(Document& doc, const std::string& name, const FilteredAlgebra& a) {
  declare_basis(doc, *a.basis());
  doc.algebras.insert_or_assign(name, AlgebraDecl{a.basis()->name(), a.ops()});
}

inline void declare_module(Document& doc, const std::string& name, const FilteredRightModule& m,
                           const AlgebraRef& algebra) {
  declare_basis(doc, *m.basis());
  doc.modules.insert_or_assign(name, ModuleDecl{m.basis()->name(), algebra, m.ops()});
}

inline void declare_bimodule(Document& doc, const std::string& name, const FilteredBimodule& b, const AlgebraRef& left,
                             const AlgebraRef& right) {
  declare_basis(doc, *b.basis());
  doc.bimodules.insert_or_assign(name, BimoduleDecl{b.basis()->name(), left, right, b.ops()});
}

inline void declare_homomorphism(Document& doc, const std::string& name, const AInftyHomomorphism& f,
                                 const std::string& source, const std::string& target) {
  doc.homomorphisms.insert_or_assign(name, HomomorphismDecl{source, target, f.ops()});
}

/// Counts are reduced mod 2 per (energy, from, to).
inline void declare_floer(Document& doc, const std::string& name, const FloerComplexData& f) {
  declare_basis(doc, *f.basis());
  FloerDecl d{f.basis()->name(), {}};
  for (const auto& [pair, list] : f.weights()) {
    for (const auto& w : list) {
      if (w.count % 2 == 0) continue;
      const WeightEntry e{w.energy, pair.first, pair.second};
      if (!d.weights.insert(e).second) d.weights.erase(e);
    }
  }
  doc.floers.insert_or_assign(name, std::move(d));
}

inline void declare_gluing(Document& doc, const std::string& name, const GluingTensor& g, const std::string& module1,
                           const std::string& pair, const std::string& module2, const std::string& floer) {
  doc.gluings.insert_or_assign(name, GluingDecl{module1, pair, module2, floer, g.ops()});
}

inline std::set<TermEntry> element_terms(const Element& e) {
  std::set<TermEntry> out;
  for (Index g = 0; g < e.size(); ++g) {
    for (const auto& t : e[g].terms()) out.insert({t.first, g});
  }
  return out;
}

inline void declare_cyclic(Document& doc, const std::string& name, const std::string& module, const Element& one) {
  doc.cyclics.insert_or_assign(name, CyclicDecl{module, element_terms(one)});
}

inline void declare_cochain(Document& doc, const std::string& name, const AlgebraRef& algebra, const Element& b) {
  doc.cochains.insert_or_assign(name, CochainDecl{algebra, element_terms(b)});
}

/// Round-trips through the text form, so every reference and level is
/// validated exactly as for a parsed file; throws ValidationError with the
/// diagnostic otherwise.
inline Document checked(const Document& doc) {
  auto r = parse_document(serialize(doc));
  if (!r.ok()) throw ValidationError("invalid document: " + r.diagnostic->render());
  return std::move(*r.document);
}

}  // namespace ainf
