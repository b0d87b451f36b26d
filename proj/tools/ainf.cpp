#include <openssl/evp.h>

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "cli.hpp"

namespace {

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) return {};
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Filtered A-infinity structures over the truncated Novikov ring: check, solve, homology, pair"};
  app.require_subcommand(1, 1);

  ainf::cli::Options opt;
  std::string input;
  std::string format = "text";
  std::string cutoff;

  auto common = [&](CLI::App* sub) {
    sub->add_option("input", input, "Structure file (.afd)")->required();
    sub->add_option("--cutoff", cutoff, "Lower the truncation cutoff to this rational");
    sub->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "machine"}));
  };

  auto* check = app.add_subcommand("check", "Verify structure relations below the cutoff");
  common(check);
  check->add_option("--kind", opt.kind, "algebra, module, bimodule, homomorphism, floer or pairing (default: all)");
  check->add_option("--name", opt.name, "Only the structure with this name");

  auto* solve = app.add_subcommand("solve", "Solve for the bounding cochain of a cyclic element");
  common(solve);
  solve->add_option("--cyclic", opt.cyclic, "Cyclic element name (default: the only one)");
  solve->add_flag("--trace", opt.trace, "Print the level-by-level forcing trace");
  solve->add_flag("--oracle", opt.oracle, "Cross-check by exhaustive enumeration (budget: AINF_ORACLE_BUDGET)");

  auto* hom = app.add_subcommand("homology", "Free rank and torsion of a differential");
  common(hom);
  hom->add_option("--differential", opt.differential, "bare, twisted, pair or floer")
      ->required()
      ->check(CLI::IsMember({"bare", "twisted", "pair", "floer"}));
  hom->add_option("--structure", opt.name, "Module, bimodule or floer section name");
  hom->add_option("--cyclic", opt.cyclic, "Cyclic element to solve b from (twisted)");
  hom->add_option("--cochain", opt.cochain, "Cochain section to twist by (twisted)");
  hom->add_option("--b1", opt.b1, "Left cochain section (pair)");
  hom->add_option("--b2", opt.b2, "Right cochain section (pair)");

  auto* pair = app.add_subcommand("pair", "Run the full gluing pipeline and verify the homology isomorphism");
  common(pair);
  pair->add_option("--gluing", opt.name, "Gluing section name (default: the only one)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (!cutoff.empty()) opt.cutoff = cutoff;

  const std::string command = app.get_subcommands().front()->get_name();
  const auto report = ainf::cli::run(command, input, opt, sha256_hex);
  std::cout << (format == "machine" ? report.render_machine() : report.render_text());
  return report.exit_code();
}
