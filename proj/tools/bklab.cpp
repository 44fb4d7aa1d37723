// bklab: batch checks of the unit filtration on mod-p Milnor K-groups.

#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "bklab/harness.hpp"
#include "bklab/padic.hpp"

namespace {

std::string poly_string(const std::vector<long long>& c) {
  std::string s;
  for (std::size_t i = c.size(); i-- > 0;) {
    if (c[i] == 0) continue;
    const long long a = c[i] < 0 ? -c[i] : c[i];
    s += s.empty() ? (c[i] < 0 ? "-" : "") : (c[i] < 0 ? " - " : " + ");
    if (i == 0 || a != 1) s += std::to_string(a);
    if (i > 0) s += i == 1 ? "x" : "x^" + std::to_string(i);
  }
  return s;
}

int list_fields() {
  std::cout << std::left << std::setw(12) << "name" << std::setw(4) << "p" << std::setw(4) << "e" << std::setw(4) << "f"
            << std::setw(7) << "e'" << std::setw(6) << "N"
            << "eisenstein\n";
  for (const auto& d : bklab::shipped_descriptors()) {
    const auto F = bklab::LocalField::make(d);
    std::cout << std::setw(12) << d.name << std::setw(4) << d.p << std::setw(4) << F->e() << std::setw(4) << F->f()
              << std::setw(7) << F->eprime().to_string() << std::setw(6) << F->precision()
              << poly_string(d.eisenstein_poly) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact checks of the unit filtration on K_q(K)/p for local fields"};
  app.set_version_flag("--version", bklab::kVersion);
  app.require_subcommand(1);

  bklab::SuiteConfig cfg;
  std::string format = "text";
  std::optional<int> precision;
  auto* check = app.add_subcommand("check", "Run check suites over one or more fields");
  check->add_option("--field", cfg.fields, "Shipped field name or descriptor file (repeatable)")->required();
  check->add_option("--suite", cfg.suite, "Suite to run")
      ->check(CLI::IsMember([] {
        auto names = bklab::suite_names();
        names.push_back("all");
        return names;
      }()));
  check->add_option("--q", cfg.qs, "Degrees to check")->delimiter(',');
  check->add_option("--seed", cfg.seed, "Random seed");
  check->add_option("--precision", precision, "Override the working precision N");
  check->add_option("--window", cfg.window, "Largest window degree D for the pairing suite");
  check->add_option("--symbol-samples", cfg.symbol_samples, "Random symbols per cross-check");
  check->add_option("--unit-samples", cfg.unit_samples, "Units per level in the p-th power sweep");
  check->add_option("--norm-samples", cfg.norm_samples, "Samples per extension in the norm argument");
  check->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "structured"}));

  auto* fields = app.add_subcommand("fields", "Shipped field descriptors");
  fields->add_subcommand("list", "Print the descriptor menu");
  fields->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 3;
  }

  try {
    if (*fields) return list_fields();
    cfg.precision = precision;
    const auto report = bklab::run_suite(cfg);
    std::cout << bklab::emit_report(
        report, format == "structured" ? bklab::ReportFormat::structured : bklab::ReportFormat::text);
    return report.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "bklab: " << e.what() << "\n";
    return 3;
  }
}
