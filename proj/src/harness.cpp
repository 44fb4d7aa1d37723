#include "bklab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include "bklab/errors.hpp"
#include "bklab/milnor.hpp"

namespace bklab {

using nlohmann::ordered_json;

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::undecided: return "undecided";
  }
  return "?";
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"proposition", "step1_pairing", "oracle_crosscheck", "norm_argument",
                                              "bockstein"};
  return names;
}

std::size_t CheckReport::count(CheckStatus s) const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [s](const CheckRecord& r) { return r.status == s; }));
}

int CheckReport::exit_code() const {
  if (count(CheckStatus::fail) > 0) return 1;
  if (count(CheckStatus::undecided) > 0) return 2;
  return 0;
}

namespace {

constexpr std::size_t kPushingPairs = 1000;

// FNV-1a; per-check seeds must not depend on the standard library's hash.
std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

CheckStatus status_of(bool ok) { return ok ? CheckStatus::pass : CheckStatus::fail; }

struct Outcome {
  CheckStatus status = CheckStatus::fail;
  ordered_json evidence = ordered_json::object();
};

ordered_json sample_evidence(const SampleCheck& c) {
  ordered_json j;
  j["samples"] = c.samples;
  j["failures"] = c.failures;
  j["nontrivial"] = c.nontrivial;
  if (!c.witness.empty()) j["witness"] = c.witness;
  return j;
}

Outcome from_samples(const SampleCheck& c) { return {status_of(c.pass()), sample_evidence(c)}; }

std::string describe_residue(const ResidueField& k) {
  std::string s = "F_" + std::to_string(k.p());
  if (k.f() > 1) s += "^" + std::to_string(k.f());
  if (k.r() > 0) {
    s += "(";
    for (int i = 0; i < k.r(); ++i) s += (i ? "," : "") + k.variable_names()[i];
    s += ")";
  }
  return s;
}

std::string base_clause(const std::string& clause) { return clause.substr(0, clause.find('[')); }

class Runner {
 public:
  Runner(const SuiteConfig& config, CheckReport& report) : config_(config), report_(report) {}

  bool wants(int q) const { return std::find(config_.qs.begin(), config_.qs.end(), q) != config_.qs.end(); }

  std::uint64_t seed_for(const LocalField& F, const std::string& suite, const std::string& clause) const {
    return config_.seed ^ fnv1a(F.name() + "/" + suite + "/" + clause);
  }

  /// Runs one check; module errors become undecided (precision) or fail.
  void check(const LocalField& F, const std::string& suite, const std::string& clause, int q, int m,
             const std::function<Outcome()>& body) {
    CheckRecord rec;
    rec.field = F.name();
    rec.suite = suite;
    rec.clause = clause;
    rec.q = q;
    rec.m = m;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      auto out = body();
      rec.status = out.status;
      rec.evidence = std::move(out.evidence);
    } catch (const precision_error& e) {
      rec.status = CheckStatus::undecided;
      rec.evidence = {{"error", e.what()}, {"hint", "raise --precision (p-adic N) or --window (D)"}};
    } catch (const math_error& e) {
      rec.status = CheckStatus::fail;
      rec.evidence = {{"error", e.what()}};
    }
    rec.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    report_.records.push_back(std::move(rec));
  }

  void proposition(const LocalFieldPtr& field);
  void step1_pairing(const LocalFieldPtr& field);
  void oracle_crosscheck(const LocalFieldPtr& field);
  void norm_argument(const LocalFieldPtr& field);
  void bockstein(const LocalFieldPtr& field);

 private:
  std::shared_ptr<const HilbertOracle> oracle(const LocalFieldPtr& field) const {
    const int p = field->p();
    if ((p == 2 || p == 3) && zeta_p(field)) return shared_hilbert_oracle(field);
    return nullptr;
  }

  const SuiteConfig& config_;
  CheckReport& report_;
};

void Runner::proposition(const LocalFieldPtr& field) {
  const auto& F = *field;
  const std::string suite = "proposition";
  for (int q : {1, 2}) {
    if (!wants(q)) continue;
    std::optional<PropositionReport> rep;
    try {
      rep = proposition_check(field, q, seed_for(F, suite, "q" + std::to_string(q)));
    } catch (const std::exception&) {
      // Surface the error as a single record.
      check(F, suite, "proposition", q, -1, [&]() -> Outcome {
        proposition_check(field, q, seed_for(F, suite, "q" + std::to_string(q)));
        return {};
      });
      continue;
    }
    GradedTable table;
    table.field = F.name();
    table.q = q;
    table.model_dims = rep->model_dims;
    table.observed_dims = rep->observed_dims;
    table.row_status.assign(rep->model_dims.size(), CheckStatus::pass);
    for (const auto& c : rep->clauses)
      if (c.m >= 0 && !c.pass) table.row_status[static_cast<std::size_t>(c.m)] = CheckStatus::fail;
    report_.tables.push_back(table);

    // One record per clause, collecting its levels.
    std::vector<std::string> order;
    std::map<std::string, std::vector<const ClauseOutcome*>> groups;
    for (const auto& c : rep->clauses) {
      const auto name = base_clause(c.clause);
      if (!groups.count(name)) order.push_back(name);
      groups[name].push_back(&c);
    }
    for (const auto& name : order) {
      check(F, suite, name, q, -1, [&] {
        Outcome out;
        bool ok = true;
        ordered_json levels = ordered_json::array();
        for (const auto* c : groups[name]) {
          ok = ok && c->pass;
          ordered_json row;
          if (c->m >= 0) {
            row["m"] = c->m;
            row["regime"] = to_string(GradedModel(q, c->m, F.residue_ring(), F.ramification()).regime());
          }
          row["pass"] = c->pass;
          row["detail"] = c->detail;
          levels.push_back(row);
        }
        out.status = status_of(ok);
        out.evidence["levels"] = levels;
        return out;
      });
    }

    if (q == 1) {
      check(F, suite, "pth_power_sweep", q, -1, [&] {
        std::mt19937_64 rng(seed_for(F, suite, "pth_power_sweep"));
        const int first = static_cast<int>(F.eprime().floor()) + 1;
        SampleCheck c;
        ordered_json levels = ordered_json::array();
        for (int m = first; m < F.precision(); ++m) {
          std::size_t failures = 0;
          for (std::size_t i = 0; i < config_.unit_samples; ++i) {
            const auto u = random_principal_unit(field, m, rng);
            const auto root = pth_power_test(u, unit_filtration_level(u));
            ++c.samples;
            if (!root || root->pow(F.p()) != u) {
              if (c.failures == 0) c.witness = "u = " + u.to_string() + " at m = " + std::to_string(m);
              ++c.failures;
              ++failures;
            }
          }
          levels.push_back({{"m", m}, {"samples", config_.unit_samples}, {"failures", failures}});
        }
        Outcome out = from_samples(c);
        out.evidence["levels"] = levels;
        return out;
      });
    } else if (auto H = oracle(field)) {
      check(F, suite, "p_brauer_witness", q, -1, [&] {
        const auto a = p_brauer_anchor(*H);
        Outcome out;
        out.evidence["found"] = a.found;
        if (!a.found) return out;
        SymbolSum s(field, 2);
        s.add({a.a, a.b});
        const auto r = filtration_report(s);
        const bool at_top = F.eprime_integral() && a.level == F.eprime_int();
        out.evidence["witness"] = s.to_string();
        out.evidence["level"] = a.level;
        out.evidence["value"] = a.value.to_string();
        out.evidence["engine"] = r.summary();
        out.status = status_of(at_top && !a.value.is_trivial() && !r.trivial && r.level == a.level);
        return out;
      });
    }
  }
}

void Runner::step1_pairing(const LocalFieldPtr& field) {
  const auto& F = *field;
  const std::string suite = "step1_pairing";
  if (!F.eprime_integral()) return;  // the pairing needs integral m and e' - m
  const int ep = F.eprime_int();
  const auto ram = F.ramification();

  auto sweep = [&](const ResidueFieldPtr& k, int max_d) {
    Outcome out;
    bool ok = true;
    std::size_t cases = 0;
    ordered_json rows = ordered_json::array();
    for (int d = 1; d <= max_d; ++d)
      for (int m = 1; m < ep; ++m)
        for (int q = 0; q <= k->r() + 2; ++q) {
          const TruncationWindow left{d, std::min(d, 2)};
          const auto right = left.enlarged(2);
          const auto rep = pairing_rank(m, q, k, ram, left, right);
          ++cases;
          ok = ok && rep.nondegenerate();
          ordered_json row{{"D", d},           {"m", m},          {"q", q},
                           {"left_dim", rep.left_dim}, {"right_dim", rep.right_dim}, {"rank", rep.rank},
                           {"kernel_dim", rep.kernel_dim}, {"degenerate", rep.degenerate.size()}};
          if (!rep.nondegenerate()) row["witness"] = rep.degenerate.front().first.to_string();
          rows.push_back(row);
        }
    out.status = cases > 0 ? status_of(ok) : CheckStatus::fail;
    out.evidence["residue_field"] = describe_residue(*k);
    out.evidence["right_enlargement"] = 2;
    out.evidence["cases"] = rows;
    return out;
  };
  if (ep > 1) {
    check(F, suite, "pairing_nondegenerate[finite_residue]", 0, -1, [&] { return sweep(F.residue_ring(), 1); });
    check(F, suite, "pairing_nondegenerate[one_variable]", 0, -1,
          [&] { return sweep(ResidueField::make(F.p(), F.f(), 1), config_.window); });
  }
  if (auto H = oracle(field)) {
    check(F, suite, "p_brauer_anchor", 2, ep, [&] {
      const auto a = p_brauer_anchor(*H);
      Outcome out;
      out.evidence["found"] = a.found;
      if (!a.found) return out;
      out.evidence["a"] = a.a.to_string();
      out.evidence["b"] = a.b.to_string();
      out.evidence["level"] = a.level;
      out.evidence["value"] = a.value.to_string();
      bool ok = a.level == ep && !a.value.is_trivial();
      if (F.p() == 2) {
        // k_2(K) = Z/2 here, so equal values mean equal classes.
        const auto minus_one = PadicElement::from_int(field, -1);
        const auto v = H->symbol(minus_one, minus_one);
        SymbolSum diff(field, 2);
        diff.add({a.a, a.b});
        diff.add({minus_one, minus_one}, -1);
        const bool engine_equal = filtration_report(diff).trivial;
        out.evidence["minus_one_symbol"] = v.to_string();
        out.evidence["same_class_as_minus_one"] = engine_equal;
        ok = ok && engine_equal == (v == a.value);
      }
      out.status = status_of(ok);
      return out;
    });
  }
}

void Runner::oracle_crosscheck(const LocalFieldPtr& field) {
  const auto& F = *field;
  const std::string suite = "oracle_crosscheck";
  if (wants(1)) {
    check(F, suite, "degree_one_classes", 1, -1, [&] {
      const PowerClassTable table(field);
      return from_samples(degree_one_agreement(table, config_.symbol_samples, seed_for(F, suite, "degree_one_classes")));
    });
  }
  if (wants(2)) {
    if (auto H = oracle(field)) {
      check(F, suite, "pushing_identity", 2, -1, [&] {
        const auto v = validate_pushing_identity(*H, kPushingPairs, seed_for(F, suite, "pushing_identity"));
        Outcome out{status_of(v.ok()), {{"pairs", v.pairs}, {"mismatches", v.mismatches}}};
        if (!v.counterexample.empty()) out.evidence["counterexample"] = v.counterexample;
        return out;
      });
      check(F, suite, "hilbert_agreement", 2, -1, [&] {
        return from_samples(oracle_agreement(*H, config_.symbol_samples, seed_for(F, suite, "hilbert_agreement")));
      });
    } else {
      check(F, suite, "vanishing_without_zeta_p", 2, -1, [&] {
        return from_samples(
            degree_two_vanishing(field, config_.symbol_samples, seed_for(F, suite, "vanishing_without_zeta_p")));
      });
    }
  }
  check(F, suite, "lift_independence", 0, -1, [&] {
    return from_samples(lift_independence(field, config_.unit_samples, seed_for(F, suite, "lift_independence")));
  });
  check(F, suite, "prime_dependence", 0, -1, [&] {
    return from_samples(prime_dependence(field, config_.unit_samples, seed_for(F, suite, "prime_dependence")));
  });
}

void Runner::norm_argument(const LocalFieldPtr& field) {
  const auto& F = *field;
  const std::string suite = "norm_argument";
  auto run = [&](const std::string& tag, const std::function<ExtensionDatum()>& make, int q) {
    check(F, suite, "cor_res[" + tag + "]", q, -1, [&] {
      const auto ext = make();
      const auto c = cor_res_check(ext, q, config_.norm_samples, seed_for(F, suite, tag + std::to_string(q)));
      Outcome out{c.samples > 0 ? status_of(c.pass) : CheckStatus::fail, ordered_json::object()};
      out.evidence["extension"] = ext.describe();
      out.evidence["degree"] = ext.degree();
      out.evidence["samples"] = c.samples;
      if (!c.evidence.empty()) out.evidence["detail"] = c.evidence;
      return out;
    });
  };
  if (wants(1) && zeta_p(field)) {
    run("kummer_pi", [&] { return ExtensionDatum::kummer(field, PadicElement::pi(field)); }, 1);
    const PowerClassTable table(field);
    if (table.unit_dim() > 0) {
      const auto g = table.generators().front();
      run("kummer_unit", [&] {
        return ExtensionDatum::kummer(field, PadicElement::from_raw(field, unit_factor(F, g.level, g.residue), F.precision()));
      }, 1);
    }
  }
  if (F.f() != 1) return;
  for (int d : {2, 3}) {
    if (F.e() * d > Raw::kCapacity) continue;
    const auto tag = "unramified_" + std::to_string(d);
    if (wants(1)) run(tag, [&] { return ExtensionDatum::unramified(field, d); }, 1);
    if (wants(2) && F.p() == 2 && oracle(field)) run(tag, [&] { return ExtensionDatum::unramified(field, d); }, 2);
  }
}

void Runner::bockstein(const LocalFieldPtr& field) {
  const auto& F = *field;
  if (F.p() != 2 || !wants(1)) return;
  check(F, "bockstein", "bockstein_exactness", 1, -1, [&] {
    const auto b = bockstein_exactness_check(field);
    Outcome out{status_of(b.pass()), ordered_json::object()};
    out.evidence["depth"] = b.depth;
    out.evidence["order_mod4"] = b.order_mod4;
    out.evidence["order_mod2"] = b.order_mod2;
    out.evidence["kernel_of_reduction"] = b.kernel_of_reduction;
    out.evidence["image_of_squaring"] = b.image_of_squaring;
    out.evidence["kernel_of_squaring"] = b.kernel_of_squaring;
    out.evidence["reduction_surjective"] = b.reduction_surjective;
    out.evidence["middle_exact"] = b.middle_exact;
    out.evidence["first_kernel_is_minus_one"] = b.first_kernel_is_minus_one;
    out.evidence["counterexamples"] = b.counterexamples;
    return out;
  });
}

std::string fixed(double x, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << x;
  return os.str();
}

std::string clause_tag(const CheckRecord& r) {
  std::string tag = r.suite + "." + r.clause;
  if (r.q > 0) tag += " q=" + std::to_string(r.q);
  if (r.m >= 0) tag += " m=" + std::to_string(r.m);
  return tag;
}

}  // namespace

CheckReport run_suite(const SuiteConfig& config) {
  if (config.fields.empty()) throw math_error("no field descriptors given");
  if (config.suite != "all" &&
      std::find(suite_names().begin(), suite_names().end(), config.suite) == suite_names().end())
    throw math_error("unknown suite '" + config.suite + "'");
  if (config.qs.empty()) throw math_error("empty q list");
  for (int q : config.qs)
    if (q != 1 && q != 2) throw math_error("q must be 1 or 2");
  if (config.window < 1) throw math_error("window degree must be positive");
  if (config.precision && *config.precision < 1) throw math_error("precision must be positive");

  // Resolve every descriptor before any check runs.
  std::vector<LocalFieldPtr> fields;
  for (const auto& name : config.fields) {
    auto d = resolve_descriptor(name);
    if (config.precision) d.precision = *config.precision;
    fields.push_back(LocalField::make(d));
  }

  CheckReport report;
  report.config = config;
  Runner runner(config, report);
  auto selected = [&](const std::string& s) { return config.suite == "all" || config.suite == s; };
  for (const auto& field : fields) {
    if (selected("proposition")) runner.proposition(field);
    if (selected("step1_pairing")) runner.step1_pairing(field);
    if (selected("oracle_crosscheck")) runner.oracle_crosscheck(field);
    if (selected("norm_argument")) runner.norm_argument(field);
    if (selected("bockstein")) runner.bockstein(field);
  }
  return report;
}

std::string emit_report(const CheckReport& report, ReportFormat format) {
  // Fields in first-appearance order.
  std::vector<std::string> names;
  auto note = [&](const std::string& n) {
    if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
  };
  for (const auto& t : report.tables) note(t.field);
  for (const auto& r : report.records) note(r.field);

  const auto& cfg = report.config;
  if (format == ReportFormat::structured) {
    ordered_json doc;
    doc["tool"] = "bklab";
    doc["version"] = kVersion;
    doc["format_version"] = 1;
    doc["seed"] = cfg.seed;
    ordered_json c;
    c["fields"] = cfg.fields;
    c["suite"] = cfg.suite;
    c["q"] = cfg.qs;
    c["precision"] = cfg.precision ? ordered_json(*cfg.precision) : ordered_json(nullptr);
    c["window"] = cfg.window;
    c["symbol_samples"] = cfg.symbol_samples;
    c["unit_samples"] = cfg.unit_samples;
    c["norm_samples"] = cfg.norm_samples;
    doc["config"] = c;
    ordered_json fields = ordered_json::array();
    for (const auto& name : names) {
      ordered_json f;
      f["name"] = name;
      ordered_json tables = ordered_json::array();
      for (const auto& t : report.tables) {
        if (t.field != name) continue;
        ordered_json rows = ordered_json::array();
        for (std::size_t m = 0; m < t.model_dims.size(); ++m)
          rows.push_back({{"m", m},
                          {"model_dim", t.model_dims[m]},
                          {"observed_dim", t.observed_dims[m]},
                          {"status", to_string(t.row_status[m])}});
        tables.push_back({{"q", t.q}, {"rows", rows}});
      }
      f["tables"] = tables;
      ordered_json checks = ordered_json::array();
      for (const auto& r : report.records) {
        if (r.field != name) continue;
        ordered_json j;
        j["suite"] = r.suite;
        j["clause"] = r.clause;
        j["tag"] = clause_tag(r);
        j["q"] = r.q;
        if (r.m >= 0) j["m"] = r.m;
        j["status"] = to_string(r.status);
        j["evidence"] = r.evidence;
        checks.push_back(j);
      }
      f["checks"] = checks;
      fields.push_back(f);
    }
    doc["fields"] = fields;
    doc["summary"] = {{"pass", report.count(CheckStatus::pass)},
                      {"fail", report.count(CheckStatus::fail)},
                      {"undecided", report.count(CheckStatus::undecided)},
                      {"exit_code", report.exit_code()}};
    return doc.dump(2) + "\n";
  }

  std::ostringstream os;
  os << "bklab " << kVersion << "  suite=" << cfg.suite << "  seed=" << cfg.seed << "\n";
  for (const auto& name : names) {
    os << "\n== " << name << " ==\n";
    for (const auto& t : report.tables) {
      if (t.field != name) continue;
      os << "q=" << t.q << "\n";
      os << "     m  dim G_m  observed  status\n";
      for (std::size_t m = 0; m < t.model_dims.size(); ++m)
        os << std::setw(6) << m << std::setw(9) << t.model_dims[m] << std::setw(10) << t.observed_dims[m] << "  "
           << to_string(t.row_status[m]) << "\n";
    }
    for (const auto& r : report.records) {
      if (r.field != name) continue;
      std::string st = to_string(r.status);
      if (r.status != CheckStatus::pass) std::transform(st.begin(), st.end(), st.begin(), ::toupper);
      os << "  [" << st << "] " << clause_tag(r) << "  (" << fixed(r.millis, 1) << " ms)\n";
      if (r.status != CheckStatus::pass) os << "      evidence: " << r.evidence.dump() << "\n";
    }
  }
  os << "\nsummary: " << report.count(CheckStatus::pass) << " pass, " << report.count(CheckStatus::fail) << " fail, "
     << report.count(CheckStatus::undecided) << " undecided\n";
  return os.str();
}

}  // namespace bklab
