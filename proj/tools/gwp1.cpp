// gwp1: command-line front end for the tau-function, basis vector, GW table and
// numeric integral computations, and the verification suites.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gwp1/verify.hpp"

#ifndef GWP1_VERSION
#define GWP1_VERSION "unknown"
#endif

using namespace gwp1;

namespace {

struct RunConfig {
  int t_cap = 4;
  int q_cap = 3;
  int s_cap = 0;  // > 0 selects the relative theory
  int order = 10;
  int k = 1;
  int k_max = 6;
  std::string n = "formal";
  int miwa = 0;
  int n_min = -2;
  int n_max = 2;
  int charge_diff = 2;
  int g_max = 2;
  int d_max = 3;
  std::vector<std::string> lambda;
  std::string q = "0";
  int digits = matint::default_digits();
  int trials = 10;
  std::uint64_t seed = 1;
  std::string format = "csv";
  std::string output;
};

std::optional<int> integer_charge(const std::string& n) {
  if (n == "formal") return std::nullopt;
  std::size_t used = 0;
  const int v = std::stoi(n, &used);
  if (used != n.size()) throw ContractError("--n must be an integer or 'formal', got " + n);
  return v;
}

Poly charge_poly(const AlphabetPtr& a, const std::string& n) {
  const auto v = integer_charge(n);
  return v ? Poly::constant(a, *v) : Poly::variable(a, "n");
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) throw ContractError("cannot write " + cfg.output);
  out << text;
}

/// Flat key=value form of the configuration; reading it back with --config gives the same run.
std::string config_text(const RunConfig& c) {
  std::ostringstream os;
  std::string lam;
  for (std::size_t i = 0; i < c.lambda.size(); ++i) lam += (i ? "," : "") + c.lambda[i];
  os << "t-cap=" << c.t_cap << "\nq-cap=" << c.q_cap << "\ns-cap=" << c.s_cap << "\norder=" << c.order
     << "\nk=" << c.k << "\nk-max=" << c.k_max << "\nn=\"" << c.n << "\"\nmiwa=" << c.miwa << "\nn-min=" << c.n_min
     << "\nn-max=" << c.n_max << "\ncharge-diff=" << c.charge_diff << "\ng-max=" << c.g_max << "\nd-max=" << c.d_max
     << "\nlambda=\"" << lam << "\"\nq=\"" << c.q << "\"\ndigits=" << c.digits << "\ntrials=" << c.trials
     << "\nseed=" << c.seed << "\nformat=\"" << c.format << "\"\n";
  return os.str();
}

json envelope(const std::string& command, const std::string& config_text, json result) {
  return {{"version", GWP1_VERSION}, {"command", command}, {"config", config_text}, {"result", std::move(result)}};
}

json run_tau(const RunConfig& cfg) {
  if (cfg.miwa > 0) {
    auto a = miwa_alphabet(cfg.miwa, cfg.order, cfg.q_cap);
    const MiwaDeterminant d = tau_determinant(a, cfg.miwa, charge_poly(a, cfg.n));
    return {{"tau", to_json(d.tau)}, {"certified_degree", d.certified_degree}};
  }
  if (cfg.s_cap > 0) {
    auto a = relative_tau_alphabet(cfg.t_cap, cfg.s_cap);
    return {{"tau", to_json(tau_relative(a, charge_poly(a, cfg.n)))}};
  }
  auto a = stationary_alphabet(cfg.t_cap, cfg.q_cap);
  return {{"tau", to_json(tau_stationary(a, charge_poly(a, cfg.n)))}};
}

json run_phi(const RunConfig& cfg) {
  const AlphabetPtr a = cfg.s_cap > 0 ? relative_alphabet(cfg.s_cap, cfg.s_cap) : absolute_alphabet(cfg.q_cap);
  const Deformation s = cfg.s_cap > 0 ? relative_deformation(a, cfg.s_cap) : absolute_deformation(a);
  return {{"phi", to_json(phi_general(cfg.k, charge_poly(a, cfg.n), s, cfg.order))}, {"k", cfg.k}};
}

Certificate run_verify(const RunConfig& cfg, const std::string& suite) {
  if (suite == "ks") return cfg.s_cap > 0 ? verify_ks(cfg.k_max, cfg.order, 0, cfg.s_cap) : verify_ks(cfg.k_max, cfg.order, cfg.q_cap);
  if (suite == "qsc") return verify_qsc(cfg.digits);
  if (suite == "hirota") return verify_hirota(cfg.t_cap, cfg.q_cap, cfg.charge_diff);
  if (suite == "miwa") return verify_miwa(std::max(1, cfg.miwa), cfg.order, cfg.q_cap);
  if (suite == "toda") return verify_toda(std::max(1, cfg.s_cap));
  if (suite == "string") return verify_string(cfg.t_cap, std::max(cfg.q_cap, cfg.d_max), cfg.g_max, cfg.d_max);
  if (suite == "oracle") return verify_oracle(cfg.t_cap, cfg.q_cap, cfg.n_min, cfg.n_max);
  if (suite == "closed-form") return verify_closed_form(cfg.t_cap);
  if (suite == "b-expansion") return verify_b_expansion();
  if (suite == "measure") return verify_measure(cfg.seed, cfg.trials, cfg.digits);
  throw ContractError("unknown suite " + suite);
}

std::string run_gw_table(const RunConfig& cfg) {
  const GwTable t =
      connected_invariants(gw_partition_function(cfg.t_cap, std::max(cfg.q_cap, cfg.d_max))).restricted(cfg.g_max, cfg.d_max);
  if (cfg.format == "csv") return t.to_csv();
  return t.to_json().dump(1) + "\n";
}

/// Eigenvalue integral against the determinant of one-dimensional integrals.
json run_integral(const RunConfig& cfg, bool& ok) {
  using namespace matint;
  if (cfg.lambda.empty()) throw ContractError("integral needs --lambda");
  WorkingPrecision prec(cfg.digits);
  const QuadratureSpec spec{cfg.digits};
  std::vector<Real> lam;
  for (const auto& l : cfg.lambda) lam.emplace_back(l);
  const auto n = integer_charge(cfg.n);
  if (!n) throw ContractError("integral needs a numeric --n");
  const Real nn(*n), q(cfg.q);
  const EigenvalueIntegral e = eigenvalue_integral(lam, nn, q, spec);
  const Real det = lam.size() == 1 ? numeric_phi(1, nn, q, lam[0], Form::Line, spec).value : andreief_determinant(lam, nn, q, spec);
  const Real rel = abs(e.value - det) / abs(det);
  ok = rel < Real("1e-12");
  const int shown = std::min(cfg.digits, 30);
  return {{"N", lam.size()},
          {"lambda", cfg.lambda},
          {"n", *n},
          {"q", cfg.q},
          {"digits", cfg.digits},
          {"eigenvalue_integral", e.value.str(shown)},
          {"step_halving_change", e.error.str(3)},
          {"determinant_of_1d_integrals", det.str(shown)},
          {"relative_discrepancy", rel.str(3)},
          {"tolerance", "1e-12"},
          {"verdict", ok ? "PASS" : "FAIL"}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gwp1: stationary Gromov-Witten theory of P1 through tau-functions"};
  app.set_config("--config", "", "Flat key = value file; command-line flags override it");
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  bool dump_config = false;

  app.add_option("--t-cap", cfg.t_cap, "Weighted degree cap in the times")->check(CLI::PositiveNumber);
  app.add_option("--q-cap", cfg.q_cap, "Degree cap in q (or qt)")->check(CLI::NonNegativeNumber);
  app.add_option("--s-cap", cfg.s_cap, "s-weight cap; > 0 selects the relative theory")->check(CLI::NonNegativeNumber);
  app.add_option("--order", cfg.order, "z-order of basis vectors / certified degree")->check(CLI::PositiveNumber);
  app.add_option("--k", cfg.k, "Basis vector index")->check(CLI::PositiveNumber);
  app.add_option("--k-max", cfg.k_max, "Largest basis vector index in the KS suite")->check(CLI::PositiveNumber);
  app.add_option("--n", cfg.n, "Charge: an integer or 'formal'");
  app.add_flag_callback("--formal-n", [&] { cfg.n = "formal"; }, "Keep the charge formal");
  app.add_option("--miwa", cfg.miwa, "Number of Miwa eigenvalues (tau determinant)")->check(CLI::NonNegativeNumber);
  app.add_option("--n-min", cfg.n_min, "Smallest charge in the oracle suite");
  app.add_option("--n-max", cfg.n_max, "Largest charge in the oracle suite");
  app.add_option("--charge-diff", cfg.charge_diff, "Largest m - n in the Hirota suite")->check(CLI::NonNegativeNumber);
  app.add_option("--g-max", cfg.g_max, "Largest genus in GW tables")->check(CLI::NonNegativeNumber);
  app.add_option("--d-max", cfg.d_max, "Largest degree in GW tables")->check(CLI::NonNegativeNumber);
  app.add_option("--lambda", cfg.lambda, "Eigenvalues, comma separated")->delimiter(',');
  app.add_option("--q", cfg.q, "Numeric q");
  app.add_option("--digits", cfg.digits, "Working precision in decimal digits (default GWP1_DIGITS or 40)")
      ->check(CLI::Range(10, 1000));
  app.add_option("--trials", cfg.trials, "Random matrices in the measure suite")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Seed for randomized checks");
  app.add_option("--format", cfg.format, "Table format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("-o,--output", cfg.output, "Write to this file instead of stdout");
  app.add_flag("--dump-config", dump_config, "Print the effective configuration and exit");

  auto* tau = app.add_subcommand("tau", "Stationary, relative or Miwa-determinant tau-function as JSON");
  auto* phi = app.add_subcommand("phi", "Basis vector Phi_k as JSON");
  std::string suite;
  auto* verify = app.add_subcommand("verify", "Run a verification suite and write its certificate");
  verify->add_option("suite", suite, "ks, qsc, hirota, miwa, toda, string, oracle, closed-form, b-expansion, measure")
      ->required()
      ->check(CLI::IsMember({"ks", "qsc", "hirota", "miwa", "toda", "string", "oracle", "closed-form", "b-expansion",
                             "measure"}));
  auto* gw = app.add_subcommand("gw-table", "Connected stationary GW invariants as CSV or JSON");
  auto* integral = app.add_subcommand("integral", "Eigenvalue integral against the determinant of 1-D integrals");
  int N = 0;
  integral->add_option("--N", N, "Number of eigenvalues (must match --lambda)")->check(CLI::Range(1, 3));

  CLI11_PARSE(app, argc, argv);

  if (dump_config) {
    std::cout << config_text(cfg);
    return 0;
  }

  try {
    if (*tau) {
      emit(cfg, envelope("tau", config_text(cfg), run_tau(cfg)).dump(1) + "\n");
    } else if (*phi) {
      emit(cfg, envelope("phi", config_text(cfg), run_phi(cfg)).dump(1) + "\n");
    } else if (*verify) {
      const Certificate c = run_verify(cfg, suite);
      emit(cfg, envelope("verify " + suite, config_text(cfg), c.to_json()).dump(1) + "\n");
      std::cerr << c.suite << ": " << (c.passed() ? "PASS" : "FAIL") << "\n";
      return c.passed() ? 0 : 1;
    } else if (*gw) {
      emit(cfg, run_gw_table(cfg));
    } else if (*integral) {
      if (N != 0 && N != int(cfg.lambda.size())) throw ContractError("--N does not match the number of eigenvalues");
      bool ok = false;
      const json r = run_integral(cfg, ok);
      emit(cfg, envelope("integral", config_text(cfg), r).dump(1) + "\n");
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
