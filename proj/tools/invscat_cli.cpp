#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "invscat/io.hpp"
#include "invscat/pipeline.hpp"

using namespace invscat;
using io::json;

namespace {

enum Exit { ok = 0, validation = 2, solver = 3, io_failure = 4 };

struct Options {
  std::string config_file;
  std::string out_dir = ".";
  std::optional<double> x_max, h, k_max, dk, x_neg;
  std::vector<std::pair<std::string, double>> tol_overrides;
  std::optional<double> support;
  bool no_levinson_strict = false;
  // inputs
  std::string potential_file, scattering_file, f_file, kernel_file, jost_file;
};

RunConfig load_config(const Options& o) {
  RunConfig c;
  if (!o.config_file.empty()) c = io::config_from_json(io::read_json_file(o.config_file), o.config_file);
  if (o.x_max) c.x_max = *o.x_max;
  if (o.h) c.h = *o.h;
  if (o.k_max) c.k_max = *o.k_max;
  if (o.dk) c.dk = *o.dk;
  if (o.x_neg) c.x_neg = *o.x_neg;
  for (const auto& [name, v] : o.tol_overrides) {
    if (!c.tolerances.count(name)) throw ValidationError("unknown tolerance '" + name + "' (from --tol." + name + ")");
    c.tolerances[name] = v;
  }
  c.check();
  return c;
}

Potential load_potential(const std::string& path, const RunConfig& c) {
  Potential p = std::filesystem::path(path).extension() == ".csv"
                    ? io::read_potential_csv(path)
                    : io::potential_from_json(io::read_json_file(path), path);
  if (std::abs(p.grid().x_max() - c.x_max) > 1e-9 || std::abs(p.grid().step() - c.h) > 1e-9 * c.h)
    throw ValidationError(path + ": potential grid [0, " + std::to_string(p.grid().x_max()) + "] with step " +
                          std::to_string(p.grid().step()) + " does not match the configured x_max and h");
  return p;
}

std::string out_path(const Options& o, const std::string& name) {
  std::filesystem::create_directories(o.out_dir);
  return (std::filesystem::path(o.out_dir) / name).string();
}

void print_checks(const std::vector<Check>& checks) {
  for (const auto& c : checks)
    std::printf("  %-34s %-5s %.3e (limit %.3e)%s%s\n", c.name.c_str(), c.pass ? "pass" : "FAIL", c.value, c.threshold,
                c.note.empty() ? "" : "  ", c.note.c_str());
}

void print_bound_states(const std::vector<BoundPair>& bs) {
  std::printf("J = %zu\n", bs.size());
  if (bs.empty()) return;
  std::printf("  %-4s %-22s %-22s\n", "j", "k_j", "s_j");
  for (size_t j = 0; j < bs.size(); ++j) std::printf("  %-4zu %-22.15g %-22.15g\n", j + 1, bs[j].k, bs[j].s);
}

void print_inequalities(const InequalityReport& r) {
  std::printf("x0 = %.6g\n", r.x0);
  for (const auto& c : r.constants)
    std::printf("  %-62s c* = %-12.6g at x = %.4g (%ld used, %ld excluded)\n", c.name.c_str(), c.value, c.at_x,
                long(c.used), long(c.excluded));
}

int cmd_forward(const Options& o) {
  RunConfig c = load_config(o);
  Potential p = load_potential(o.potential_file, c);
  ForwardResult fr = run_forward(p, c, !o.no_levinson_strict);
  io::write_json_file(out_path(o, "jost.json"), io::to_json(fr.jost));
  io::write_json_file(out_path(o, "scattering.json"), io::to_json(fr.scattering));
  io::write_json_file(out_path(o, "validation.json"), io::to_json(fr.validation));
  print_bound_states(fr.scattering.bound_states);
  std::printf("kappa = %d (winding %.6f)%s\n", fr.validation.kappa, fr.validation.winding,
              fr.jost.zero_energy_resonance ? ", f(0) = 0" : "");
  print_checks(fr.validation.checks);
  for (const auto& w : fr.jost.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return ok;
}

int cmd_invert(const Options& o) {
  RunConfig c = load_config(o);
  ScatteringData sd = io::scattering_from_json(io::read_json_file(o.scattering_file), o.scattering_file);
  ValidationReport v = validate(sd, c.validation(!o.no_levinson_strict));
  io::write_json_file(out_path(o, "validation.json"), io::to_json(v));
  std::printf("kappa = %d (winding %.6f)\n", v.kappa, v.winding);
  print_checks(v.checks);
  if (!v.condition_A) {
    std::fprintf(stderr, "error: scattering data fails condition A\n");
    return validation;
  }
  if (!v.condition_B) {
    std::fprintf(stderr, "error: winding number %d does not match J = %zu\n", v.kappa, sd.bound_states.size());
    return validation;
  }
  InverseResult inv = run_inverse(sd, c);
  io::write_json_file(out_path(o, "F.json"), io::to_json(inv.F));
  io::write_json_file(out_path(o, "kernel.json"), io::to_json(inv.kernel));
  io::write_text_file(out_path(o, "kernel.csv"), io::kernel_csv(inv.kernel));
  io::write_json_file(out_path(o, "potential.json"), io::to_json(inv.q));
  EstimateProfile ep = merge_profiles(profile_F(inv.F), profile_A(inv.kernel));
  InequalityReport ir = check_sigma_estimates(ep, c.tol("estimates.exclusion"));
  io::write_json_file(out_path(o, "estimates.json"), io::to_json(ir));
  std::printf("Marchenko condition estimate %.3e, %ld fallback rows\n", inv.diagnostics.condition_estimate,
              long(inv.diagnostics.fallback_rows));
  print_inequalities(ir);
  return ok;
}

int cmd_roundtrip(const Options& o) {
  RunConfig c = load_config(o);
  Potential p = load_potential(o.potential_file, c);
  ForwardResult fr = run_forward(p, c, !o.no_levinson_strict);
  InverseResult inv = run_inverse(fr.scattering, c);
  RealFunction F_hat = recover_F_from_kernel(inv.kernel, 0.0, c.fixed_point());
  ScatteringData s_hat = recover_scattering(inv.F, c.recovery());

  const VectorXd& q = p.q.values;
  const VectorXd dq = q - inv.q.q.values;
  const double h = c.h;
  auto l1 = [&](const VectorXd& v) { return h * (v.cwiseAbs().sum() - 0.5 * (std::abs(v(0)) + std::abs(v(v.size() - 1)))); };
  json r;
  r["q_error_l1"] = l1(dq);
  r["q_error_l1_relative"] = l1(q) > 0 ? json(l1(dq) / l1(q)) : json(nullptr);
  r["q_error_max"] = dq.cwiseAbs().maxCoeff();
  r["F_error_max"] = (F_hat.values - inv.F.nonnegative_part().values).cwiseAbs().maxCoeff();
  r["S_error_max"] = s_hat.s_values.size() == fr.scattering.s_values.size()
                         ? json((s_hat.s_values - fr.scattering.s_values).cwiseAbs().maxCoeff())
                         : json(nullptr);
  json bs = json::array();
  for (const auto& b : s_hat.bound_states) bs.push_back({{"k", b.k}, {"s", b.s}});
  r["recovered_bound_states"] = bs;
  r["validation"] = io::to_json(fr.validation);
  if (o.support) {
    CompactSupportReport cs = check_compact_support(inv.F, *o.support, c.tol("support.tol"), c.tol("support.delta"));
    r["compact_support"] = io::to_json(cs);
  }
  io::write_json_file(out_path(o, "roundtrip.json"), r);
  io::write_json_file(out_path(o, "potential_recovered.json"), io::to_json(inv.q));

  print_bound_states(fr.scattering.bound_states);
  std::printf("kappa = %d\n", fr.validation.kappa);
  std::printf("||q - q_hat||_1 = %.6e", r["q_error_l1"].get<double>());
  if (!r["q_error_l1_relative"].is_null()) std::printf(" (relative %.6e)", r["q_error_l1_relative"].get<double>());
  std::printf("\nmax |q - q_hat| = %.6e\n", r["q_error_max"].get<double>());
  std::printf("max |F - F_hat| = %.6e\n", r["F_error_max"].get<double>());
  if (!r["S_error_max"].is_null()) std::printf("max |S - S_hat| = %.6e\n", r["S_error_max"].get<double>());
  if (o.support) {
    const json& cs = r["compact_support"];
    std::printf("compact support a = %g: %s (max |F| %.3e, limit %.3e, a_hat %.4g)\n", *o.support,
                cs["verdict"].get<std::string>().c_str(), cs["max_abs"].get<double>(), cs["threshold"].get<double>(),
                cs["a_hat"].get<double>());
  }
  return ok;
}

int cmd_verify(const Options& o) {
  RunConfig c = load_config(o);
  if (o.scattering_file.empty() && o.f_file.empty() && o.kernel_file.empty() && o.jost_file.empty())
    throw ValidationError("verify needs at least one of --scattering, --F, --kernel, --jost");
  json report;
  std::optional<FFunction> F;
  std::optional<TransformKernel> A;
  if (!o.scattering_file.empty()) {
    ScatteringData sd = io::scattering_from_json(io::read_json_file(o.scattering_file), o.scattering_file);
    ValidationReport v = validate(sd, c.validation(!o.no_levinson_strict));
    report["validation"] = io::to_json(v);
    std::printf("scattering data: kappa = %d, condition A %s, condition B %s%s\n", v.kappa,
                v.condition_A ? "pass" : "FAIL", v.condition_B ? "pass" : "FAIL",
                v.zero_energy_resonance ? " (f(0) = 0 branch)" : "");
    print_checks(v.checks);
  }
  if (!o.f_file.empty()) {
    F = io::f_from_json(io::read_json_file(o.f_file), o.f_file);
    ConditionCReport cc = check_condition_C(*F, c.condition_C());
    report["condition_C"] = io::to_json(cc);
    EstimateProfile ep = profile_F(*F);
    report["x0"] = ep.x0;
    std::printf("F: condition C %s, x0 = %.6g\n", cc.passed() ? "pass" : "FAIL", ep.x0);
    for (const auto& e : cc.entries)
      std::printf("  %-12s %-12.6g %s\n", e.name.c_str(), e.value, e.finite ? "finite" : "infinite");
    if (o.support) {
      CompactSupportReport cs = check_compact_support(*F, *o.support, c.tol("support.tol"), c.tol("support.delta"));
      report["compact_support"] = io::to_json(cs);
      std::printf("compact support a = %g: %s (a_hat %.4g)\n", *o.support, cs.pass ? "pass" : "FAIL", cs.a_hat);
    }
  }
  if (!o.kernel_file.empty()) {
    A = io::kernel_from_json(io::read_json_file(o.kernel_file), o.kernel_file);
    try {
      double x0 = kernel_contraction_threshold(*A);
      report["kernel_threshold"] = x0;
      std::printf("kernel: contraction threshold x0 = %.6g\n", x0);
    } catch (const ThresholdNotFoundError& e) {
      report["kernel_threshold"] = nullptr;
      std::printf("kernel: %s\n", e.what());
    }
  }
  if (F && A) {
    EstimateProfile ep = merge_profiles(profile_F(*F), profile_A(*A));
    InequalityReport ir = check_sigma_estimates(ep, c.tol("estimates.exclusion"));
    report["estimates"] = io::to_json(ir);
    print_inequalities(ir);
  }
  if (!o.jost_file.empty()) {
    JostData jd = io::jost_from_json(io::read_json_file(o.jost_file), o.jost_file);
    std::optional<double> Q;
    if (A) Q = 2.0 * (*A)(0, 0);
    else if (!o.potential_file.empty()) Q = total_charge(load_potential(o.potential_file, c));
    if (Q) {
      L2Report l2 = check_L2_conditions(jd, *Q, c.tol("tail.l2_exponent"), c.tol("tail.negligible"));
      report["L2"] = io::to_json(l2);
      std::printf("L2 conditions (Q = %.6g): %s\n", *Q, l2.passed() ? "pass" : "FAIL");
      for (const auto& e : l2.entries)
        std::printf("  %-22s %-12.6g exponent %.3f %s\n", e.name.c_str(), e.value, e.tail.exponent,
                    e.finite ? "finite" : "infinite");
    } else {
      std::printf("L2 conditions skipped: pass --kernel or --potential to fix the charge Q\n");
    }
  }
  io::write_json_file(out_path(o, "verify.json"), report);
  return ok;
}

int cmd_support(const Options& o) {
  RunConfig c = load_config(o);
  if (!o.support) throw ValidationError("support needs --support <a>");
  FFunction F = io::f_from_json(io::read_json_file(o.f_file), o.f_file);
  CompactSupportReport cs = check_compact_support(F, *o.support, c.tol("support.tol"), c.tol("support.delta"));
  io::write_json_file(out_path(o, "support.json"), io::to_json(cs));
  std::printf("compact support a = %g: %s\n  max |F| on [%.4g, 2X] = %.3e (limit %.3e)\n  a_hat = %.6g\n", cs.a,
              cs.pass ? "pass" : "FAIL", 2 * cs.a * (1 + cs.delta), cs.max_abs, cs.threshold, cs.a_hat);
  return ok;
}

// Pulls "--tol.<name> <v>" and "--tol.<name>=<v>" out of argv; CLI11 sees the rest.
std::vector<std::string> split_tolerances(int argc, char** argv, Options& o) {
  std::vector<std::string> rest;
  const std::string prefix = "--tol.";
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a.rfind(prefix, 0) != 0) {
      rest.push_back(a);
      continue;
    }
    std::string name = a.substr(prefix.size()), value;
    auto eq = name.find('=');
    if (eq != std::string::npos) {
      value = name.substr(eq + 1);
      name = name.substr(0, eq);
    } else {
      if (i + 1 >= argc) throw ValidationError("missing value for " + a);
      value = argv[++i];
    }
    size_t used = 0;
    double v;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) throw ValidationError("--tol." + name + ": '" + value + "' is not a number");
    o.tol_overrides.emplace_back(name, v);
  }
  return rest;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Half-line inverse scattering: q => S => F => A => q", "invscat"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", o.config_file, "JSON run configuration");
  app.add_option("--out-dir", o.out_dir, "directory for output files");
  app.add_option("--x-max", o.x_max, "right end X of the potential grid");
  app.add_option("--step", o.h, "grid step h");
  app.add_option("--k-max", o.k_max, "k-grid half width K");
  app.add_option("--dk", o.dk, "k-grid step");
  app.add_option("--x-neg", o.x_neg, "left end of the F grid");
  app.add_flag("--no-levinson-strict", o.no_levinson_strict, "report a winding-number mismatch without failing");
  app.footer("Tolerances: --tol.<name> <value>, e.g. --tol.validate.unitarity 1e-8.\n"
             "Exit codes: 0 success, 2 invalid input or data, 3 solver failure, 4 I/O failure.");

  auto* fwd = app.add_subcommand("forward", "q => A => f, S, bound states");
  fwd->add_option("potential", o.potential_file, "potential (.json or two-column .csv)")->required();

  auto* inv = app.add_subcommand("invert", "S => F => A => q");
  inv->add_option("scattering", o.scattering_file, "scattering data JSON")->required();

  auto* rt = app.add_subcommand("roundtrip", "q => S => F => A => q with the inverse sub-steps");
  rt->add_option("potential", o.potential_file, "potential (.json or two-column .csv)")->required();
  rt->add_option("--support", o.support, "support radius a for the compact-support check");

  auto* ver = app.add_subcommand("verify", "diagnostics on scattering data, F, kernel or Jost data");
  ver->add_option("--scattering", o.scattering_file, "scattering data JSON");
  ver->add_option("--F", o.f_file, "F JSON");
  ver->add_option("--kernel", o.kernel_file, "kernel JSON");
  ver->add_option("--jost", o.jost_file, "Jost data JSON");
  ver->add_option("--potential", o.potential_file, "potential, used for the charge in the L2 check");
  ver->add_option("--support", o.support, "support radius a for the compact-support check");

  auto* sup = app.add_subcommand("support", "compact-support check of F");
  sup->add_option("F", o.f_file, "F JSON")->required();
  sup->add_option("--support", o.support, "support radius a")->required();

  try {
    std::vector<std::string> rest = split_tolerances(argc, argv, o);
    std::reverse(rest.begin(), rest.end());
    app.parse(rest);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return validation;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return validation;
  }

  try {
    if (*fwd) return cmd_forward(o);
    if (*inv) return cmd_invert(o);
    if (*rt) return cmd_roundtrip(o);
    if (*ver) return cmd_verify(o);
    if (*sup) return cmd_support(o);
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return io_failure;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return io_failure;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return validation;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return validation;
  } catch (const ClassViolationError& e) {
    std::fprintf(stderr, "class violation: %s\n", e.what());
    return validation;
  } catch (const Error& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return solver;
  }
  return ok;
}
