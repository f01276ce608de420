#pragma once

// Unified command-line front end: sample, fit, distance, test, mc, edges.
// Exit codes: 0 success, 1 usage error, 2 numerical failure. File outputs
// are written atomically and accompanied by a run manifest.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "g0gd/edge.hpp"
#include "g0gd/errors.hpp"
#include "g0gd/geodesic.hpp"
#include "g0gd/io.hpp"
#include "g0gd/mc.hpp"
#include "g0gd/mle.hpp"
#include "g0gd/model.hpp"
#include "g0gd/perm.hpp"
#include "g0gd/stats.hpp"
#include "g0gd/version.hpp"

namespace g0gd::cli {

namespace detail {

using nlohmann::json;

inline json fit_to_json(const FitResult& f) {
  return json{{"alpha", f.params_hat.alpha}, {"gamma", f.params_hat.gamma},
              {"looks", f.params_hat.looks}, {"loglik", f.loglik},
              {"converged", f.converged},    {"feasible", f.feasible},
              {"iterations", f.iterations},  {"regime", to_string(f.regime)}};
}

inline json outcome_to_json(const TestOutcome& o) {
  return json{{"statistic", to_string(o.statistic)}, {"value", o.value},
              {"m", o.m},                            {"n", o.n},
              {"p_value", o.p_value},
              {"calibration", to_string(o.calibration)}};
}

// Single results go to stdout unless --out is given, in which case the file
// is written atomically together with a manifest naming it.
inline void deliver(const json& j, const std::string& out_path,
                    const std::string& manifest_path, const std::string& command,
                    std::uint64_t seed,
                    const std::vector<std::filesystem::path>& inputs) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  io::write_text_atomic(out_path, text);
  io::RunManifest m;
  m.command = command;
  m.seed = seed;
  m.inputs = inputs;
  m.outputs = {out_path};
  const std::string mpath =
      manifest_path.empty() ? out_path + ".manifest.json" : manifest_path;
  io::write_manifest(mpath, m);
}

inline std::string join_args(const std::vector<std::string>& args) {
  std::string s = "g0gd";
  for (const auto& a : args) {
    s += ' ';
    s += a;
  }
  return s;
}

inline std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

inline Regime regime_from_string(const std::string& s) {
  if (s == "both") return Regime::Both;
  if (s == "alpha" || s == "alpha_only") return Regime::AlphaOnly;
  if (s == "gamma" || s == "gamma_only") return Regime::GammaOnly;
  throw std::domain_error("unknown regime: " + s);
}

inline MetricAlpha metric_alpha_from_string(const std::string& s) {
  if (s == "pooled-mean") return MetricAlpha::PooledMean;
  if (s == "first") return MetricAlpha::First;
  if (s == "second") return MetricAlpha::Second;
  throw std::domain_error("unknown metric-alpha choice: " + s);
}

inline OnFitFailure on_fit_failure_from_string(const std::string& s) {
  if (s == "skip") return OnFitFailure::Skip;
  if (s == "retry") return OnFitFailure::Retry;
  if (s == "abort") return OnFitFailure::Abort;
  throw std::domain_error("unknown on-fit-failure policy: " + s);
}

}  // namespace detail

// Parses and runs one command line (program name excluded). Never throws;
// all failures map onto the exit-code contract.
inline int dispatch(const std::vector<std::string>& args) {
  using detail::json;

  CLI::App app{"geodesic-distance two-sample tests for G0 speckle data"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  bool ci_mode = false;
  unsigned threads = 0;
  app.add_flag("--ci", ci_mode, "require explicit seeds for random commands");
  app.add_option("--threads", threads,
                 "worker pool size (0 = G0GD_THREADS or hardware)");

  // ---- sample ----
  auto* c_sample = app.add_subcommand("sample", "draw i.i.d. G0 intensities");
  double s_alpha = -1.5, s_gamma = 0.0, s_looks = 1.0;
  std::uint64_t s_seed = 0;
  bool s_seed_given = false;
  std::size_t s_n = 0;
  std::string s_out, s_manifest, s_format = "csv", s_label;
  bool s_unit_mean = false;
  c_sample->add_option("--alpha", s_alpha, "texture parameter (< 0)")->required();
  c_sample->add_option("--gamma", s_gamma, "scale parameter (> 0)");
  c_sample->add_flag("--unit-mean", s_unit_mean,
                     "derive gamma = -alpha - 1 (unit mean at L = 1)");
  c_sample->add_option("--looks", s_looks, "number of looks (>= 1)");
  c_sample->add_option("--n", s_n, "sample size")->required();
  c_sample->add_option("--seed", s_seed, "RNG seed")->each([&](const std::string&) {
    s_seed_given = true;
  });
  c_sample->add_option("--out", s_out, "output file (default: stdout)");
  c_sample->add_option("--manifest", s_manifest, "manifest path override");
  c_sample->add_option("--format", s_format, "lines | csv")
      ->check(CLI::IsMember({"lines", "csv"}));
  c_sample->add_option("--label", s_label, "sample label tag");

  // ---- fit ----
  auto* c_fit = app.add_subcommand("fit", "maximum-likelihood G0 fit");
  std::string f_input, f_out, f_manifest, f_regime = "both";
  double f_looks = 1.0;
  std::optional<double> f_known_alpha, f_known_gamma, f_init_alpha, f_init_gamma;
  std::optional<double> f_alpha_lo, f_alpha_hi, f_gamma_lo, f_gamma_hi;
  c_fit->add_option("input", f_input, "sample file")->required();
  c_fit->add_option("--looks", f_looks, "number of looks (>= 1)")->required();
  c_fit->add_option("--regime", f_regime, "both | alpha | gamma")
      ->check(CLI::IsMember({"both", "alpha", "gamma", "alpha_only", "gamma_only"}));
  c_fit->add_option("--alpha-known", f_known_alpha, "fixed alpha for regime gamma");
  c_fit->add_option("--gamma-known", f_known_gamma, "fixed gamma for regime alpha");
  c_fit->add_option("--init-alpha", f_init_alpha, "starting alpha");
  c_fit->add_option("--init-gamma", f_init_gamma, "starting gamma");
  c_fit->add_option("--alpha-lo", f_alpha_lo, "feasibility box: alpha lower bound");
  c_fit->add_option("--alpha-hi", f_alpha_hi, "feasibility box: alpha upper bound");
  c_fit->add_option("--gamma-lo", f_gamma_lo, "feasibility box: gamma lower bound");
  c_fit->add_option("--gamma-hi", f_gamma_hi, "feasibility box: gamma upper bound");
  c_fit->add_option("--out", f_out, "output file (default: stdout)");
  c_fit->add_option("--manifest", f_manifest, "manifest path override");

  // ---- distance ----
  auto* c_dist = app.add_subcommand("distance",
                                    "geodesic distance between G0 models");
  std::optional<double> d_alpha1, d_alpha2, d_gamma1, d_gamma2, d_alpha;
  double d_looks = 1.0;
  c_dist->add_option("--alpha1", d_alpha1, "first texture");
  c_dist->add_option("--alpha2", d_alpha2, "second texture");
  c_dist->add_option("--gamma1", d_gamma1, "first scale");
  c_dist->add_option("--gamma2", d_gamma2, "second scale");
  c_dist->add_option("--alpha", d_alpha, "texture indexing the scale metric");
  c_dist->add_option("--looks", d_looks, "number of looks (>= 1)");

  // ---- test ----
  auto* c_test = app.add_subcommand("test", "two-sample G0 test");
  std::string t_file1, t_file2, t_stat = "T1", t_calibration, t_metric =
      "pooled-mean";
  std::string t_out, t_manifest, t_dump;
  double t_looks = 1.0, t_eta = 0.05;
  int t_perm = 1000;
  std::uint64_t t_seed = 0;
  bool t_seed_given = false;
  std::optional<double> t_known_alpha, t_known_gamma;
  std::optional<double> t_alpha_lo, t_alpha_hi, t_gamma_lo, t_gamma_hi;
  c_test->add_option("sample1", t_file1, "first sample file")->required();
  c_test->add_option("sample2", t_file2, "second sample file")->required();
  c_test->add_option("--stat", t_stat, "Talpha | Tgamma | T1 | T2 | T3")
      ->check(CLI::IsMember({"Talpha", "Tgamma", "T1", "T2", "T3"}));
  c_test->add_option("--looks", t_looks, "number of looks (>= 1)")->required();
  c_test->add_option("--calibration", t_calibration, "chi2 | permutation");
  c_test->add_option("--alpha-known", t_known_alpha, "known alpha for Tgamma");
  c_test->add_option("--gamma-known", t_known_gamma, "known gamma for Talpha");
  c_test->add_option("--perm", t_perm, "number of permutations");
  c_test->add_option("--eta", t_eta, "test level");
  c_test->add_option("--seed", t_seed, "RNG seed")->each([&](const std::string&) {
    t_seed_given = true;
  });
  c_test->add_option("--metric-alpha", t_metric, "pooled-mean | first | second")
      ->check(CLI::IsMember({"pooled-mean", "first", "second"}));
  c_test->add_option("--alpha-lo", t_alpha_lo, "feasibility box: alpha lower bound");
  c_test->add_option("--alpha-hi", t_alpha_hi, "feasibility box: alpha upper bound");
  c_test->add_option("--gamma-lo", t_gamma_lo, "feasibility box: gamma lower bound");
  c_test->add_option("--gamma-hi", t_gamma_hi, "feasibility box: gamma upper bound");
  c_test->add_option("--dump-permuted", t_dump,
                     "CSV path for the permuted statistic values");
  std::string t_on_failure = "skip";
  c_test->add_option("--on-fit-failure", t_on_failure, "skip | retry | abort")
      ->check(CLI::IsMember({"skip", "retry", "abort"}));
  c_test->add_option("--out", t_out, "output file (default: stdout)");
  c_test->add_option("--manifest", t_manifest, "manifest path override");

  // ---- mc ----
  auto* c_mc = app.add_subcommand("mc", "Monte Carlo experiment harness");
  std::string m_study, m_preset, m_plan, m_out_dir, m_gamma = "unit-mean";
  std::vector<double> m_alphas;
  std::vector<double> m_looks;
  std::vector<int> m_sizes;
  std::vector<std::string> m_stats;
  long long m_reps = 0, m_budget = 0;
  int m_perm = 0;
  double m_eta = 0.0, m_box_factor = 0.0;
  std::uint64_t m_seed = 0;
  bool m_seed_given = false;
  c_mc->add_option("--study", m_study, "estimator | size | joint")->required();
  c_mc->add_option("--out", m_out_dir, "report directory")->required();
  c_mc->add_option("--preset", m_preset, "quick | paper")
      ->check(CLI::IsMember({"quick", "paper"}));
  c_mc->add_option("--plan", m_plan, "plan JSON file");
  c_mc->add_option("--alphas", m_alphas, "texture grid")->delimiter(',');
  c_mc->add_option("--looks-set", m_looks, "looks grid")->delimiter(',');
  c_mc->add_option("--sizes", m_sizes, "sample-size grid")->delimiter(',');
  c_mc->add_option("--stats", m_stats, "statistics to run")->delimiter(',');
  c_mc->add_option("--reps", m_reps, "fixed replications per cell");
  c_mc->add_option("--budget", m_budget, "replication budget R_max (R = R_max/n)");
  c_mc->add_option("--perm", m_perm, "permutations per test");
  c_mc->add_option("--eta", m_eta, "test level");
  c_mc->add_option("--gamma", m_gamma, "'unit-mean' or a fixed scale value");
  c_mc->add_option("--box-factor", m_box_factor, "feasibility box factor");
  c_mc->add_option("--seed", m_seed, "RNG seed")->each([&](const std::string&) {
    m_seed_given = true;
  });

  // ---- edges ----
  auto* c_edges = app.add_subcommand("edges", "scan-line edge detection");
  std::string e_image, e_sidecar, e_stat = "T1", e_out, e_profiles, e_manifest;
  double e_looks = 0.0, e_eta = 0.05;
  int e_perm = 1000;
  std::uint64_t e_seed = 0;
  bool e_seed_given = false;
  bool e_raster = false;
  c_edges->add_option("--image", e_image, "PGM (P2/P5) or float32 raster")
      ->required();
  c_edges->add_flag("--raster", e_raster,
                    "input is a headerless float32 raster with JSON sidecar");
  c_edges->add_option("--sidecar", e_sidecar, "raster sidecar path");
  c_edges->add_option("--looks", e_looks, "number of looks (overrides sidecar)");
  c_edges->add_option("--stat", e_stat, "T1 | T2 | T3")
      ->check(CLI::IsMember({"T1", "T2", "T3"}));
  c_edges->add_option("--perm", e_perm, "permutations per split");
  c_edges->add_option("--eta", e_eta, "test level");
  c_edges->add_option("--seed", e_seed, "RNG seed")->each([&](const std::string&) {
    e_seed_given = true;
  });
  c_edges->add_option("--out", e_out, "edge CSV path (default: stdout)");
  c_edges->add_option("--profiles", e_profiles, "full p-profile CSV path");
  c_edges->add_option("--manifest", e_manifest, "manifest path override");

  // parse
  std::vector<char*> argv;
  std::string prog = "g0gd";
  argv.push_back(prog.data());
  std::vector<std::string> mutable_args = args;
  for (auto& a : mutable_args) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const std::string command = detail::join_args(args);
  const auto resolve_seed = [&](std::uint64_t seed, bool given) {
    if (given) return seed;
    if (ci_mode)
      throw std::domain_error("--ci: an explicit --seed is required");
    return detail::entropy_seed();
  };

  try {
    if (*c_sample) {
      G0Params p{s_alpha, s_unit_mean ? unit_mean_gamma(s_alpha) : s_gamma,
                 s_looks};
      if (!s_unit_mean && !(s_gamma > 0.0))
        throw std::domain_error("sample: provide --gamma > 0 or --unit-mean");
      if (s_n < 1) throw std::domain_error("sample: --n must be >= 1");
      const std::uint64_t seed = resolve_seed(s_seed, s_seed_given);
      Sample z = sample(p, s_n, seed);
      z.label = s_label;
      const auto fmt =
          s_format == "lines" ? io::SampleFormat::Lines : io::SampleFormat::Csv;
      if (s_out.empty()) {
        std::cout << io::to_text(z, fmt);
        return 0;
      }
      io::write_sample(s_out, z, fmt);
      io::write_sample_sidecar(s_out, p, s_n, seed);
      io::RunManifest m;
      m.command = command;
      m.seed = seed;
      m.outputs = {s_out, s_out + ".meta.json"};
      io::write_manifest(
          s_manifest.empty() ? s_out + ".manifest.json" : s_manifest, m);
      return 0;
    }

    if (*c_fit) {
      const Sample z = io::read_sample(f_input);
      const Regime regime = detail::regime_from_string(f_regime);
      std::optional<double> known;
      if (regime == Regime::AlphaOnly) {
        if (!f_known_gamma)
          throw std::domain_error("fit: regime alpha needs --gamma-known");
        known = *f_known_gamma;
      } else if (regime == Regime::GammaOnly) {
        if (!f_known_alpha)
          throw std::domain_error("fit: regime gamma needs --alpha-known");
        known = *f_known_alpha;
      }
      double mean = 0.0;
      for (double v : z.values) mean += v;
      mean /= static_cast<double>(z.values.size());
      FitOptions opt;
      opt.box = FeasibilityBox::wide(mean);
      if (f_alpha_lo) opt.box.alpha_lo = *f_alpha_lo;
      if (f_alpha_hi) opt.box.alpha_hi = *f_alpha_hi;
      if (f_gamma_lo) opt.box.gamma_lo = *f_gamma_lo;
      if (f_gamma_hi) opt.box.gamma_hi = *f_gamma_hi;
      if (f_init_alpha && f_init_gamma)
        opt.init = std::array<double, 2>{*f_init_alpha, *f_init_gamma};
      const FitResult fr = fit(z, f_looks, regime, known, opt);
      detail::deliver(detail::fit_to_json(fr), f_out, f_manifest, command, 0,
                      {f_input});
      if (!fr.converged)
        throw non_convergence_error("fit: iteration cap hit before convergence");
      return 0;
    }

    if (*c_dist) {
      json j;
      if (d_alpha1 && d_alpha2) {
        const AlphaDistance d = dist_alpha_info(*d_alpha1, *d_alpha2, d_looks);
        j["value"] = d.value;
        j["branch"] = to_string(d.branch);
        if (d.rounded_looks) j["rounded_looks"] = true;
      } else if (d_gamma1 && d_gamma2) {
        if (!d_alpha)
          throw std::domain_error(
              "distance: the scale distance needs --alpha (it indexes the metric)");
        j["value"] = dist_gamma(*d_gamma1, *d_gamma2, *d_alpha, d_looks);
        j["branch"] = to_string(DistBranch::ClosedFormGamma);
      } else {
        throw std::domain_error(
            "distance: give --alpha1/--alpha2 or --gamma1/--gamma2");
      }
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*c_test) {
      const Sample z1 = io::read_sample(t_file1);
      const Sample z2 = io::read_sample(t_file2);
      const Statistic kind = statistic_from_string(t_stat);
      const bool composite = kind == Statistic::T1 || kind == Statistic::T2 ||
                             kind == Statistic::T3;
      if (t_calibration.empty())
        t_calibration = composite ? "permutation" : "chi2";
      if (t_calibration != "chi2" && t_calibration != "permutation")
        throw std::domain_error("test: --calibration must be chi2 or permutation");
      if (composite && t_calibration == "chi2")
        throw std::domain_error(
            "test: T1/T2/T3 have no chi2 asymptotics; use permutation");

      double pooled_mean = 0.0;
      for (double v : z1.values) pooled_mean += v;
      for (double v : z2.values) pooled_mean += v;
      pooled_mean /= static_cast<double>(z1.size() + z2.size());
      FeasibilityBox box = FeasibilityBox::wide(pooled_mean);
      if (t_alpha_lo) box.alpha_lo = *t_alpha_lo;
      if (t_alpha_hi) box.alpha_hi = *t_alpha_hi;
      if (t_gamma_lo) box.gamma_lo = *t_gamma_lo;
      if (t_gamma_hi) box.gamma_hi = *t_gamma_hi;

      TestOutcome outcome;
      outcome.statistic = kind;
      outcome.m = static_cast<int>(z1.size());
      outcome.n = static_cast<int>(z2.size());
      json extra;

      if (t_calibration == "chi2") {
        FitOptions opt;
        opt.box = box;
        FitResult f1, f2;
        if (kind == Statistic::TAlpha) {
          if (!t_known_gamma)
            throw std::domain_error("test: Talpha with chi2 needs --gamma-known");
          f1 = fit(z1, t_looks, Regime::AlphaOnly, *t_known_gamma, opt);
          f2 = fit(z2, t_looks, Regime::AlphaOnly, *t_known_gamma, opt);
          outcome.value = t_alpha(f1, f2, outcome.m, outcome.n, t_looks);
        } else {
          if (!t_known_alpha)
            throw std::domain_error("test: Tgamma with chi2 needs --alpha-known");
          f1 = fit(z1, t_looks, Regime::GammaOnly, *t_known_alpha, opt);
          f2 = fit(z2, t_looks, Regime::GammaOnly, *t_known_alpha, opt);
          outcome.value =
              t_gamma(f1, f2, outcome.m, outcome.n, *t_known_alpha, t_looks);
        }
        outcome.p_value = p_value_chi2(outcome.value);
        outcome.calibration = Calibration::Chi2Asymptotic;
        extra["fit1"] = detail::fit_to_json(f1);
        extra["fit2"] = detail::fit_to_json(f2);
      } else {
        PermutationConfig cfg;
        cfg.perm = t_perm;
        cfg.eta = t_eta;
        cfg.seed = resolve_seed(t_seed, t_seed_given);
        cfg.kind = kind;
        cfg.box = box;
        cfg.metric_alpha = detail::metric_alpha_from_string(t_metric);
        cfg.known_alpha = t_known_alpha;
        cfg.known_gamma = t_known_gamma;
        cfg.on_fit_failure = detail::on_fit_failure_from_string(t_on_failure);
        cfg.threads = threads;
        const PermutationResult pr = permutation_test(z1, z2, t_looks, cfg);
        outcome.value = pr.observed;
        outcome.p_value = pr.p_value;
        outcome.calibration = Calibration::Permutation;
        extra["rejected"] = pr.rejected;
        extra["skipped"] = pr.skipped;
        extra["perm"] = cfg.perm;
        extra["eta"] = cfg.eta;
        extra["seed"] = cfg.seed;
        if (!t_dump.empty()) {
          std::string csv = "k,value\n";
          for (std::size_t i = 0; i < pr.permuted.size(); ++i)
            csv += std::to_string(i) + ',' + io::format_double(pr.permuted[i]) +
                   '\n';
          io::write_text_atomic(t_dump, csv);
        }
      }
      json j = detail::outcome_to_json(outcome);
      for (auto& [key, value] : extra.items()) j[key] = value;
      detail::deliver(j, t_out, t_manifest, command,
                      t_seed_given ? t_seed : 0, {t_file1, t_file2});
      return 0;
    }

    if (*c_mc) {
      ExperimentPlan plan;
      StudyKind study;
      if (m_study == "estimator") study = StudyKind::Estimator;
      else if (m_study == "size") study = StudyKind::Size;
      else if (m_study == "joint") study = StudyKind::Joint;
      else throw std::domain_error("mc: --study must be estimator, size or joint");

      bool plan_has_seed = false;
      if (!m_plan.empty()) {
        std::ifstream in(m_plan);
        if (!in) throw std::runtime_error("cannot open plan: " + m_plan);
        json j;
        in >> j;
        if (j.contains("alphas")) plan.alphas = j["alphas"].get<std::vector<double>>();
        if (j.contains("looks")) plan.looks_set = j["looks"].get<std::vector<double>>();
        if (j.contains("sample_sizes"))
          plan.sample_sizes = j["sample_sizes"].get<std::vector<int>>();
        if (j.contains("replications")) {
          const auto& r = j["replications"];
          plan.rule = r.at("rule").get<std::string>() == "budget"
                          ? ReplicationRule::Budget
                          : ReplicationRule::Fixed;
          plan.replications = r.at("value").get<long long>();
        }
        if (j.contains("gamma")) {
          const auto& g = j["gamma"];
          if (g.at("rule").get<std::string>() == "fixed") {
            plan.gamma_rule = GammaRule::Fixed;
            plan.gamma_fixed = g.at("value").get<double>();
          } else {
            plan.gamma_rule = GammaRule::UnitMean;
          }
        }
        if (j.contains("regime"))
          plan.regime = detail::regime_from_string(j["regime"].get<std::string>());
        if (j.contains("statistics")) {
          plan.statistics.clear();
          for (const auto& s : j["statistics"])
            plan.statistics.push_back(statistic_from_string(s.get<std::string>()));
        }
        if (j.contains("eta")) plan.eta = j["eta"].get<double>();
        if (j.contains("perm")) plan.perm = j["perm"].get<int>();
        if (j.contains("seed")) {
          plan.seed = j["seed"].get<std::uint64_t>();
          plan_has_seed = true;
        }
        if (j.contains("box_factor")) plan.box_factor = j["box_factor"].get<double>();
      } else if (!m_preset.empty()) {
        // the reference grid, at full or desk scale
        plan.alphas = {-1.5, -3.0, -4.0};
        plan.looks_set = {1.0, 2.0};
        plan.sample_sizes = {50, 150, 250, 350, 450, 550, 650, 750, 850, 950, 5000};
        plan.gamma_rule = GammaRule::UnitMean;
        plan.regime = Regime::Both;
        if (study == StudyKind::Size) {
          plan.statistics = {Statistic::T1, Statistic::T2, Statistic::T3};
          plan.rule = ReplicationRule::Fixed;
          plan.replications = m_preset == "paper" ? 500 : 100;
          plan.perm = m_preset == "paper" ? 1000 : 200;
        } else {
          plan.rule = ReplicationRule::Budget;
          plan.replications = m_preset == "paper" ? 5000000 : 50000;
        }
        if (study == StudyKind::Joint) plan.sample_sizes = {50};
      }

      if (!m_alphas.empty()) plan.alphas = m_alphas;
      if (!m_looks.empty()) plan.looks_set = m_looks;
      if (!m_sizes.empty()) plan.sample_sizes = m_sizes;
      if (!m_stats.empty()) {
        plan.statistics.clear();
        for (const auto& s : m_stats)
          plan.statistics.push_back(statistic_from_string(s));
      }
      if (m_reps > 0) {
        plan.rule = ReplicationRule::Fixed;
        plan.replications = m_reps;
      }
      if (m_budget > 0) {
        plan.rule = ReplicationRule::Budget;
        plan.replications = m_budget;
      }
      if (m_perm > 0) plan.perm = m_perm;
      if (m_eta > 0.0) plan.eta = m_eta;
      if (m_box_factor > 0.0) plan.box_factor = m_box_factor;
      if (m_gamma != "unit-mean") {
        plan.gamma_rule = GammaRule::Fixed;
        plan.gamma_fixed = std::stod(m_gamma);
      }
      if (m_seed_given)
        plan.seed = m_seed;
      else if (!plan_has_seed)
        plan.seed = resolve_seed(0, false);
      plan.threads = threads;

      const ExperimentReport report = run_study(study, plan);
      write_report(report, m_out_dir, command);
      std::cout << "report written to " << m_out_dir << " ("
                << report.cells.size() << " cells)\n";
      return 0;
    }

    if (*c_edges) {
      ImageStrip strip;
      if (e_raster) {
        strip = read_float_raster(
            e_image, e_sidecar.empty()
                         ? std::nullopt
                         : std::optional<std::filesystem::path>(e_sidecar));
      } else {
        strip = read_pgm(e_image);
      }
      if (e_looks > 0.0) strip.looks = e_looks;

      double mean = 0.0;
      std::size_t positive = 0;
      for (double v : strip.pixels)
        if (v > 0.0) {
          mean += v;
          ++positive;
        }
      if (positive == 0)
        throw degenerate_sample_error("edges: image has no positive pixels");
      mean /= static_cast<double>(positive);

      EdgeConfig cfg;
      cfg.perm_cfg.perm = e_perm;
      cfg.perm_cfg.eta = e_eta;
      cfg.perm_cfg.seed = resolve_seed(e_seed, e_seed_given);
      cfg.perm_cfg.box = FeasibilityBox::wide(mean);
      cfg.threads = threads;
      cfg.keep_profiles = !e_profiles.empty();
      const EdgeResult result =
          detect_edges(strip, statistic_from_string(e_stat), cfg);

      bool any_found = false;
      for (const auto& r : result.rows) any_found |= r.found;

      const std::string csv = edge_result_csv(result);
      if (e_out.empty()) {
        std::cout << csv;
      } else {
        io::write_text_atomic(e_out, csv);
        io::RunManifest m;
        m.command = command;
        m.seed = cfg.perm_cfg.seed;
        m.inputs = {e_image};
        m.outputs = {e_out};
        if (!e_profiles.empty()) {
          io::write_text_atomic(e_profiles, edge_profiles_csv(result));
          m.outputs.push_back(e_profiles);
        }
        io::write_manifest(
            e_manifest.empty() ? e_out + ".manifest.json" : e_manifest, m);
      }
      if (!any_found)
        throw numerical_error("edges: every split of every row failed to fit");
      return 0;
    }
  } catch (const numerical_error& e) {
    json err{{"error", {{"type", "numerical"}, {"message", e.what()}}}};
    std::cerr << err.dump(2) << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    json err{{"error", {{"type", "domain"}, {"message", e.what()}}}};
    std::cerr << err.dump(2) << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    json err{{"error", {{"type", "argument"}, {"message", e.what()}}}};
    std::cerr << err.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    json err{{"error", {{"type", "runtime"}, {"message", e.what()}}}};
    std::cerr << err.dump(2) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace g0gd::cli
