#pragma once

// Monte Carlo experiment harness: estimator-density and error-proportion
// studies, empirical test sizes under H0 (chi2 calibration for the
// one-parameter statistics, permutation for the composite ones), and the
// joint (alpha_hat, gamma_hat) dependence study. All randomness flows from
// plan.seed through per-cell, per-replicate derived streams, so reports are
// identical for any worker count.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "g0gd/mle.hpp"
#include "g0gd/model.hpp"
#include "g0gd/perm.hpp"
#include "g0gd/rng.hpp"
#include "g0gd/stats.hpp"
#include "g0gd/threading.hpp"

namespace g0gd {

enum class ReplicationRule { Fixed, Budget };
enum class GammaRule { UnitMean, Fixed };
enum class StudyKind { Estimator, Size, Joint };

inline const char* to_string(StudyKind s) {
  switch (s) {
    case StudyKind::Estimator: return "estimator";
    case StudyKind::Size: return "size";
    case StudyKind::Joint: return "joint";
  }
  return "?";
}

struct ExperimentPlan {
  std::vector<double> alphas{-1.5};
  std::vector<double> looks_set{1.0};
  std::vector<int> sample_sizes{50};
  ReplicationRule rule = ReplicationRule::Fixed;
  long long replications = 500;  // R under Fixed, R_max under Budget
  std::uint64_t seed = 0;
  Regime regime = Regime::Both;
  std::vector<Statistic> statistics{Statistic::T1};
  GammaRule gamma_rule = GammaRule::UnitMean;
  double gamma_fixed = 1.0;
  double eta = 0.05;
  int perm = 1000;
  double box_factor = 15.0;
  unsigned threads = 0;
  std::vector<double> error_taus{0.10, 0.11, 0.12, 0.13};

  void validate() const {
    if (alphas.empty() || looks_set.empty() || sample_sizes.empty())
      throw std::domain_error("ExperimentPlan: empty grid");
    for (double a : alphas)
      if (!(a < 0.0)) throw std::domain_error("ExperimentPlan: alphas must be < 0");
    for (int n : sample_sizes)
      if (n < 3) throw std::domain_error("ExperimentPlan: sample sizes must be >= 3");
    if (replications < 1)
      throw std::domain_error("ExperimentPlan: replications must be >= 1");
    if (!(eta > 0.0 && eta < 1.0))
      throw std::domain_error("ExperimentPlan: eta must lie in (0,1)");
  }

  double gamma_for(double alpha) const {
    return gamma_rule == GammaRule::UnitMean ? unit_mean_gamma(alpha) : gamma_fixed;
  }

  // Replications for sample size n: R under Fixed, floor(R_max/n) under
  // the budget rule.
  long long planned_replications(int n) const {
    if (rule == ReplicationRule::Fixed) return replications;
    const long long r = replications / n;
    return r < 1 ? 1 : r;
  }
};

struct Histogram {
  double lo = 0.0;
  double width = 1.0;
  std::vector<long long> counts;
};

// Freedman-Diaconis bin width; collapses to one bin when the IQR vanishes.
inline Histogram make_histogram(std::vector<double> values) {
  Histogram h;
  if (values.empty()) return h;
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  const auto quant = [&](double q) {
    const double pos = q * static_cast<double>(n - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return i + 1 < n ? values[i] * (1.0 - frac) + values[i + 1] * frac : values[i];
  };
  const double iqr = quant(0.75) - quant(0.25);
  const double span = values.back() - values.front();
  h.lo = values.front();
  if (iqr <= 0.0 || span <= 0.0) {
    h.width = span > 0.0 ? span : 1.0;
    h.counts.assign(1, static_cast<long long>(n));
    return h;
  }
  h.width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
  auto bins = static_cast<std::size_t>(std::ceil(span / h.width));
  bins = std::clamp<std::size_t>(bins, 1, 10000);
  h.width = span / static_cast<double>(bins);
  h.counts.assign(bins, 0);
  for (double v : values) {
    auto i = static_cast<std::size_t>((v - h.lo) / h.width);
    if (i >= bins) i = bins - 1;
    ++h.counts[i];
  }
  return h;
}

struct Histogram2D {
  double xlo = 0.0, xwidth = 1.0;
  double ylo = 0.0, ywidth = 1.0;
  std::size_t nx = 0, ny = 0;
  std::vector<long long> counts;  // row-major, y outer
};

inline Histogram2D make_histogram2d(const std::vector<double>& xs,
                                    const std::vector<double>& ys,
                                    std::size_t bins = 40) {
  Histogram2D h;
  if (xs.empty() || xs.size() != ys.size()) return h;
  const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
  const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
  h.nx = h.ny = bins;
  h.xlo = *xmin;
  h.ylo = *ymin;
  h.xwidth = (*xmax - *xmin) > 0 ? (*xmax - *xmin) / static_cast<double>(bins) : 1.0;
  h.ywidth = (*ymax - *ymin) > 0 ? (*ymax - *ymin) / static_cast<double>(bins) : 1.0;
  h.counts.assign(bins * bins, 0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    auto ix = static_cast<std::size_t>((xs[i] - h.xlo) / h.xwidth);
    auto iy = static_cast<std::size_t>((ys[i] - h.ylo) / h.ywidth);
    if (ix >= bins) ix = bins - 1;
    if (iy >= bins) iy = bins - 1;
    ++h.counts[iy * bins + ix];
  }
  return h;
}

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  return i + 1 < sorted.size()
             ? sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
             : sorted[i];
}

inline double pearson_correlation(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  if (x.size() != y.size() || x.size() < 2)
    return std::numeric_limits<double>::quiet_NaN();
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return sxy / std::sqrt(sxx * syy);
}

// Summary of one parameter's estimates within a cell.
struct EstimatorSummary {
  std::string parameter;  // "alpha" or "gamma"
  double truth = 0.0;
  long long count = 0;
  double mean = 0.0;
  double median = 0.0;
  double iqr = 0.0;
  Histogram histogram;
  std::vector<double> error_taus;         // thresholds from the plan
  std::vector<double> error_proportions;  // P(|est - truth| > tau) per tau
};

struct StatSummary {
  Statistic statistic = Statistic::T1;
  Calibration calibration = Calibration::Chi2Asymptotic;
  long long effective = 0;   // replicates entering the rate
  long long rejections = 0;
  double empirical_size = 0.0;  // H0 rejection rate (a.k.a. false negative rate)
  std::array<double, 5> quantiles{};  // 5%, 25%, 50%, 75%, 95%
};

struct CellReport {
  double alpha = 0.0;
  double gamma = 0.0;
  double looks = 1.0;
  int n = 0;
  long long planned = 0;
  long long feasible = 0;
  long long infeasible = 0;
  long long failed = 0;
  std::vector<EstimatorSummary> estimators;
  std::vector<StatSummary> stats;
  double corr_alpha_gamma = std::numeric_limits<double>::quiet_NaN();
  double corr_cross_control = std::numeric_limits<double>::quiet_NaN();
  double corr_talpha_tgamma = std::numeric_limits<double>::quiet_NaN();
  Histogram2D joint_estimates;
  Histogram2D joint_stats;
};

struct ExperimentReport {
  StudyKind study = StudyKind::Estimator;
  std::uint64_t seed = 0;
  std::vector<CellReport> cells;
};

namespace detail {

struct CellGrid {
  double alpha, gamma, looks;
  int n;
  std::uint64_t seed;
};

inline std::vector<CellGrid> grid_of(const ExperimentPlan& plan) {
  std::vector<CellGrid> cells;
  std::uint64_t index = 0;
  for (double alpha : plan.alphas)
    for (double looks : plan.looks_set)
      for (int n : plan.sample_sizes)
        cells.push_back({alpha, plan.gamma_for(alpha), looks, n,
                         derive_seed(plan.seed, index++)});
  return cells;
}

inline EstimatorSummary summarize_estimates(const std::string& name, double truth,
                                            std::vector<double> estimates,
                                            const std::vector<double>& taus) {
  EstimatorSummary s;
  s.parameter = name;
  s.truth = truth;
  s.error_taus = taus;
  s.count = static_cast<long long>(estimates.size());
  if (estimates.empty()) return s;
  s.mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) /
           static_cast<double>(estimates.size());
  for (double tau : taus) {
    long long over = 0;
    for (double e : estimates)
      if (std::fabs(e - truth) > tau) ++over;
    s.error_proportions.push_back(static_cast<double>(over) /
                                  static_cast<double>(estimates.size()));
  }
  std::sort(estimates.begin(), estimates.end());
  s.median = quantile_sorted(estimates, 0.5);
  s.iqr = quantile_sorted(estimates, 0.75) - quantile_sorted(estimates, 0.25);
  s.histogram = make_histogram(std::move(estimates));
  return s;
}

}  // namespace detail

// Estimator study: per cell, R independent pairs of H0 samples are drawn and
// fitted; estimates from both members feed the density summaries and the
// error-proportion table P(|est - truth| > tau).
inline ExperimentReport run_estimator_study(const ExperimentPlan& plan) {
  plan.validate();
  ExperimentReport report;
  report.study = StudyKind::Estimator;
  report.seed = plan.seed;
  for (const auto& cell : detail::grid_of(plan)) {
    const G0Params truth{cell.alpha, cell.gamma, cell.looks};
    const long long R = plan.planned_replications(cell.n);
    FitOptions fopt;
    fopt.box = FeasibilityBox::around_truth(truth, plan.box_factor);

    struct Member {
      double alpha = 0, gamma = 0;
      char feasible = 0, infeasible = 0, failed = 0;
    };
    struct Slot {
      Member member[2];
    };
    std::vector<Slot> slots(static_cast<std::size_t>(R));
    parallel_for(static_cast<std::size_t>(R), plan.threads, [&](std::size_t k) {
      const std::uint64_t rep_seed = derive_seed(cell.seed, k);
      for (int member = 0; member < 2; ++member) {
        Member& rec = slots[k].member[member];
        const Sample z = sample(truth, static_cast<std::size_t>(cell.n),
                                derive_seed(rep_seed, member));
        std::optional<double> known;
        if (plan.regime == Regime::AlphaOnly) known = truth.gamma;
        if (plan.regime == Regime::GammaOnly) known = truth.alpha;
        try {
          const FitResult f = fit(z, cell.looks, plan.regime, known, fopt);
          if (!f.converged) {
            rec.failed = 1;
          } else if (!f.feasible) {
            rec.infeasible = 1;
          } else {
            rec.feasible = 1;
            rec.alpha = f.params_hat.alpha;
            rec.gamma = f.params_hat.gamma;
          }
        } catch (const numerical_error&) {
          rec.failed = 1;
        }
      }
    });

    CellReport cr;
    cr.alpha = cell.alpha;
    cr.gamma = cell.gamma;
    cr.looks = cell.looks;
    cr.n = cell.n;
    cr.planned = 2 * R;  // two fits per replication
    std::vector<double> alpha_est, gamma_est;
    for (const auto& slot : slots) {
      for (const auto& rec : slot.member) {
        cr.feasible += rec.feasible;
        cr.infeasible += rec.infeasible;
        cr.failed += rec.failed;
        if (rec.feasible) {
          alpha_est.push_back(rec.alpha);
          gamma_est.push_back(rec.gamma);
        }
      }
    }
    if (plan.regime != Regime::GammaOnly)
      cr.estimators.push_back(detail::summarize_estimates(
          "alpha", truth.alpha, alpha_est, plan.error_taus));
    if (plan.regime != Regime::AlphaOnly)
      cr.estimators.push_back(detail::summarize_estimates(
          "gamma", truth.gamma, gamma_est, plan.error_taus));
    report.cells.push_back(std::move(cr));
  }
  return report;
}

// Empirical size study: per cell, H0 pairs run through each configured
// statistic. One-parameter statistics use the chi2(1) asymptotic p-value;
// the composite statistics are calibrated by permutation. Replicates whose
// observed fits fail or land outside the box are excluded from the rate, as
// in the reference experiments.
inline ExperimentReport run_size_study(const ExperimentPlan& plan) {
  plan.validate();
  ExperimentReport report;
  report.study = StudyKind::Size;
  report.seed = plan.seed;
  for (const auto& cell : detail::grid_of(plan)) {
    const G0Params truth{cell.alpha, cell.gamma, cell.looks};
    const long long R = plan.planned_replications(cell.n);

    CellReport cr;
    cr.alpha = cell.alpha;
    cr.gamma = cell.gamma;
    cr.looks = cell.looks;
    cr.n = cell.n;
    cr.planned = R;

    for (Statistic kind : plan.statistics) {
      const bool composite = kind == Statistic::T1 || kind == Statistic::T2 ||
                             kind == Statistic::T3;
      StatSummary ss;
      ss.statistic = kind;
      ss.calibration =
          composite ? Calibration::Permutation : Calibration::Chi2Asymptotic;

      enum : char { kOk = 0, kInfeasible = 1, kFailed = 2 };
      struct Slot {
        double value = std::numeric_limits<double>::quiet_NaN();
        char status = kFailed;
        char rejected = 0;
      };
      std::vector<Slot> slots(static_cast<std::size_t>(R));
      const std::uint64_t stat_seed =
          derive_seed(cell.seed, 0x1000 + static_cast<std::uint64_t>(kind));

      parallel_for(static_cast<std::size_t>(R), plan.threads, [&](std::size_t k) {
        const std::uint64_t rep_seed = derive_seed(stat_seed, k);
        const Sample z1 = sample(truth, static_cast<std::size_t>(cell.n),
                                 derive_seed(rep_seed, 1));
        const Sample z2 = sample(truth, static_cast<std::size_t>(cell.n),
                                 derive_seed(rep_seed, 2));
        FitOptions fopt;
        fopt.box = FeasibilityBox::around_truth(truth, plan.box_factor);
        const Regime regime = composite ? Regime::Both
                              : kind == Statistic::TAlpha ? Regime::AlphaOnly
                                                          : Regime::GammaOnly;
        std::optional<double> known;
        if (regime == Regime::AlphaOnly) known = truth.gamma;
        if (regime == Regime::GammaOnly) known = truth.alpha;
        try {
          const FitResult f1 = fit(z1, cell.looks, regime, known, fopt);
          const FitResult f2 = fit(z2, cell.looks, regime, known, fopt);
          if (!f1.converged || !f2.converged) {
            slots[k].status = kFailed;
            return;
          }
          if (!f1.feasible || !f2.feasible) {
            slots[k].status = kInfeasible;
            return;
          }
          if (composite) {
            PermutationConfig cfg;
            cfg.perm = plan.perm;
            cfg.eta = plan.eta;
            cfg.seed = derive_seed(rep_seed, 3);
            cfg.kind = kind;
            cfg.box = fopt.box;
            cfg.threads = 1;  // parallelism lives at the replicate level
            const PermutationResult pr = permutation_test(z1, z2, cell.looks, cfg);
            slots[k] = {pr.observed, kOk, static_cast<char>(pr.rejected ? 1 : 0)};
          } else {
            double value;
            if (kind == Statistic::TAlpha)
              value = t_alpha(f1, f2, cell.n, cell.n, cell.looks);
            else
              value = t_gamma(f1, f2, cell.n, cell.n, truth.alpha, cell.looks);
            const double p = p_value_chi2(value);
            slots[k] = {value, kOk, static_cast<char>(p < plan.eta ? 1 : 0)};
          }
        } catch (const numerical_error&) {
          slots[k].status = kFailed;
        }
      });

      std::vector<double> values;
      for (const auto& slot : slots) {
        if (slot.status == kInfeasible) ++cr.infeasible;
        if (slot.status == kFailed) ++cr.failed;
        if (slot.status != kOk) continue;
        values.push_back(slot.value);
        ss.rejections += slot.rejected;
      }
      ss.effective = static_cast<long long>(values.size());
      cr.feasible += ss.effective;
      ss.empirical_size =
          ss.effective > 0
              ? static_cast<double>(ss.rejections) / static_cast<double>(ss.effective)
              : std::numeric_limits<double>::quiet_NaN();
      std::sort(values.begin(), values.end());
      ss.quantiles = {quantile_sorted(values, 0.05), quantile_sorted(values, 0.25),
                      quantile_sorted(values, 0.50), quantile_sorted(values, 0.75),
                      quantile_sorted(values, 0.95)};
      cr.stats.push_back(ss);
    }
    cr.planned = R * static_cast<long long>(plan.statistics.size());
    report.cells.push_back(std::move(cr));
  }
  return report;
}

// Joint dependence study: correlation of (alpha_hat, gamma_hat) within
// fits, the independent-members cross-correlation control, and the
// correlation of (T_alpha, T_gamma) over H0 pairs; plus 2-D histogram grids
// for contour plots.
inline ExperimentReport run_joint_dependence_study(const ExperimentPlan& plan) {
  plan.validate();
  ExperimentReport report;
  report.study = StudyKind::Joint;
  report.seed = plan.seed;
  for (const auto& cell : detail::grid_of(plan)) {
    const G0Params truth{cell.alpha, cell.gamma, cell.looks};
    const long long R = plan.planned_replications(cell.n);
    FitOptions fopt;
    fopt.box = FeasibilityBox::around_truth(truth, plan.box_factor);

    enum : char { kOk = 0, kInfeasible = 1, kFailed = 2 };
    struct Slot {
      double a1 = 0, g1 = 0, a2 = 0, g2 = 0, ta = 0, tg = 0;
      char status = kFailed;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(R));
    parallel_for(static_cast<std::size_t>(R), plan.threads, [&](std::size_t k) {
      const std::uint64_t rep_seed = derive_seed(cell.seed, k);
      const Sample z1 = sample(truth, static_cast<std::size_t>(cell.n),
                               derive_seed(rep_seed, 1));
      const Sample z2 = sample(truth, static_cast<std::size_t>(cell.n),
                               derive_seed(rep_seed, 2));
      try {
        const FitResult f1 = fit(z1, cell.looks, Regime::Both, std::nullopt, fopt);
        const FitResult f2 = fit(z2, cell.looks, Regime::Both, std::nullopt, fopt);
        if (!f1.converged || !f2.converged) return;
        if (!f1.feasible || !f2.feasible) {
          slots[k].status = kInfeasible;
          return;
        }
        const double ta = t_alpha(f1, f2, cell.n, cell.n, cell.looks);
        const double am = 0.5 * (f1.params_hat.alpha + f2.params_hat.alpha);
        const double tg = t_gamma(f1, f2, cell.n, cell.n, am, cell.looks);
        slots[k] = {f1.params_hat.alpha, f1.params_hat.gamma, f2.params_hat.alpha,
                    f2.params_hat.gamma, ta, tg, kOk};
      } catch (const numerical_error&) {
      }
    });

    CellReport cr;
    cr.alpha = cell.alpha;
    cr.gamma = cell.gamma;
    cr.looks = cell.looks;
    cr.n = cell.n;
    cr.planned = R;
    std::vector<double> alphas, gammas, cross_gammas, first_alphas, tas, tgs;
    for (const auto& slot : slots) {
      if (slot.status == kInfeasible) ++cr.infeasible;
      if (slot.status == kFailed) ++cr.failed;
      if (slot.status != kOk) continue;
      ++cr.feasible;
      alphas.push_back(slot.a1);
      gammas.push_back(slot.g1);
      alphas.push_back(slot.a2);
      gammas.push_back(slot.g2);
      first_alphas.push_back(slot.a1);
      cross_gammas.push_back(slot.g2);  // alpha of member 1 vs gamma of member 2
      tas.push_back(slot.ta);
      tgs.push_back(slot.tg);
    }
    cr.corr_alpha_gamma = pearson_correlation(alphas, gammas);
    cr.corr_cross_control = pearson_correlation(first_alphas, cross_gammas);
    cr.corr_talpha_tgamma = pearson_correlation(tas, tgs);
    cr.joint_estimates = make_histogram2d(alphas, gammas);
    cr.joint_stats = make_histogram2d(tas, tgs);
    report.cells.push_back(std::move(cr));
  }
  return report;
}

inline ExperimentReport run_study(StudyKind study, const ExperimentPlan& plan) {
  switch (study) {
    case StudyKind::Estimator: return run_estimator_study(plan);
    case StudyKind::Size: return run_size_study(plan);
    case StudyKind::Joint: return run_joint_dependence_study(plan);
  }
  throw std::domain_error("run_study: unknown study kind");
}

}  // namespace g0gd

#include "g0gd/io.hpp"

namespace g0gd {

namespace detail {

inline std::string cell_tag(const CellReport& c) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "a%g_L%g_n%d", c.alpha, c.looks, c.n);
  std::string s = buf;
  for (auto& ch : s)
    if (ch == '.') ch = 'p';
  return s;
}

inline std::string csv_of_histogram(const Histogram& h) {
  std::string out = "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out += io::format_double(h.lo + static_cast<double>(i) * h.width);
    out += ',';
    out += io::format_double(h.lo + static_cast<double>(i + 1) * h.width);
    out += ',';
    out += std::to_string(h.counts[i]);
    out += '\n';
  }
  return out;
}

inline std::string csv_of_histogram2d(const Histogram2D& h) {
  std::string out = "x_lo,x_hi,y_lo,y_hi,count\n";
  for (std::size_t iy = 0; iy < h.ny; ++iy)
    for (std::size_t ix = 0; ix < h.nx; ++ix) {
      out += io::format_double(h.xlo + static_cast<double>(ix) * h.xwidth);
      out += ',';
      out += io::format_double(h.xlo + static_cast<double>(ix + 1) * h.xwidth);
      out += ',';
      out += io::format_double(h.ylo + static_cast<double>(iy) * h.ywidth);
      out += ',';
      out += io::format_double(h.ylo + static_cast<double>(iy + 1) * h.ywidth);
      out += ',';
      out += std::to_string(h.counts[iy * h.nx + ix]);
      out += '\n';
    }
  return out;
}

}  // namespace detail

// Writes the report as a directory of plot-ready CSV tables plus a manifest
// describing the run. Returns the list of files written.
inline std::vector<std::filesystem::path> write_report(
    const ExperimentReport& report, const std::filesystem::path& dir,
    const std::string& command_line = "") {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<fs::path> files;
  const auto emit = [&](const fs::path& name, const std::string& content) {
    const fs::path p = dir / name;
    io::write_text_atomic(p, content);
    files.push_back(p);
  };

  {
    std::string csv =
        "alpha,gamma,looks,n,planned,feasible,infeasible,failed\n";
    for (const auto& c : report.cells) {
      csv += io::format_double(c.alpha) + ',' + io::format_double(c.gamma) + ',' +
             io::format_double(c.looks) + ',' + std::to_string(c.n) + ',' +
             std::to_string(c.planned) + ',' + std::to_string(c.feasible) + ',' +
             std::to_string(c.infeasible) + ',' + std::to_string(c.failed) + '\n';
    }
    emit("cells.csv", csv);
  }

  if (report.study == StudyKind::Estimator) {
    std::string summary =
        "alpha,gamma,looks,n,parameter,truth,count,mean,median,iqr\n";
    std::string errors = "alpha,gamma,looks,n,parameter,tau,proportion\n";
    for (const auto& c : report.cells) {
      const std::string head = io::format_double(c.alpha) + ',' +
                               io::format_double(c.gamma) + ',' +
                               io::format_double(c.looks) + ',' +
                               std::to_string(c.n) + ',';
      for (const auto& e : c.estimators) {
        summary += head + e.parameter + ',' + io::format_double(e.truth) + ',' +
                   std::to_string(e.count) + ',' + io::format_double(e.mean) +
                   ',' + io::format_double(e.median) + ',' +
                   io::format_double(e.iqr) + '\n';
        for (std::size_t t = 0; t < e.error_proportions.size(); ++t) {
          errors += head + e.parameter + ',' +
                    io::format_double(e.error_taus[t]) + ',' +
                    io::format_double(e.error_proportions[t]) + '\n';
        }
        emit("hist_" + e.parameter + "_" + detail::cell_tag(c) + ".csv",
             detail::csv_of_histogram(e.histogram));
      }
    }
    emit("estimator_summary.csv", summary);
    emit("error_proportions.csv", errors);
  }

  if (report.study == StudyKind::Size) {
    std::string csv =
        "alpha,gamma,looks,n,statistic,calibration,effective,rejections,"
        "empirical_size,q05,q25,q50,q75,q95\n";
    for (const auto& c : report.cells) {
      for (const auto& s : c.stats) {
        csv += io::format_double(c.alpha) + ',' + io::format_double(c.gamma) +
               ',' + io::format_double(c.looks) + ',' + std::to_string(c.n) +
               ',' + to_string(s.statistic) + ',' + to_string(s.calibration) +
               ',' + std::to_string(s.effective) + ',' +
               std::to_string(s.rejections) + ',' +
               io::format_double(s.empirical_size);
        for (double q : s.quantiles) csv += ',' + io::format_double(q);
        csv += '\n';
      }
    }
    emit("rejection_rates.csv", csv);
  }

  if (report.study == StudyKind::Joint) {
    std::string csv =
        "alpha,gamma,looks,n,feasible,corr_alpha_gamma,corr_cross_control,"
        "corr_talpha_tgamma\n";
    for (const auto& c : report.cells) {
      csv += io::format_double(c.alpha) + ',' + io::format_double(c.gamma) + ',' +
             io::format_double(c.looks) + ',' + std::to_string(c.n) + ',' +
             std::to_string(c.feasible) + ',' +
             io::format_double(c.corr_alpha_gamma) + ',' +
             io::format_double(c.corr_cross_control) + ',' +
             io::format_double(c.corr_talpha_tgamma) + '\n';
      emit("joint_estimates_" + detail::cell_tag(c) + ".csv",
           detail::csv_of_histogram2d(c.joint_estimates));
      emit("joint_stats_" + detail::cell_tag(c) + ".csv",
           detail::csv_of_histogram2d(c.joint_stats));
    }
    emit("joint_dependence.csv", csv);
  }

  io::RunManifest manifest;
  manifest.command = command_line.empty()
                         ? std::string("mc --study ") + to_string(report.study)
                         : command_line;
  manifest.seed = report.seed;
  manifest.outputs = files;
  io::write_manifest(dir / "manifest.json", manifest);
  return files;
}

}  // namespace g0gd
