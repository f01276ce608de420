#pragma once

// Scan-line edge detection: for each image row, the transition column is the
// split point minimizing the permutation p-value of the two-parameter test
// between the left and right segments. Splits k run over [3, n-3] so both
// segments hold at least three observations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "g0gd/errors.hpp"
#include "g0gd/io.hpp"
#include "g0gd/perm.hpp"
#include "g0gd/threading.hpp"

namespace g0gd {

struct ImageStrip {
  int rows = 0;
  int cols = 0;
  std::vector<double> pixels;  // row-major intensities, >= 0
  double looks = 1.0;

  double at(int r, int c) const {
    return pixels[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                  static_cast<std::size_t>(c)];
  }

  void validate() const {
    if (rows < 1) throw std::domain_error("ImageStrip: need at least one row");
    if (cols < 7)
      throw std::domain_error("ImageStrip: need at least 7 columns so the "
                              "split range [3, n-3] is nonempty");
    if (pixels.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
      throw std::domain_error("ImageStrip: pixel buffer size mismatch");
    if (!(looks >= 1.0)) throw std::domain_error("ImageStrip: looks must be >= 1");
    for (double p : pixels)
      if (!(p >= 0.0) || !std::isfinite(p))
        throw std::domain_error("ImageStrip: pixels must be finite and >= 0");
  }
};

struct RowEdge {
  int row = 0;
  bool found = false;  // false when every split failed to fit
  // argmin_k p(k). Permutation p-values saturate at exactly 0 across a band
  // of splits on a strong edge, so ties go to the split maximizing the total
  // fitted log-likelihood (the plug-in change-point ML criterion), then to
  // the smaller k.
  int col_hat = 0;
  double min_p = 1.0;
  double best_statistic = 0.0;   // observed statistic at col_hat
  double best_split_loglik = 0;  // fitted loglik sum at col_hat
  std::vector<std::pair<int, double>> p_profile;  // (k, p(k)), k in [3, n-3]
  std::vector<std::pair<int, double>> stat_profile;  // observed T(k) diagnostics
  int failed_splits = 0;
};

struct EdgeResult {
  Statistic kind = Statistic::T1;
  std::vector<RowEdge> rows;
};

struct EdgeConfig {
  PermutationConfig perm_cfg;   // kind/seed/box/perm/eta for the per-split tests
  unsigned threads = 0;         // rows processed in parallel
  bool keep_profiles = true;
};

namespace detail {

// Eq-(1) support is z > 0: zero pixels are clipped to half the smallest
// positive value in the row.
inline std::vector<double> clipped_row(const ImageStrip& strip, int r) {
  std::vector<double> row(static_cast<std::size_t>(strip.cols));
  double min_pos = std::numeric_limits<double>::infinity();
  for (int c = 0; c < strip.cols; ++c) {
    row[static_cast<std::size_t>(c)] = strip.at(r, c);
    if (row[static_cast<std::size_t>(c)] > 0.0)
      min_pos = std::min(min_pos, row[static_cast<std::size_t>(c)]);
  }
  if (!std::isfinite(min_pos))
    throw degenerate_sample_error("edge: row " + std::to_string(r) +
                                  " has no positive pixels");
  const double floor_value = 0.5 * min_pos;
  for (auto& v : row)
    if (v <= 0.0) v = floor_value;
  return row;
}

}  // namespace detail

// Algorithm: for each row i and split k in [3, n-3], fit regime-Both MLEs on
// S1 = (z_1..z_k) and S2 = (z_{k+1}..z_n), compute the statistic and its
// permutation p-value; the detected column minimizes p(k). Splits whose
// observed fits fail get p(k) = 1 and are never selected unless all fail.
// RNG streams derive from (seed, row, k).
inline EdgeResult detect_edges(const ImageStrip& strip, Statistic kind,
                               const EdgeConfig& cfg) {
  strip.validate();
  cfg.perm_cfg.validate();
  const int n = strip.cols;
  const int k_lo = 3, k_hi = n - 3;

  EdgeResult result;
  result.kind = kind;
  result.rows.resize(static_cast<std::size_t>(strip.rows));

  parallel_for(static_cast<std::size_t>(strip.rows), cfg.threads,
               [&](std::size_t r) {
    RowEdge row_edge;
    row_edge.row = static_cast<int>(r);
    std::vector<double> row;
    try {
      row = detail::clipped_row(strip, static_cast<int>(r));
    } catch (const degenerate_sample_error&) {
      // no positive pixels: the row carries no edge information
      row_edge.failed_splits = k_hi - k_lo + 1;
      if (cfg.keep_profiles)
        for (int k = k_lo; k <= k_hi; ++k) row_edge.p_profile.emplace_back(k, 1.0);
      result.rows[r] = std::move(row_edge);
      return;
    }
    const std::uint64_t row_seed =
        derive_seed(cfg.perm_cfg.seed, static_cast<std::uint64_t>(r));

    for (int k = k_lo; k <= k_hi; ++k) {
      const std::span<const double> s1{row.data(), static_cast<std::size_t>(k)};
      const std::span<const double> s2{row.data() + k,
                                       static_cast<std::size_t>(n - k)};
      double p = 1.0;
      try {
        // the observed fits, up front: a failed split costs no permutations,
        // and their joint log-likelihood is the tie-break key
        FitOptions fopt;
        fopt.box = cfg.perm_cfg.box;
        const FitResult f1 = fit(s1, strip.looks, Regime::Both, std::nullopt, fopt);
        const FitResult f2 = fit(s2, strip.looks, Regime::Both, std::nullopt, fopt);
        if (!f1.feasible || !f2.feasible)
          throw fit_failure_error("edge: observed split fit infeasible");
        const double split_loglik = f1.loglik + f2.loglik;

        PermutationConfig pc = cfg.perm_cfg;
        pc.kind = kind;
        pc.seed = derive_seed(row_seed, static_cast<std::uint64_t>(k));
        pc.threads = 1;  // parallelism lives at the row level
        const PermutationResult pr = permutation_test(s1, s2, strip.looks, pc);
        p = pr.p_value;
        const bool better =
            !row_edge.found || p < row_edge.min_p ||
            (p == row_edge.min_p && split_loglik > row_edge.best_split_loglik);
        if (better) {
          row_edge.found = true;
          row_edge.min_p = p;
          row_edge.best_statistic = pr.observed;
          row_edge.best_split_loglik = split_loglik;
          row_edge.col_hat = k;
        }
        if (cfg.keep_profiles) row_edge.stat_profile.emplace_back(k, pr.observed);
      } catch (const numerical_error&) {
        ++row_edge.failed_splits;
      }
      if (cfg.keep_profiles) row_edge.p_profile.emplace_back(k, p);
    }
    result.rows[r] = std::move(row_edge);
  });
  return result;
}

// --- image input -----------------------------------------------------------

// Plain PGM, P2 (ASCII) or P5 (binary, maxval < 65536).
inline ImageStrip read_pgm(const std::filesystem::path& path, double looks = 1.0) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image: " + path.string());
  const auto next_token = [&in, &path]() {
    std::string tok;
    for (;;) {
      int ch = in.get();
      if (ch == std::char_traits<char>::eof())
        throw std::runtime_error("truncated PGM header: " + path.string());
      if (ch == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      if (std::isspace(ch)) {
        if (tok.empty()) continue;
        return tok;
      }
      tok += static_cast<char>(ch);
    }
  };
  const std::string magic = next_token();
  if (magic != "P2" && magic != "P5")
    throw std::runtime_error("not a plain/raw PGM (P2/P5): " + path.string());
  ImageStrip strip;
  strip.cols = std::stoi(next_token());
  strip.rows = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (maxval <= 0 || maxval >= 65536)
    throw std::runtime_error("PGM maxval out of range: " + path.string());
  strip.looks = looks;
  const std::size_t count =
      static_cast<std::size_t>(strip.rows) * static_cast<std::size_t>(strip.cols);
  strip.pixels.resize(count);
  if (magic == "P2") {
    for (auto& v : strip.pixels) v = std::stod(next_token());
  } else {
    const int bytes = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(count * static_cast<std::size_t>(bytes));
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
      throw std::runtime_error("truncated PGM data: " + path.string());
    for (std::size_t i = 0; i < count; ++i) {
      strip.pixels[i] =
          bytes == 1 ? raw[i]
                     : static_cast<double>(raw[2 * i]) * 256.0 + raw[2 * i + 1];
    }
  }
  return strip;
}

inline void write_pgm(const std::filesystem::path& path, const ImageStrip& strip,
                      int maxval = 255) {
  std::string out = "P2\n" + std::to_string(strip.cols) + " " +
                    std::to_string(strip.rows) + "\n" + std::to_string(maxval) +
                    "\n";
  for (int r = 0; r < strip.rows; ++r) {
    for (int c = 0; c < strip.cols; ++c) {
      const long v = std::lround(std::clamp(strip.at(r, c), 0.0,
                                            static_cast<double>(maxval)));
      out += std::to_string(v);
      out += c + 1 == strip.cols ? '\n' : ' ';
    }
  }
  io::write_text_atomic(path, out);
}

// Headerless little-endian float32 raster with a JSON sidecar
// {rows, cols, looks} at <path>.meta.json (or given explicitly).
inline ImageStrip read_float_raster(const std::filesystem::path& path,
                                    std::optional<std::filesystem::path> sidecar =
                                        std::nullopt) {
  const std::filesystem::path meta =
      sidecar ? *sidecar : std::filesystem::path(path.string() + ".meta.json");
  std::ifstream meta_in(meta);
  if (!meta_in)
    throw std::runtime_error("cannot open raster sidecar: " + meta.string());
  nlohmann::json j;
  meta_in >> j;
  ImageStrip strip;
  strip.rows = j.at("rows").get<int>();
  strip.cols = j.at("cols").get<int>();
  strip.looks = j.value("looks", 1.0);
  const std::size_t count =
      static_cast<std::size_t>(strip.rows) * static_cast<std::size_t>(strip.cols);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open raster: " + path.string());
  std::vector<float> raw(count);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(count * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) !=
      count * sizeof(float))
    throw std::runtime_error("truncated raster: " + path.string());
  strip.pixels.assign(raw.begin(), raw.end());
  return strip;
}

// CSV outputs: one line per row, and optionally the full p-profiles.
inline std::string edge_result_csv(const EdgeResult& result) {
  std::string out = "row,found,col_hat,min_p,failed_splits\n";
  for (const auto& r : result.rows) {
    out += std::to_string(r.row) + ',' + (r.found ? "1" : "0") + ',' +
           std::to_string(r.found ? r.col_hat : -1) + ',' +
           io::format_double(r.found ? r.min_p : 1.0) + ',' +
           std::to_string(r.failed_splits) + '\n';
  }
  return out;
}

inline std::string edge_profiles_csv(const EdgeResult& result) {
  std::string out = "row,k,p\n";
  for (const auto& r : result.rows)
    for (const auto& [k, p] : r.p_profile)
      out += std::to_string(r.row) + ',' + std::to_string(k) + ',' +
             io::format_double(p) + '\n';
  return out;
}

}  // namespace g0gd
