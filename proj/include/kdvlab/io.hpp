#pragma once
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "kdvlab/bourgain.hpp"
#include "kdvlab/experiments.hpp"
#include "kdvlab/field.hpp"

namespace kdvlab {

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// %.17g round-trips doubles and never varies across runs; NaN and infinities
// are pinned to fixed spellings so CSV bytes stay stable.
inline std::string fmt_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return content;
}

// ---- field snapshots -------------------------------------------------------
// Binary layout: "KDVS", u32 version, u32 n_modes, f64 tau, then n_modes
// little-endian (re, im) f64 pairs in storage-bin order.

struct Snapshot {
  SpectralField field;
  double tau = 0.0;
};

inline void write_snapshot(const std::filesystem::path& path, const SpectralField& f, double tau) {
  std::string buf;
  buf.reserve(16 + 16 * static_cast<size_t>(f.n()));
  buf.append("KDVS", 4);
  uint32_t version = 1, n = static_cast<uint32_t>(f.n());
  buf.append(reinterpret_cast<const char*>(&version), 4);
  buf.append(reinterpret_cast<const char*>(&n), 4);
  buf.append(reinterpret_cast<const char*>(&tau), 8);
  for (const cplx& c : f.coeff) {
    double re = c.real(), im = c.imag();
    buf.append(reinterpret_cast<const char*>(&re), 8);
    buf.append(reinterpret_cast<const char*>(&im), 8);
  }
  write_text_file(path, buf);
}

inline Snapshot read_snapshot(const std::filesystem::path& path) {
  std::string buf = read_text_file(path);
  if (buf.size() < 20 || buf.compare(0, 4, "KDVS") != 0)
    throw IoError("not a field snapshot: " + path.string());
  uint32_t version = 0, n = 0;
  std::memcpy(&version, buf.data() + 4, 4);
  std::memcpy(&n, buf.data() + 8, 4);
  if (version != 1) throw IoError("unsupported snapshot version");
  Snapshot snap;
  std::memcpy(&snap.tau, buf.data() + 12, 8);
  if (n < 8 || n % 2 != 0 || buf.size() != 20 + 16 * static_cast<size_t>(n))
    throw IoError("corrupt snapshot: " + path.string());
  snap.field = SpectralField(GridSpec{static_cast<int>(n)});
  for (uint32_t b = 0; b < n; ++b) {
    double re, im;
    std::memcpy(&re, buf.data() + 20 + 16 * static_cast<size_t>(b), 8);
    std::memcpy(&im, buf.data() + 28 + 16 * static_cast<size_t>(b), 8);
    snap.field.coeff[b] = cplx(re, im);
  }
  return snap;
}

// Text alternative for inspection: one row per retained wavenumber.
inline std::string field_csv(const SpectralField& f) {
  std::string out = "k,re,im\n";
  int n = f.grid.n_modes;
  for (long long k = -n / 2; k <= n / 2 - 1; ++k) {
    cplx c = f.at(k);
    out += std::to_string(k) + "," + fmt_double(c.real()) + "," + fmt_double(c.imag()) + "\n";
  }
  return out;
}

// ---- study CSV emission ----------------------------------------------------
// One schema family for all studies: scheme,s0,seed,n_modes,tau,T,error_l2,status

inline std::string study_csv_header() { return "scheme,s0,seed,n_modes,tau,T,error_l2,status\n"; }

inline double effective_s0(const ExperimentConfig& cfg) {
  return cfg.data == DataKind::Rough ? cfg.s0 : std::numeric_limits<double>::infinity();
}

inline std::string convergence_csv(const ConvergenceReport& r) {
  std::string out = study_csv_header();
  std::string s0 = fmt_double(effective_s0(r.cfg));
  for (const ErrorPoint& p : r.points) {
    out += scheme_name(p.scheme) + "," + s0 + "," + std::to_string(p.seed) + "," +
           std::to_string(r.cfg.grid.n_modes) + "," + fmt_double(p.tau) + "," +
           fmt_double(r.cfg.horizon) + "," + fmt_double(p.error_l2) + "," +
           (p.blew_up ? "blowup" : "ok") + "\n";
  }
  return out;
}

inline std::string gap_csv(const GapReport& r) {
  std::string out = study_csv_header();
  std::string s0 = fmt_double(effective_s0(r.cfg));
  for (const GapPoint& p : r.points) {
    out += std::string("projection_gap,") + s0 + "," + std::to_string(p.seed) + "," +
           std::to_string(r.cfg.grid.n_modes) + "," + fmt_double(p.tau) + "," +
           fmt_double(r.cfg.horizon) + "," + fmt_double(p.gap) + "," +
           (p.blew_up ? "blowup" : "ok") + "\n";
  }
  return out;
}

inline std::string local_error_csv(const LocalErrorReport& r) {
  std::string out = study_csv_header();
  std::string s0 = fmt_double(effective_s0(r.cfg));
  uint64_t seed = r.cfg.seeds.front();
  for (const LocalErrorPoint& p : r.points) {
    out += scheme_name(p.scheme) + "," + s0 + "," + std::to_string(seed) + "," +
           std::to_string(r.cfg.grid.n_modes) + "," + fmt_double(p.tau) + "," + fmt_double(p.tau) +
           "," + fmt_double(p.defect) + ",ok\n";
  }
  return out;
}

inline std::string probe_csv(const ProbeReport& r) {
  std::string out = "probe,tau,s,b,value,seed\n";
  for (const ProbeRow& row : r.rows) {
    out += row.probe + "," + fmt_double(row.tau) + "," + fmt_double(row.s) + "," +
           fmt_double(row.b) + "," + fmt_double(row.value) + "," + std::to_string(row.seed) + "\n";
  }
  return out;
}

// ---- JSON sidecars ---------------------------------------------------------
// Everything needed to reread a study without the config file.  Parallelism
// degree is deliberately omitted: outputs must not depend on it.

inline nlohmann::ordered_json config_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  std::vector<std::string> names;
  for (SchemeKind k : cfg.schemes) names.push_back(scheme_name(k));
  j["schemes"] = names;
  j["tau_ladder"] = cfg.tau_ladder;
  j["horizon"] = cfg.horizon;
  j["data"] = data_kind_name(cfg.data);
  j["s0"] = cfg.s0;
  j["margin"] = cfg.margin;
  j["normalize_to"] = cfg.normalize_to;
  j["seeds"] = cfg.seeds;
  j["n_modes"] = cfg.grid.n_modes;
  j["tau_ref"] = cfg.reference.tau_ref;
  j["validate_reference"] = cfg.reference.validate;
  j["ref_estimate_fraction"] = cfg.reference.max_estimate_fraction;
  auto [w0, w1] = fit_window(cfg);
  j["fit_window"] = {w0, w1};
  return j;
}

inline nlohmann::ordered_json fits_json(const std::vector<SchemeSeedFit>& fits) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const SchemeSeedFit& f : fits) {
    nlohmann::ordered_json j;
    j["scheme"] = scheme_name(f.scheme);
    j["seed"] = f.seed;
    j["has_fit"] = f.has_fit;
    if (f.has_fit) {
      j["slope"] = f.fit.slope;
      j["intercept"] = f.fit.intercept;
      j["residual"] = f.fit.residual;
      j["n_points"] = f.fit.n_points;
    }
    arr.push_back(j);
  }
  return arr;
}

inline nlohmann::ordered_json convergence_sidecar(const ConvergenceReport& r) {
  nlohmann::ordered_json j;
  j["study"] = "converge";
  j["config"] = config_json(r.cfg);
  j["reference_pair_disagreement"] = r.reference_pair_disagreement;
  j["reference_error_estimate"] = r.reference_error_estimate;
  j["min_valid_error"] = r.min_valid_error;
  j["fits"] = fits_json(r.fits);
  nlohmann::ordered_json med;
  for (const auto& [scheme, slope] : r.median_slopes) med[scheme_name(scheme)] = slope;
  j["median_slopes"] = med;
  return j;
}

inline nlohmann::ordered_json gap_sidecar(const GapReport& r) {
  nlohmann::ordered_json j;
  j["study"] = "projection-gap";
  j["config"] = config_json(r.cfg);
  j["fits"] = fits_json(r.fits);
  j["median_slope"] = r.median_slope;
  return j;
}

inline nlohmann::ordered_json local_error_sidecar(const LocalErrorReport& r) {
  nlohmann::ordered_json j;
  j["study"] = "local-error";
  j["config"] = config_json(r.cfg);
  j["local_refine"] = r.cfg.local_refine;
  j["fits"] = fits_json(r.fits);
  return j;
}

inline nlohmann::ordered_json probe_sidecar(const ProbeReport& r) {
  nlohmann::ordered_json j;
  j["study"] = "bourgain-probe";
  nlohmann::ordered_json c;
  c["taus"] = r.cfg.taus;
  c["n_modes"] = r.cfg.grid.n_modes;
  c["n_fields"] = r.cfg.n_fields;
  c["n_pairs"] = r.cfg.n_pairs;
  c["s0"] = r.cfg.s0;
  c["margin"] = r.cfg.margin;
  c["window_T"] = r.cfg.window_T;
  c["bilinear_s"] = r.cfg.bilinear_s;
  c["seed0"] = r.cfg.seed0;
  c["window_doubling"] = r.cfg.window_doubling;
  j["config"] = c;
  nlohmann::ordered_json summary = nlohmann::ordered_json::array();
  for (const ProbeSummary& s : r.summary) {
    nlohmann::ordered_json row;
    row["probe"] = s.probe;
    row["tau"] = s.tau;
    row["max_value"] = s.max_value;
    summary.push_back(row);
  }
  j["summary"] = summary;
  return j;
}

// ---- SVG rate plots --------------------------------------------------------
// Hand-rolled log-log scatter with per-series polylines and slope guides.
// No external assets, no timestamps: bytes depend only on the data.

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (tau, value), positives only
};

inline std::string svg_rate_plot(const std::string& title, const std::vector<PlotSeries>& series,
                                 const std::vector<double>& guide_slopes) {
  const double W = 640, H = 480, L = 70, R = 30, T = 40, B = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const PlotSeries& s : series)
    for (auto [x, y] : s.points) {
      if (!(x > 0.0) || !(y > 0.0)) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (xmin > xmax || ymin > ymax) {
    xmin = ymin = 1e-3;
    xmax = ymax = 1.0;
  }
  if (xmin == xmax) xmax = 2 * xmin;
  if (ymin == ymax) ymax = 2 * ymin;
  double lx0 = std::log2(xmin), lx1 = std::log2(xmax);
  double ly0 = std::log2(ymin), ly1 = std::log2(ymax);
  ly0 -= 0.05 * (ly1 - ly0 + 1e-9);
  ly1 += 0.05 * (ly1 - ly0);
  auto X = [&](double x) { return L + (std::log2(x) - lx0) / (lx1 - lx0) * (W - L - R); };
  auto Y = [&](double y) { return H - B - (std::log2(y) - ly0) / (ly1 - ly0) * (H - T - B); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) +
         "\" viewBox=\"0 0 " + num(W) + " " + num(H) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(W / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\" "
         "font-family=\"monospace\">" + title + "</text>\n";
  svg += "<rect x=\"" + num(L) + "\" y=\"" + num(T) + "\" width=\"" + num(W - L - R) +
         "\" height=\"" + num(H - T - B) + "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int e = static_cast<int>(std::ceil(lx0)); e <= static_cast<int>(std::floor(lx1)); ++e) {
    double x = std::ldexp(1.0, e);
    svg += "<line x1=\"" + num(X(x)) + "\" y1=\"" + num(T) + "\" x2=\"" + num(X(x)) + "\" y2=\"" +
           num(H - B) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + num(X(x)) + "\" y=\"" + num(H - B + 16) +
           "\" text-anchor=\"middle\" font-size=\"10\" font-family=\"monospace\">2^" +
           std::to_string(e) + "</text>\n";
  }
  for (int e = static_cast<int>(std::ceil(ly0 / 3.321928)) - 1;
       e <= static_cast<int>(std::floor(ly1 / 3.321928)) + 1; ++e) {
    double y = std::pow(10.0, e);
    if (std::log2(y) < ly0 || std::log2(y) > ly1) continue;
    svg += "<line x1=\"" + num(L) + "\" y1=\"" + num(Y(y)) + "\" x2=\"" + num(W - R) + "\" y2=\"" +
           num(Y(y)) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + num(L - 6) + "\" y=\"" + num(Y(y) + 3) +
           "\" text-anchor=\"end\" font-size=\"10\" font-family=\"monospace\">1e" +
           std::to_string(e) + "</text>\n";
  }
  svg += "<text x=\"" + num(W / 2) + "\" y=\"" + num(H - 12) +
         "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"monospace\">tau</text>\n";

  for (double slope : guide_slopes) {
    double yg1 = ymin * std::pow(xmax / xmin, slope);
    svg += "<line x1=\"" + num(X(xmin)) + "\" y1=\"" + num(Y(ymin)) + "\" x2=\"" + num(X(xmax)) +
           "\" y2=\"" + num(Y(std::min(yg1, ymax))) +
           "\" stroke=\"#aaaaaa\" stroke-dasharray=\"5,4\"/>\n";
    svg += "<text x=\"" + num(X(xmax) - 4) + "\" y=\"" + num(Y(std::min(yg1, ymax)) - 4) +
           "\" text-anchor=\"end\" font-size=\"10\" font-family=\"monospace\" "
           "fill=\"#888888\">slope " + num(slope) + "</text>\n";
  }

  int ci = 0;
  double ly = T + 14;
  for (const PlotSeries& s : series) {
    const char* color = colors[ci % 8];
    std::string pts;
    for (auto [x, y] : s.points) {
      if (!(x > 0.0) || !(y > 0.0)) continue;
      pts += num(X(x)) + "," + num(Y(y)) + " ";
      svg += "<circle cx=\"" + num(X(x)) + "\" cy=\"" + num(Y(y)) + "\" r=\"3\" fill=\"" + color +
             "\"/>\n";
    }
    if (!pts.empty())
      svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + std::string(color) +
             "\" stroke-width=\"1.5\"/>\n";
    svg += "<text x=\"" + num(L + 10) + "\" y=\"" + num(ly) + "\" font-size=\"11\" "
           "font-family=\"monospace\" fill=\"" + color + "\">" + s.name + "</text>\n";
    ly += 14;
    ++ci;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace kdvlab
