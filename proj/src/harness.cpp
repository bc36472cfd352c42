#include "slepvolt/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>

#include "slepvolt/detector.hpp"
#include "slepvolt/identify.hpp"
#include "slepvolt/io.hpp"
#include "slepvolt/rng.hpp"
#include "slepvolt/signals.hpp"

namespace slepvolt {

namespace {

// Seed-stream purposes and canonical class/label ids. The layout of the
// coordinate tuples below is part of the reproducibility contract: changing
// it changes every record of every experiment.
constexpr std::uint64_t kStreamInput = 1;
constexpr std::uint64_t kStreamNoise = 2;

int class_id(InputClass c) {
  switch (c) {
    case InputClass::gaussian_white: return 1;
    case InputClass::m_sequence: return 2;
    case InputClass::ssr: return 3;
    case InputClass::modulated_dpss: return 4;
  }
  throw std::logic_error("unreachable input class");
}

int label_id(const std::string& label) {
  if (label == "null") return 0;
  if (label == "alternate") return 1;
  throw std::invalid_argument("unknown system label '" + label + "'");
}

// Null-pool grouping key: (class, energy idx, scale idx, w idx or -1 when the
// statistic pools bandwidths, probe order or -1).
using GroupKey = std::tuple<int, int, int, int, int>;

struct KeyedRecord {
  DetectionRecord rec;
  GroupKey key;
  bool valid = false;
};

struct UnitParts {
  Eigen::VectorXd p1, p2, p3;  // per-order responses to the unit-energy input
};

UnitParts compute_parts(const Eigen::MatrixXd& phi, const SystemSpec& spec) {
  UnitParts parts;
  parts.p1 = phi.transpose() * spec.c1;
  parts.p2 = phi.array().square().matrix().transpose() * spec.c2;
  parts.p3 = phi.array().cube().matrix().transpose() * spec.c3;
  return parts;
}

double sample_variance(const Eigen::VectorXd& x) {
  const double mean = x.mean();
  return (x.array() - mean).square().sum() / static_cast<double>(x.size() - 1);
}

double sample_covariance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double ma = a.mean();
  const double mb = b.mean();
  return ((a.array() - ma) * (b.array() - mb)).sum() / static_cast<double>(a.size() - 1);
}

// Smallest nonnegative higher-order scale whose noiseless output reaches the
// target sample standard deviation (zero when unreachable).
double solve_sd_scale(const UnitParts& parts, double energy, double target_sd) {
  const Eigen::VectorXd a = std::sqrt(energy) * parts.p1;
  const Eigen::VectorXd b = energy * parts.p2 + energy * std::sqrt(energy) * parts.p3;
  const double va = sample_variance(a);
  const double vb = sample_variance(b);
  const double cab = sample_covariance(a, b);
  if (vb <= 0.0) return 0.0;
  const double disc = cab * cab - vb * (va - target_sd * target_sd);
  if (disc < 0.0) return 0.0;
  return std::max(0.0, (-cab + std::sqrt(disc)) / vb);
}

std::vector<double> synthesize(const UnitParts& parts, double energy, double scale,
                               std::uint64_t noise_seed, double noise_variance) {
  const double a1 = std::sqrt(energy);
  const double a2 = scale * energy;
  const double a3 = scale * energy * std::sqrt(energy);
  Eigen::VectorXd y = a1 * parts.p1 + a2 * parts.p2 + a3 * parts.p3;
  std::vector<double> out(y.data(), y.data() + y.size());
  return add_output_noise(out, noise_seed, noise_variance);
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::runtime_error("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool close_to(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({std::abs(a), std::abs(b), 1.0}); }

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    const auto b = token.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = token.find_last_not_of(" \t");
    out.push_back(token.substr(b, e - b + 1));
  }
  return out;
}

// Context shared by the class drivers.
struct RunContext {
  const ExperimentConfig& cfg;
  LaguerreBasis basis;
  std::map<std::string, SystemSpec> specs;  // built at unit higher-order scale
  std::vector<KeyedRecord> records;
  std::vector<CrossRow> cross;
  std::vector<CellFailure> failures;
  bool sd_mode = false;
  int scale_cells = 1;

  double scale_value(int s_idx) const {
    return sd_mode ? 0.0 : cfg.ho_scales[static_cast<std::size_t>(s_idx)];
  }
};

void note_failure(RunContext& ctx, const std::string& cell, const std::string& what) {
#pragma omp critical(harness_failures)
  ctx.failures.push_back({cell, what});
}

std::string cell_name(const std::string& cls, const std::string& label, double e,
                      int s_idx, double w, int order, int rep) {
  std::ostringstream out;
  out << cls << " label=" << label << " energy=" << e << " scale_idx=" << s_idx
      << " w_hz=" << w;
  if (order >= 0) out << " order=" << order;
  if (rep >= 0) out << " rep=" << rep;
  return out.str();
}

// ---- class (iv): modulated DPSS probes, inner-product statistic -----------

void run_dpss_class(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const int cid = class_id(InputClass::modulated_dpss);

  for (int w_idx = 0; w_idx < static_cast<int>(cfg.w_hz.size()); ++w_idx) {
    const double w = cfg.w_hz[static_cast<std::size_t>(w_idx)];
    DpssSet set;
    std::vector<int> orders;
    std::vector<std::vector<double>> inputs;           // unit energy, by order index
    std::map<std::string, std::vector<UnitParts>> parts;
    try {
      set = probe_basis(cfg.geometry, w);
      orders = odd_probe_orders(w * cfg.geometry.duration());
      for (int k : orders) {
        InputSpec spec;
        spec.input_class = InputClass::modulated_dpss;
        spec.geometry = cfg.geometry;
        spec.target_energy = 1.0;
        spec.half_bandwidth_hz = w;
        spec.dpss_order = k;
        inputs.push_back(modulated_dpss(spec, set));
      }
      for (const std::string& label : cfg.system_labels) {
        auto& v = parts[label];
        for (const auto& u : inputs)
          v.push_back(compute_parts(basis_responses(ctx.basis, u), ctx.specs.at(label)));
      }
    } catch (const std::exception& ex) {
      note_failure(ctx, "modulated_dpss setup w_hz=" + std::to_string(w), ex.what());
      continue;
    }

    const int n_orders = static_cast<int>(orders.size());
    const int n_labels = static_cast<int>(cfg.system_labels.size());
    const int n_e = static_cast<int>(cfg.energies.size());
    const long long jobs = static_cast<long long>(n_labels) * n_e * ctx.scale_cells *
                           n_orders * cfg.repetitions;
    std::vector<KeyedRecord> block(static_cast<std::size_t>(jobs));

    // Cross-product storage: outputs at the measured (energy, scale) cell.
    int cross_e = -1, cross_s = -1;
    for (int i = 0; i < n_e; ++i)
      if (close_to(cfg.energies[static_cast<std::size_t>(i)], cfg.cross_energy)) cross_e = i;
    for (int i = 0; i < ctx.scale_cells; ++i)
      if (ctx.sd_mode || close_to(cfg.ho_scales[static_cast<std::size_t>(i)], cfg.cross_scale)) cross_s = i;
    std::vector<std::vector<std::vector<double>>> cross_y(
        static_cast<std::size_t>(n_labels * cfg.repetitions),
        std::vector<std::vector<double>>(static_cast<std::size_t>(n_orders)));

#pragma omp parallel for schedule(dynamic)
    for (long long job = 0; job < jobs; ++job) {
      long long rem = job;
      const int rep = static_cast<int>(rem % cfg.repetitions); rem /= cfg.repetitions;
      const int k_idx = static_cast<int>(rem % n_orders); rem /= n_orders;
      const int s_idx = static_cast<int>(rem % ctx.scale_cells); rem /= ctx.scale_cells;
      const int e_idx = static_cast<int>(rem % n_e); rem /= n_e;
      const int l_idx = static_cast<int>(rem);
      const std::string& label = cfg.system_labels[static_cast<std::size_t>(l_idx)];
      const double energy = cfg.energies[static_cast<std::size_t>(e_idx)];
      const int k = orders[static_cast<std::size_t>(k_idx)];
      try {
        const UnitParts& up = parts.at(label)[static_cast<std::size_t>(k_idx)];
        const double scale = ctx.sd_mode ? solve_sd_scale(up, energy, cfg.sd_target)
                                         : ctx.scale_value(s_idx);
        const std::uint64_t seed = derive_seed(
            cfg.master_seed,
            {kStreamNoise, static_cast<std::uint64_t>(cid),
             static_cast<std::uint64_t>(label_id(label)), static_cast<std::uint64_t>(e_idx),
             static_cast<std::uint64_t>(s_idx), static_cast<std::uint64_t>(w_idx),
             static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(rep)});
        const std::vector<double> y = synthesize(up, energy, scale, seed, cfg.noise_variance);

        KeyedRecord kr;
        kr.rec.input_class = to_string(InputClass::modulated_dpss);
        kr.rec.system_label = label;
        kr.rec.statistic = "inner_product";
        kr.rec.energy = energy;
        kr.rec.ho_scale = scale;
        kr.rec.w_hz = w;
        kr.rec.repetition = rep;
        kr.rec.dpss_order = k;
        kr.rec.raw_response = inner_product_response(y, inputs[static_cast<std::size_t>(k_idx)]);
        kr.rec.seed = seed;
        kr.rec.snri = cfg.noise_variance > 0.0 ? energy / cfg.noise_variance : 0.0;
        kr.key = GroupKey{cid, e_idx, s_idx, w_idx, k};
        kr.valid = true;
        block[static_cast<std::size_t>(job)] = std::move(kr);

        if (e_idx == cross_e && s_idx == cross_s)
          cross_y[static_cast<std::size_t>(l_idx * cfg.repetitions + rep)][static_cast<std::size_t>(k_idx)] = y;
      } catch (const std::exception& ex) {
        note_failure(ctx, cell_name("modulated_dpss", label, energy, s_idx, w, k, rep),
                     ex.what());
      }
    }
    for (auto& kr : block)
      if (kr.valid) ctx.records.push_back(std::move(kr));

    if (cross_e >= 0 && cross_s >= 0 && n_orders >= 2) {
      for (int l_idx = 0; l_idx < n_labels; ++l_idx) {
        double acc = 0.0;
        int used = 0;
        for (int rep = 0; rep < cfg.repetitions; ++rep) {
          const auto& ys = cross_y[static_cast<std::size_t>(l_idx * cfg.repetitions + rep)];
          if (std::any_of(ys.begin(), ys.end(),
                          [](const std::vector<double>& v) { return v.empty(); }))
            continue;
          try {
            acc += mean_offdiagonal(cross_product_matrix(ys, inputs));
            ++used;
          } catch (const std::exception& ex) {
            note_failure(ctx,
                         "cross-products label=" + cfg.system_labels[static_cast<std::size_t>(l_idx)] +
                             " w_hz=" + std::to_string(w) + " rep=" + std::to_string(rep),
                         ex.what());
          }
        }
        if (used > 0)
          ctx.cross.push_back({cfg.system_labels[static_cast<std::size_t>(l_idx)], w, acc / used, used});
      }
    }
  }
}

// ---- class (iii): sum-of-cosines probe, inner-product statistic ------------

void run_ssr_class(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const int cid = class_id(InputClass::ssr);

  for (int w_idx = 0; w_idx < static_cast<int>(cfg.w_hz.size()); ++w_idx) {
    const double w = cfg.w_hz[static_cast<std::size_t>(w_idx)];
    std::vector<double> input;
    std::map<std::string, UnitParts> parts;
    try {
      InputSpec spec;
      spec.input_class = InputClass::ssr;
      spec.geometry = cfg.geometry;
      spec.target_energy = 1.0;
      spec.half_bandwidth_hz = w;
      input = ssr(spec);
      const Eigen::MatrixXd phi = basis_responses(ctx.basis, input);
      for (const std::string& label : cfg.system_labels)
        parts.emplace(label, compute_parts(phi, ctx.specs.at(label)));
    } catch (const std::exception& ex) {
      note_failure(ctx, "ssr setup w_hz=" + std::to_string(w), ex.what());
      continue;
    }

    const int n_labels = static_cast<int>(cfg.system_labels.size());
    const int n_e = static_cast<int>(cfg.energies.size());
    const long long jobs =
        static_cast<long long>(n_labels) * n_e * ctx.scale_cells * cfg.repetitions;
    std::vector<KeyedRecord> block(static_cast<std::size_t>(jobs));

#pragma omp parallel for schedule(dynamic)
    for (long long job = 0; job < jobs; ++job) {
      long long rem = job;
      const int rep = static_cast<int>(rem % cfg.repetitions); rem /= cfg.repetitions;
      const int s_idx = static_cast<int>(rem % ctx.scale_cells); rem /= ctx.scale_cells;
      const int e_idx = static_cast<int>(rem % n_e); rem /= n_e;
      const int l_idx = static_cast<int>(rem);
      const std::string& label = cfg.system_labels[static_cast<std::size_t>(l_idx)];
      const double energy = cfg.energies[static_cast<std::size_t>(e_idx)];
      try {
        const UnitParts& up = parts.at(label);
        const double scale = ctx.sd_mode ? solve_sd_scale(up, energy, cfg.sd_target)
                                         : ctx.scale_value(s_idx);
        const std::uint64_t seed = derive_seed(
            cfg.master_seed,
            {kStreamNoise, static_cast<std::uint64_t>(cid),
             static_cast<std::uint64_t>(label_id(label)), static_cast<std::uint64_t>(e_idx),
             static_cast<std::uint64_t>(s_idx), static_cast<std::uint64_t>(w_idx), 0,
             static_cast<std::uint64_t>(rep)});
        const std::vector<double> y = synthesize(up, energy, scale, seed, cfg.noise_variance);

        KeyedRecord kr;
        kr.rec.input_class = to_string(InputClass::ssr);
        kr.rec.system_label = label;
        kr.rec.statistic = "inner_product";
        kr.rec.energy = energy;
        kr.rec.ho_scale = scale;
        kr.rec.w_hz = w;
        kr.rec.repetition = rep;
        kr.rec.raw_response = inner_product_response(y, input);
        kr.rec.seed = seed;
        kr.rec.snri = cfg.noise_variance > 0.0 ? energy / cfg.noise_variance : 0.0;
        kr.key = GroupKey{cid, e_idx, s_idx, w_idx, -1};
        kr.valid = true;
        block[static_cast<std::size_t>(job)] = std::move(kr);
      } catch (const std::exception& ex) {
        note_failure(ctx, cell_name("ssr", label, energy, s_idx, w, -1, rep), ex.what());
      }
    }
    for (auto& kr : block)
      if (kr.valid) ctx.records.push_back(std::move(kr));
  }
}

// ---- classes (i)/(ii): white inputs, kernel-identification statistic -------
//
// One simulation and one least-squares fit per (label, energy, scale, rep);
// the three bandwidth statistics share that fit, and the null pools collapse
// the bandwidth axis to match.

void run_white_class(RunContext& ctx, InputClass icls) {
  const ExperimentConfig& cfg = ctx.cfg;
  const int cid = class_id(icls);
  const int n_labels = static_cast<int>(cfg.system_labels.size());
  const int n_e = static_cast<int>(cfg.energies.size());
  const long long sims =
      static_cast<long long>(n_labels) * n_e * ctx.scale_cells * cfg.repetitions;
  const int n_w = static_cast<int>(cfg.w_hz.size());
  std::vector<KeyedRecord> block(static_cast<std::size_t>(sims) * n_w);

#pragma omp parallel for schedule(dynamic)
  for (long long sim = 0; sim < sims; ++sim) {
    long long rem = sim;
    const int rep = static_cast<int>(rem % cfg.repetitions); rem /= cfg.repetitions;
    const int s_idx = static_cast<int>(rem % ctx.scale_cells); rem /= ctx.scale_cells;
    const int e_idx = static_cast<int>(rem % n_e); rem /= n_e;
    const int l_idx = static_cast<int>(rem);
    const std::string& label = cfg.system_labels[static_cast<std::size_t>(l_idx)];
    const double energy = cfg.energies[static_cast<std::size_t>(e_idx)];
    try {
      const std::uint64_t input_seed = derive_seed(
          cfg.master_seed,
          {kStreamInput, static_cast<std::uint64_t>(cid),
           static_cast<std::uint64_t>(label_id(label)), static_cast<std::uint64_t>(e_idx),
           static_cast<std::uint64_t>(s_idx), static_cast<std::uint64_t>(rep)});
      InputSpec spec;
      spec.input_class = icls;
      spec.geometry = cfg.geometry;
      spec.target_energy = 1.0;
      spec.half_bandwidth_hz = cfg.w_hz[0];
      spec.seed = input_seed;
      const std::vector<double> unit_input =
          (icls == InputClass::gaussian_white) ? gaussian_white(spec) : m_sequence(spec);

      const Eigen::MatrixXd phi = basis_responses(ctx.basis, unit_input);
      const UnitParts up = compute_parts(phi, ctx.specs.at(label));
      const double scale = ctx.sd_mode ? solve_sd_scale(up, energy, cfg.sd_target)
                                       : ctx.scale_value(s_idx);
      const std::uint64_t noise_seed = derive_seed(
          cfg.master_seed,
          {kStreamNoise, static_cast<std::uint64_t>(cid),
           static_cast<std::uint64_t>(label_id(label)), static_cast<std::uint64_t>(e_idx),
           static_cast<std::uint64_t>(s_idx), 0, 0, static_cast<std::uint64_t>(rep)});
      const std::vector<double> y = synthesize(up, energy, scale, noise_seed,
                                               cfg.noise_variance);

      std::vector<double> u(unit_input);
      const double amp = std::sqrt(energy);
      for (double& v : u) v *= amp;
      const IdentificationResult fit = least_squares_identify(u, y, ctx.basis);
      const SpectrumGrid g1 = identified_order1_gfrf(fit, ctx.basis, cfg.analysis_grid);

      for (int w_idx = 0; w_idx < n_w; ++w_idx) {
        const double w = cfg.w_hz[static_cast<std::size_t>(w_idx)];
        KeyedRecord kr;
        kr.rec.input_class = to_string(icls);
        kr.rec.system_label = label;
        kr.rec.statistic = "kernel_band_mean";
        kr.rec.energy = energy;
        kr.rec.ho_scale = scale;
        kr.rec.w_hz = w;
        kr.rec.repetition = rep;
        kr.rec.raw_response =
            band_mean_abs(g1, w, cfg.geometry.f0_hz, cfg.geometry.dt);
        kr.rec.seed = noise_seed;
        kr.rec.snri = cfg.noise_variance > 0.0 ? energy / cfg.noise_variance : 0.0;
        kr.key = GroupKey{cid, e_idx, s_idx, -1, -1};  // bandwidth-collapsed pools
        kr.valid = true;
        block[static_cast<std::size_t>(sim) * n_w + static_cast<std::size_t>(w_idx)] = std::move(kr);
      }
    } catch (const std::exception& ex) {
      note_failure(ctx, cell_name(to_string(icls), label, energy, s_idx, -1.0, -1, rep),
                   ex.what());
    }
  }
  for (auto& kr : block)
    if (kr.valid) ctx.records.push_back(std::move(kr));
}

// ---- z-score normalization --------------------------------------------------

void normalize_records(RunContext& ctx) {
  std::map<GroupKey, std::vector<double>> null_pools;
  for (const KeyedRecord& kr : ctx.records)
    if (kr.rec.system_label == "null") null_pools[kr.key].push_back(kr.rec.raw_response);

  for (KeyedRecord& kr : ctx.records) {
    const auto it = null_pools.find(kr.key);
    if (it == null_pools.end() || it->second.size() < 2) continue;
    try {
      kr.rec.normalized_response =
          normalize_against_null({kr.rec.raw_response}, it->second)[0];
    } catch (const std::exception& ex) {
      note_failure(ctx,
                   cell_name(kr.rec.input_class, kr.rec.system_label, kr.rec.energy, 0,
                             kr.rec.w_hz, kr.rec.dpss_order, kr.rec.repetition),
                   ex.what());
    }
  }
}

std::string record_sort_key(const DetectionRecord& r) {
  std::ostringstream out;
  out << r.input_class << '|' << r.system_label << '|';
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.17g|%.17g|%.17g|%05d|%05d", r.energy, r.ho_scale,
                r.w_hz, r.dpss_order + 1, r.repetition);
  out << buf;
  return out.str();
}

void write_record_csv(const std::string& path, const std::vector<DetectionRecord>& records,
                      const ExperimentConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "# schema detection_records v1\n";
  out << "# master_seed=" << cfg.master_seed << "\n";
  out << "# noise_variance=" << format_g17(cfg.noise_variance) << "\n";
  out << "input_class,system_label,statistic,energy,ho_scale,w_hz,repetition,"
         "dpss_order,raw_response,normalized_response,seed,snri\n";
  for (const DetectionRecord& r : records) {
    out << r.input_class << ',' << r.system_label << ',' << r.statistic << ','
        << format_g17(r.energy) << ',' << format_g17(r.ho_scale) << ','
        << format_g17(r.w_hz) << ',' << r.repetition << ',' << r.dpss_order << ','
        << format_g17(r.raw_response) << ','
        << (r.normalized_response ? format_g17(*r.normalized_response) : std::string())
        << ',' << r.seed << ',' << format_g17(r.snri) << "\n";
  }
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace

void ExperimentConfig::check() const {
  geometry.check();
  if (repetitions < 1) throw std::invalid_argument("config: repetitions must be >= 1");
  if (energies.empty() || ho_scales.empty() || w_hz.empty())
    throw std::invalid_argument("config: energies, ho_scales and w_hz must be nonempty");
  for (double e : energies)
    if (!(e > 0.0)) throw std::invalid_argument("config: energies must be positive");
  for (double s : ho_scales)
    if (!(s >= 0.0)) throw std::invalid_argument("config: ho_scales must be nonnegative");
  for (double w : w_hz) {
    if (!(w > 0.0)) throw std::invalid_argument("config: w_hz must be positive");
    if (geometry.f0_hz + w >= geometry.nyquist_hz())
      throw std::invalid_argument("config: band extends to or past Nyquist");
  }
  if (analysis_grid < geometry.n)
    throw std::invalid_argument("config: analysis grid needs at least n bins");
  if (noise_variance < 0.0)
    throw std::invalid_argument("config: noise variance must be nonnegative");
  if (num_basis_functions < 1)
    throw std::invalid_argument("config: need at least one basis function");
  if (scaling_mode != "energy" && scaling_mode != "sd-target")
    throw std::invalid_argument("config: scaling_mode must be 'energy' or 'sd-target'");
  if (!(sd_target > 0.0)) throw std::invalid_argument("config: sd_target must be positive");
  if (input_classes.empty() || system_labels.empty())
    throw std::invalid_argument("config: input classes and system labels must be nonempty");
  for (const std::string& c : input_classes) input_class_from_string(c);
  for (const std::string& l : system_labels) label_id(l);
}

ExperimentConfig load_experiment_config(const std::string& path) {
  const FlatConfig flat = parse_flat_config(path);
  ExperimentConfig cfg;
  cfg.geometry.n = static_cast<int>(config_integer(flat, "n", cfg.geometry.n));
  cfg.geometry.dt = config_number(flat, "sample_period", cfg.geometry.dt);
  cfg.geometry.f0_hz = config_number(flat, "center_hz", cfg.geometry.f0_hz);
  cfg.geometry.fr_hz = config_number(flat, "fr_hz", cfg.geometry.fr_hz);
  cfg.energies = config_number_list(flat, "energies", cfg.energies);
  cfg.ho_scales = config_number_list(flat, "ho_scales", cfg.ho_scales);
  cfg.w_hz = config_number_list(flat, "w_hz", cfg.w_hz);
  cfg.repetitions = static_cast<int>(config_integer(flat, "repetitions", cfg.repetitions));
  cfg.master_seed = static_cast<std::uint64_t>(
      config_integer(flat, "master_seed", static_cast<long long>(cfg.master_seed)));
  cfg.analysis_grid = static_cast<int>(config_integer(flat, "analysis_grid", cfg.analysis_grid));
  cfg.noise_variance = config_number(flat, "noise_variance", cfg.noise_variance);
  if (flat.count("input_classes"))
    cfg.input_classes = split_list(config_string(flat, "input_classes", ""));
  if (flat.count("system_labels"))
    cfg.system_labels = split_list(config_string(flat, "system_labels", ""));
  cfg.num_basis_functions =
      static_cast<int>(config_integer(flat, "num_basis_functions", cfg.num_basis_functions));
  cfg.levels.gain1 = config_number(flat, "gain1", cfg.levels.gain1);
  cfg.levels.a2 = config_number(flat, "a2", cfg.levels.a2);
  cfg.levels.a3 = config_number(flat, "a3", cfg.levels.a3);
  cfg.alternate.delta_amplitude =
      config_number(flat, "delta_amplitude", cfg.alternate.delta_amplitude);
  cfg.alternate.decaying_bump = config_flag(flat, "decaying_bump", cfg.alternate.decaying_bump);
  cfg.alternate.beta2 = config_number(flat, "beta2", cfg.alternate.beta2);
  cfg.alternate.beta6 = config_number(flat, "beta6", cfg.alternate.beta6);
  cfg.alternate.sigma2 = config_number(flat, "sigma2", cfg.alternate.sigma2);
  cfg.alternate.sigma6 = config_number(flat, "sigma6", cfg.alternate.sigma6);
  cfg.scaling_mode = config_string(flat, "scaling_mode", cfg.scaling_mode);
  cfg.sd_target = config_number(flat, "sd_target", cfg.sd_target);
  cfg.cross_energy = config_number(flat, "cross_energy", cfg.cross_energy);
  cfg.cross_scale = config_number(flat, "cross_scale", cfg.cross_scale);
  cfg.check();
  return cfg;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.check();
  RunContext ctx{config};
  ctx.sd_mode = (config.scaling_mode == "sd-target");
  ctx.scale_cells = ctx.sd_mode ? 1 : static_cast<int>(config.ho_scales.size());
  ctx.basis = build_basis(config.num_basis_functions, config.geometry.n, config.geometry.dt);
  for (const std::string& label : config.system_labels) {
    if (label == "null")
      ctx.specs.emplace(label, make_null_system(ctx.basis, 1.0, config.geometry, config.levels));
    else
      ctx.specs.emplace(label, make_alternate_system(ctx.basis, 1.0, config.alternate,
                                                     config.geometry, config.levels));
  }

  for (const std::string& cls : config.input_classes) {
    const InputClass icls = input_class_from_string(cls);
    switch (icls) {
      case InputClass::gaussian_white:
      case InputClass::m_sequence:
        run_white_class(ctx, icls);
        break;
      case InputClass::ssr:
        run_ssr_class(ctx);
        break;
      case InputClass::modulated_dpss:
        run_dpss_class(ctx);
        break;
    }
  }

  normalize_records(ctx);

  ExperimentResult result;
  result.records.reserve(ctx.records.size());
  for (KeyedRecord& kr : ctx.records) result.records.push_back(std::move(kr.rec));
  std::sort(result.records.begin(), result.records.end(),
            [](const DetectionRecord& a, const DetectionRecord& b) {
              return record_sort_key(a) < record_sort_key(b);
            });
  std::sort(ctx.cross.begin(), ctx.cross.end(), [](const CrossRow& a, const CrossRow& b) {
    return std::tie(a.system_label, a.w_hz) < std::tie(b.system_label, b.w_hz);
  });
  result.cross = std::move(ctx.cross);
  result.failures = std::move(ctx.failures);
  return result;
}

double median_abs_z(const std::vector<DetectionRecord>& records,
                    const std::string& input_class, std::optional<double> energy,
                    std::optional<double> w_hz) {
  std::vector<double> zs;
  for (const DetectionRecord& r : records) {
    if (r.input_class != input_class || r.system_label != "alternate") continue;
    if (!r.normalized_response) continue;
    if (energy && !close_to(r.energy, *energy)) continue;
    if (w_hz && !close_to(r.w_hz, *w_hz)) continue;
    zs.push_back(std::abs(*r.normalized_response));
  }
  if (zs.empty())
    throw std::runtime_error("median_abs_z: no matching normalized records for class '" +
                             input_class + "'");
  return median(std::move(zs));
}

double cross_mean(const ExperimentResult& result, const std::string& label, double w_hz) {
  for (const CrossRow& row : result.cross)
    if (row.system_label == label && close_to(row.w_hz, w_hz)) return row.mean_offdiagonal;
  throw std::runtime_error("cross_mean: no cross-product row for the requested cell");
}

void emit_plot_data(const ExperimentResult& result, const ExperimentConfig& config,
                    const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

  write_record_csv(path("records.csv"), result.records, config);

  std::vector<DetectionRecord> ip, kernel;
  for (const DetectionRecord& r : result.records) {
    if (r.statistic == "inner_product") ip.push_back(r);
    else kernel.push_back(r);
  }
  write_record_csv(path("detection-ip.csv"), ip, config);
  write_record_csv(path("detection-kernel.csv"), kernel, config);

  {
    std::ofstream out(path("cross-products.csv"));
    if (!out) throw std::runtime_error("cannot open cross-products.csv for writing");
    out << "# schema cross_products v1\n";
    out << "system_label,w_hz,mean_offdiagonal,repetitions\n";
    for (const CrossRow& row : result.cross)
      out << row.system_label << ',' << format_g17(row.w_hz) << ','
          << format_g17(row.mean_offdiagonal) << ',' << row.repetitions << "\n";
  }

  if (!result.failures.empty()) {
    std::ofstream out(path("failures.csv"));
    out << "# schema cell_failures v1\n";
    out << "cell,message\n";
    for (const CellFailure& f : result.failures) out << '"' << f.cell << "\",\"" << f.message << "\"\n";
  }

  nlohmann::json summary;
  summary["master_seed"] = config.master_seed;
  summary["record_count"] = result.records.size();
  summary["failure_count"] = result.failures.size();
  nlohmann::json medians = nlohmann::json::array();
  for (const std::string& cls : config.input_classes) {
    for (double e : config.energies) {
      nlohmann::json row;
      row["input_class"] = cls;
      row["energy"] = e;
      try {
        row["median_abs_z"] = median_abs_z(result.records, cls, e, std::nullopt);
      } catch (const std::exception&) {
        row["median_abs_z"] = nullptr;
      }
      medians.push_back(row);
    }
  }
  summary["median_abs_z_by_energy"] = medians;
  nlohmann::json cross = nlohmann::json::array();
  for (const CrossRow& row : result.cross) {
    nlohmann::json r;
    r["system_label"] = row.system_label;
    r["w_hz"] = row.w_hz;
    r["mean_offdiagonal"] = row.mean_offdiagonal;
    cross.push_back(r);
  }
  summary["cross_products"] = cross;
  std::ofstream out(path("summary.json"));
  if (!out) throw std::runtime_error("cannot open summary.json for writing");
  out << summary.dump(2) << "\n";
}

}  // namespace slepvolt
