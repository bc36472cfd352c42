// Command-line front end: DPSS generation, test-system construction, input
// synthesis, simulation, suppression-bound reports, least-squares kernel
// identification, inner-product detection, and the full experiment harness.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "slepvolt/bounds.hpp"
#include "slepvolt/detector.hpp"
#include "slepvolt/geometry.hpp"
#include "slepvolt/harness.hpp"
#include "slepvolt/identify.hpp"
#include "slepvolt/io.hpp"
#include "slepvolt/laguerre.hpp"
#include "slepvolt/signals.hpp"
#include "slepvolt/slepian.hpp"
#include "slepvolt/volterra.hpp"

namespace fs = std::filesystem;
using namespace slepvolt;

namespace {

std::string sibling_path(const std::string& out, const std::string& suffix) {
  fs::path p(out);
  const std::string ext = p.has_extension() ? p.extension().string() : ".csv";
  fs::path q = p.parent_path() / (p.stem().string() + suffix + ext);
  return q.string();
}

int next_pow2(int n) {
  int g = 1;
  while (g < n) g *= 2;
  return g;
}

void write_signal_csv(const std::string& path, const std::vector<double>& u,
                      const std::map<std::string, std::string>& metadata) {
  CsvTable table;
  table.schema = "signal";
  table.metadata = metadata;
  table.columns = {"t", "u"};
  for (std::size_t t = 0; t < u.size(); ++t)
    table.add_row({static_cast<double>(t), u[t]});
  write_csv(path, table);
}

// First column named u/y/y0, else the first non-index column.
std::vector<double> signal_column(const CsvTable& table) {
  for (const char* name : {"u", "y", "y0"}) {
    if (std::find(table.columns.begin(), table.columns.end(), name) !=
        table.columns.end())
      return column(table, name);
  }
  for (const std::string& name : table.columns)
    if (name != "t") return column(table, name);
  throw std::runtime_error("no signal column found (expected one of u, y, y0)");
}

void add_geometry_options(CLI::App* cmd, Geometry& geo) {
  cmd->add_option("--n", geo.n, "Samples per record");
  cmd->add_option("--dt", geo.dt, "Sample period in seconds");
  cmd->add_option("--f0", geo.f0_hz, "Band center / carrier in Hz");
  cmd->add_option("--fr", geo.fr_hz, "Tone spacing / knee scale in Hz");
}

nlohmann::json suprema_json(const SupremaReport& sup) {
  nlohmann::json j;
  j["type"] = "suprema";
  j["gamma_star"] = sup.gamma_star;
  j["gamma_prime_star"] = sup.gamma_prime_star;
  j["gamma_double_star"] = sup.gamma_double_star;
  j["gamma1_prime_double_star"] = sup.gamma1_prime_double_star;
  j["v_m_star"] = sup.v_m_star;
  j["lambda_min"] = sup.lambda_min;
  return j;
}

nlohmann::json report_json(const BoundReport& r) {
  nlohmann::json j;
  j["type"] = "bound_report";
  j["order"] = r.order;
  j["frequency"] = r.frequency;
  j["bound_a"] = r.bound_a;
  j["bound_b"] = r.bound_b;
  j["bound_c"] = r.bound_c;
  j["j_b"] = r.j_b;
  j["j_b_closed_form"] = r.j_b_closed_form;
  j["delta_prime"] = r.delta_prime;
  j["suppression_scale"] = r.suppression_scale;
  if (r.epsilon) j["epsilon"] = *r.epsilon;
  else j["epsilon"] = nullptr;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Slepian-sequence toolkit: band-concentrated probes, separable Volterra "
      "simulation, suppression bounds, and the narrowband detection experiment"};
  app.require_subcommand(1);

  // ---- dpss gen -------------------------------------------------------------
  auto* dpss = app.add_subcommand("dpss", "Discrete prolate spheroidal sequences");
  dpss->require_subcommand(1);
  {
    auto* gen = dpss->add_subcommand("gen", "Generate sequences and eigenvalues");
    auto n = std::make_shared<int>(0);
    auto nw = std::make_shared<double>(0.0);
    auto k = std::make_shared<int>(0);
    auto grid = std::make_shared<int>(0);
    auto out = std::make_shared<std::string>();
    gen->add_option("--n", *n, "Sequence length N")->required();
    gen->add_option("--nw", *nw, "Time-bandwidth product NW")->required();
    gen->add_option("--k", *k, "Number of sequences K")->required();
    gen->add_option("--grid", *grid,
                    "Also recompute eigenvalues by band quadrature on this grid");
    gen->add_option("--out", *out, "Output CSV (columns k, t, v)")->required();
    gen->callback([=]() {
      const DpssSet set = generate_dpss(*n, *nw, *k);
      CsvTable seq;
      seq.schema = "dpss_sequences";
      seq.metadata["n"] = format_g17(set.n);
      seq.metadata["nw"] = format_g17(set.nw);
      seq.metadata["k"] = format_g17(static_cast<double>(k ? *k : 0));
      seq.metadata["w"] = format_g17(set.w);
      seq.columns = {"k", "t", "v"};
      for (int kk = 0; kk < static_cast<int>(set.sequences.size()); ++kk)
        for (int t = 0; t < set.n; ++t)
          seq.add_row({static_cast<double>(kk), static_cast<double>(t),
                       set.sequences[static_cast<std::size_t>(kk)][static_cast<std::size_t>(t)]});
      write_csv(*out, seq);

      CsvTable eig;
      eig.schema = "dpss_eigenvalues";
      eig.metadata = seq.metadata;
      std::vector<double> quad;
      if (*grid > 0) quad = eigenvalues_via_quadrature(set, *grid);
      eig.columns = quad.empty() ? std::vector<std::string>{"k", "lambda"}
                                 : std::vector<std::string>{"k", "lambda", "lambda_quad"};
      for (int kk = 0; kk < static_cast<int>(set.eigenvalues.size()); ++kk) {
        if (quad.empty())
          eig.add_row({static_cast<double>(kk), set.eigenvalues[static_cast<std::size_t>(kk)]});
        else
          eig.add_row({static_cast<double>(kk), set.eigenvalues[static_cast<std::size_t>(kk)],
                       quad[static_cast<std::size_t>(kk)]});
      }
      write_csv(sibling_path(*out, "-eigenvalues"), eig);
      std::cout << "wrote " << *out << " and " << sibling_path(*out, "-eigenvalues")
                << "\n";
    });
  }

  // ---- system build ----------------------------------------------------------
  auto* system_cmd = app.add_subcommand("system", "Cubic test systems");
  system_cmd->require_subcommand(1);
  {
    auto* build = system_cmd->add_subcommand("build", "Build a test system");
    auto label = std::make_shared<std::string>();
    auto ho_scale = std::make_shared<double>(4e-6);
    auto out = std::make_shared<std::string>();
    auto num_fn = std::make_shared<int>(50);
    auto geo = std::make_shared<Geometry>();
    auto opts = std::make_shared<AlternateOptions>();
    build->add_option("--label", *label, "System label: null or alternate")
        ->required()
        ->check(CLI::IsMember({"null", "alternate"}));
    build->add_option("--ho-scale", *ho_scale, "Higher-order response scale");
    build->add_option("--out", *out, "Output coefficient CSV (k, c1, c2, c3)")
        ->required();
    build->add_option("--basis-functions", *num_fn, "Dictionary size");
    add_geometry_options(build, *geo);
    build->add_flag("--decaying-bump", opts->decaying_bump,
                    "Use the |f|^-3 form of the order-1 deviation");
    build->add_option("--delta-amplitude", opts->delta_amplitude,
                      "Order-1 deviation amplitude");
    build->callback([=]() {
      const LaguerreBasis basis = build_basis(*num_fn, geo->n, geo->dt);
      const SystemSpec spec = (*label == "null")
                                  ? make_null_system(basis, *ho_scale, *geo)
                                  : make_alternate_system(basis, *ho_scale, *opts, *geo);
      write_system_csv(*out, spec, basis);
      std::cout << "wrote " << *out << "\n";
    });
  }

  // ---- input gen ---------------------------------------------------------------
  auto* input_cmd = app.add_subcommand("input", "Probe and excitation signals");
  input_cmd->require_subcommand(1);
  {
    auto* gen = input_cmd->add_subcommand("gen", "Generate one input record");
    auto cls = std::make_shared<std::string>();
    auto spec = std::make_shared<InputSpec>();
    auto order = std::make_shared<int>(-1);
    auto out = std::make_shared<std::string>();
    gen->add_option("--class", *cls,
                    "gaussian_white | m_sequence | ssr | modulated_dpss")
        ->required();
    gen->add_option("--energy", spec->target_energy, "Target signal energy");
    gen->add_option("--w-hz", spec->half_bandwidth_hz, "Half bandwidth in Hz");
    gen->add_option("--seed", spec->seed, "Random seed");
    gen->add_option("--order", *order, "DPSS order (modulated_dpss only)");
    add_geometry_options(gen, spec->geometry);
    gen->add_option("--out", *out, "Output CSV (t, u)")->required();
    gen->callback([=]() {
      spec->input_class = input_class_from_string(*cls);
      if (*order >= 0) spec->dpss_order = *order;
      const std::vector<double> u = generate_input(*spec);
      std::map<std::string, std::string> meta;
      meta["class"] = *cls;
      meta["energy"] = format_g17(spec->target_energy);
      meta["w_hz"] = format_g17(spec->half_bandwidth_hz);
      meta["seed"] = std::to_string(spec->seed);
      meta["sample_period"] = format_g17(spec->geometry.dt);
      if (spec->dpss_order) meta["dpss_order"] = std::to_string(*spec->dpss_order);
      write_signal_csv(*out, u, meta);
      std::cout << "wrote " << *out << "\n";
    });
  }

  // ---- simulate -----------------------------------------------------------------
  {
    auto* sim = app.add_subcommand("simulate", "Drive a system with an input record");
    auto system_path = std::make_shared<std::string>();
    auto input_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto per_order = std::make_shared<bool>(false);
    auto grid = std::make_shared<int>(0);
    sim->add_option("--system", *system_path, "System coefficient CSV")->required();
    sim->add_option("--input", *input_path, "Input CSV (t, u)")->required();
    sim->add_option("--out", *out, "Output CSV (t, y...)")->required();
    sim->add_flag("--per-order", *per_order, "Also write per-order spectra");
    sim->add_option("--grid", *grid, "Spectrum grid size for --per-order");
    sim->callback([=]() {
      LaguerreBasis basis;
      const SystemSpec spec = read_system_csv(*system_path, &basis);
      const SeparableSystem sys = assemble_system(basis, spec);
      const std::vector<double> u = signal_column(read_csv(*input_path));
      const auto y = evaluate_time_domain(sys, {u});

      CsvTable table;
      table.schema = "simulation";
      table.metadata["system_label"] = spec.label;
      table.metadata["sample_period"] = format_g17(basis.sample_period);
      table.columns = {"t"};
      for (int m = 0; m < sys.num_outputs(); ++m)
        table.columns.push_back("y" + std::to_string(m));
      for (std::size_t t = 0; t < y[0].size(); ++t) {
        std::vector<double> row{static_cast<double>(t)};
        for (const auto& channel : y) row.push_back(channel[t]);
        table.rows.push_back(row);
      }
      write_csv(*out, table);
      std::cout << "wrote " << *out << "\n";

      if (*per_order) {
        const int min_grid = static_cast<int>(u.size()) + sys.max_lag();
        const int g = std::max(*grid, next_pow2(min_grid));
        const ResponseSpectrum rs = response_spectrum(sys, {u}, g);
        CsvTable sp;
        sp.schema = "per_order_spectra";
        sp.metadata["grid_size"] = std::to_string(g);
        sp.metadata["sample_period"] = format_g17(basis.sample_period);
        sp.columns = {"f", "re_total", "im_total"};
        for (int q = 1; q <= static_cast<int>(rs.per_order.size()); ++q) {
          sp.columns.push_back("re_o" + std::to_string(q));
          sp.columns.push_back("im_o" + std::to_string(q));
        }
        for (int i = 0; i < rs.total.size; ++i) {
          std::vector<double> row{rs.total.freq[static_cast<std::size_t>(i)],
                                  rs.total.value[static_cast<std::size_t>(i)].real(),
                                  rs.total.value[static_cast<std::size_t>(i)].imag()};
          for (const SpectrumGrid& gq : rs.per_order) {
            row.push_back(gq.value[static_cast<std::size_t>(i)].real());
            row.push_back(gq.value[static_cast<std::size_t>(i)].imag());
          }
          sp.rows.push_back(row);
        }
        write_csv(sibling_path(*out, "-orders"), sp);
        std::cout << "wrote " << sibling_path(*out, "-orders") << "\n";
      }
    });
  }

  // ---- bounds --------------------------------------------------------------------
  auto* bounds_cmd = app.add_subcommand("bounds", "Higher-order suppression bounds");
  bounds_cmd->require_subcommand(1);
  {
    auto* fig1 = bounds_cmd->add_subcommand(
        "fig1", "Random-tuple sweep of the band integral J against its envelope");
    auto n = std::make_shared<int>(256);
    auto nw = std::make_shared<double>(4.0);
    auto m = std::make_shared<int>(6);
    auto draws = std::make_shared<int>(25);
    auto seed = std::make_shared<std::uint64_t>(1);
    auto orders = std::make_shared<std::vector<int>>(std::vector<int>{3, 4, 5, 6});
    auto out = std::make_shared<std::string>();
    fig1->add_option("--n", *n, "Sequence length N");
    fig1->add_option("--nw", *nw, "Time-bandwidth product NW");
    fig1->add_option("--m", *m, "Number of sequences drawn from");
    fig1->add_option("--draws", *draws, "Random tuples per order");
    fig1->add_option("--seed", *seed, "Random seed");
    fig1->add_option("--orders", *orders, "Orders Q to sweep")->delimiter(',');
    fig1->add_option("--out", *out, "Output CSV (Q, draw, max_abs_J, J_B, closed_form)")
        ->required();
    fig1->callback([=]() {
      const std::vector<JSweepRow> rows = run_j_sweep(*n, *nw, *m, *orders, *draws, *seed);
      CsvTable table;
      table.schema = "j_sweep";
      table.metadata["n"] = std::to_string(*n);
      table.metadata["nw"] = format_g17(*nw);
      table.metadata["m"] = std::to_string(*m);
      table.metadata["seed"] = std::to_string(*seed);
      table.columns = {"Q", "draw", "max_abs_J", "J_B", "closed_form"};
      for (const JSweepRow& r : rows)
        table.add_row({static_cast<double>(r.q), static_cast<double>(r.draw),
                       r.max_abs_j, r.j_b, r.closed_form});
      write_csv(*out, table);
      std::cout << "wrote " << *out << " (" << rows.size() << " rows)\n";
    });

    auto* report = bounds_cmd->add_subcommand(
        "report", "Assembled per-order output bounds for a system");
    auto system_path = std::make_shared<std::string>();
    auto rn = std::make_shared<int>(240);
    auto rnw = std::make_shared<double>(4.0);
    auto rk = std::make_shared<int>(6);
    auto grid = std::make_shared<int>(4096);
    auto frequency = std::make_shared<double>(0.0);
    auto alpha = std::make_shared<double>(0.0);
    auto beta = std::make_shared<double>(0.0);
    auto gamma = std::make_shared<double>(0.0);
    auto format = std::make_shared<std::string>("jsonl");
    auto rout = std::make_shared<std::string>();
    report->add_option("--system", *system_path, "System coefficient CSV")->required();
    report->add_option("--n", *rn, "Probe sequence length N");
    report->add_option("--nw", *rnw, "Probe time-bandwidth product NW");
    report->add_option("--k", *rk, "Probe set size");
    report->add_option("--grid", *grid, "Envelope integral grid size");
    report->add_option("--frequency", *frequency, "Report frequency stamp");
    auto* oa = report->add_option("--alpha", *alpha, "Order-1 growth constant");
    auto* ob = report->add_option("--beta", *beta, "In-band growth constant");
    auto* og = report->add_option("--gamma", *gamma, "Out-of-band growth constant");
    report->add_option("--format", *format, "jsonl or csv")
        ->check(CLI::IsMember({"jsonl", "csv"}));
    report->add_option("--out", *rout, "Output file")->required();
    report->callback([=]() {
      LaguerreBasis basis;
      const SystemSpec spec = read_system_csv(*system_path, &basis);
      const SeparableSystem sys = assemble_system(basis, spec);
      const DpssSet set = generate_dpss(*rn, *rnw, *rk);
      const SupremaReport sup = measure_suprema(sys, set);

      const int provided = static_cast<int>(oa->count() > 0) +
                           static_cast<int>(ob->count() > 0) +
                           static_cast<int>(og->count() > 0);
      if (provided != 0 && provided != 3)
        throw CLI::ValidationError(
            "--alpha, --beta and --gamma must be given together");
      std::optional<double> eps;
      if (provided == 3)
        eps = truncation_epsilon(*alpha, *beta, *gamma, *rk, set.w, sup.lambda_min,
                               sup.v_m_star);

      std::vector<BoundReport> reports;
      for (int q = 2; q <= sys.max_order(); ++q) {
        const JBoundResult jb = compute_jb(set, q, *rk, *grid);
        reports.push_back(bound_c(q, *rk, set.w, sup, *frequency, jb.value, eps));
      }

      std::ofstream file(*rout);
      if (!file) throw std::runtime_error("cannot open '" + *rout + "' for writing");
      if (*format == "jsonl") {
        file << suprema_json(sup).dump() << "\n";
        for (const BoundReport& r : reports) file << report_json(r).dump() << "\n";
      } else {
        file << "# schema bound_report v1\n";
        file << "order,frequency,bound_a,bound_b,bound_c,j_b,j_b_closed_form,"
                "delta_prime,suppression_scale,epsilon\n";
        for (const BoundReport& r : reports) {
          file << r.order << ',' << format_g17(r.frequency) << ','
               << format_g17(r.bound_a) << ',' << format_g17(r.bound_b) << ','
               << format_g17(r.bound_c) << ',' << format_g17(r.j_b) << ','
               << format_g17(r.j_b_closed_form) << ',' << format_g17(r.delta_prime)
               << ',' << format_g17(r.suppression_scale) << ','
               << (r.epsilon ? format_g17(*r.epsilon) : std::string()) << "\n";
        }
      }
      std::cout << "wrote " << *rout << " (" << reports.size() << " orders)\n";
    });
  }

  // ---- identify --------------------------------------------------------------------
  {
    auto* ident = app.add_subcommand(
        "identify", "Least-squares kernel identification from an input/output pair");
    auto input_path = std::make_shared<std::string>();
    auto output_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto num_fn = std::make_shared<int>(50);
    auto dt = std::make_shared<double>(0.0);
    ident->add_option("--input", *input_path, "Input CSV (t, u)")->required();
    ident->add_option("--output", *output_path, "Output CSV (t, y)")->required();
    ident->add_option("--out", *out, "Identified coefficient CSV")->required();
    ident->add_option("--basis-functions", *num_fn, "Dictionary size");
    ident->add_option("--dt", *dt, "Sample period override in seconds");
    ident->callback([=]() {
      const CsvTable in_table = read_csv(*input_path);
      const std::vector<double> u = signal_column(in_table);
      const std::vector<double> y = signal_column(read_csv(*output_path));
      double period = *dt;
      if (period <= 0.0 && in_table.metadata.count("sample_period"))
        period = metadata_number(in_table, "sample_period");
      if (period <= 0.0) period = Geometry{}.dt;

      const LaguerreBasis basis =
          build_basis(*num_fn, static_cast<int>(u.size()), period);
      const IdentificationResult fit = least_squares_identify(u, y, basis);

      CsvTable table;
      table.schema = "system_coeffs";
      table.metadata["label"] = "identified";
      table.metadata["ho_scale"] = format_g17(1.0);
      table.metadata["num_functions"] = std::to_string(basis.num_functions());
      table.metadata["n_samples"] = std::to_string(basis.n_samples());
      table.metadata["sample_period"] = format_g17(basis.sample_period);
      table.metadata["residual_norm"] = format_g17(fit.residual_norm);
      table.metadata["rank"] = std::to_string(fit.rank);
      table.metadata["condition_estimate"] = format_g17(fit.condition_estimate);
      table.metadata["rank_deficient"] = fit.rank_deficient ? "true" : "false";
      table.columns = {"k", "c1", "c2", "c3"};
      for (int k = 0; k < basis.num_functions(); ++k)
        table.add_row({static_cast<double>(k), fit.c1[k], fit.c2[k], fit.c3[k]});
      write_csv(*out, table);
      std::cout << "wrote " << *out << " (residual " << fit.residual_norm << ", rank "
                << fit.rank << ")\n";
    });
  }

  // ---- detect ----------------------------------------------------------------------
  {
    auto* detect = app.add_subcommand(
        "detect", "Inner-product responses of output records against probe records");
    auto outputs_dir = std::make_shared<std::string>();
    auto probes_dir = std::make_shared<std::string>();
    auto null_label = std::make_shared<std::string>("null");
    auto out = std::make_shared<std::string>();
    detect->add_option("--outputs", *outputs_dir,
                       "Directory of output CSVs with probe= and label= metadata")
        ->required();
    detect->add_option("--probes", *probes_dir, "Directory of probe CSVs")->required();
    detect->add_option("--null-label", *null_label,
                       "Label whose records form the normalization ensemble");
    detect->add_option("--out", *out, "Detection record CSV")->required();
    detect->callback([=]() {
      struct Row {
        std::string file, probe, label;
        double raw = 0.0;
        std::optional<double> z;
      };
      std::vector<std::string> files;
      for (const auto& entry : fs::directory_iterator(*outputs_dir))
        if (entry.path().extension() == ".csv") files.push_back(entry.path().string());
      std::sort(files.begin(), files.end());
      if (files.empty())
        throw std::runtime_error("no .csv files in '" + *outputs_dir + "'");

      std::map<std::string, std::vector<double>> probe_cache;
      std::vector<Row> rows;
      for (const std::string& file : files) {
        const CsvTable table = read_csv(file);
        Row row;
        row.file = fs::path(file).filename().string();
        row.probe = metadata_string(table, "probe");
        row.label = metadata_string(table, "label");
        auto it = probe_cache.find(row.probe);
        if (it == probe_cache.end()) {
          const std::string probe_path = (fs::path(*probes_dir) / row.probe).string();
          it = probe_cache.emplace(row.probe, signal_column(read_csv(probe_path))).first;
        }
        row.raw = inner_product_response(signal_column(table), it->second);
        rows.push_back(std::move(row));
      }

      std::map<std::string, std::vector<double>> null_pools;
      for (const Row& row : rows)
        if (row.label == *null_label) null_pools[row.probe].push_back(row.raw);
      for (Row& row : rows) {
        const auto it = null_pools.find(row.probe);
        if (it != null_pools.end() && it->second.size() >= 2)
          row.z = normalize_against_null({row.raw}, it->second)[0];
      }

      std::ofstream file(*out);
      if (!file) throw std::runtime_error("cannot open '" + *out + "' for writing");
      file << "# schema detect_records v1\n";
      file << "file,probe,label,raw_response,normalized_response\n";
      for (const Row& row : rows)
        file << row.file << ',' << row.probe << ',' << row.label << ','
             << format_g17(row.raw) << ','
             << (row.z ? format_g17(*row.z) : std::string()) << "\n";
      std::cout << "wrote " << *out << " (" << rows.size() << " records)\n";
    });
  }

  // ---- harness -----------------------------------------------------------------------
  auto* harness_cmd = app.add_subcommand("harness", "Full detection experiment");
  harness_cmd->require_subcommand(1);
  {
    auto* run = harness_cmd->add_subcommand("run", "Run the experiment matrix");
    auto config_path = std::make_shared<std::string>();
    auto out_dir = std::make_shared<std::string>();
    run->add_option("--config", *config_path, "Flat key = value config file");
    run->add_option("--out", *out_dir, "Output directory")->required();
    run->callback([=]() {
      const ExperimentConfig config = config_path->empty()
                                          ? ExperimentConfig{}
                                          : load_experiment_config(*config_path);
      const ExperimentResult result = run_experiment(config);
      emit_plot_data(result, config, *out_dir);
      std::cout << "records: " << result.records.size() << "\n";
      std::cout << "failures: " << result.failures.size() << "\n";
      for (const std::string& cls : config.input_classes) {
        for (double e : config.energies) {
          try {
            std::cout << "median |z| " << cls << " @ E=" << e << ": "
                      << median_abs_z(result.records, cls, e, std::nullopt) << "\n";
          } catch (const std::exception&) {
          }
        }
      }
      for (const CrossRow& row : result.cross)
        std::cout << "cross " << row.system_label << " @ W=" << row.w_hz << " Hz: "
                  << row.mean_offdiagonal << "\n";
      std::cout << "wrote " << *out_dir << "\n";
    });

    auto* tmpl = harness_cmd->add_subcommand("template", "Write a default config file");
    auto out = std::make_shared<std::string>();
    tmpl->add_option("--out", *out, "Config file path")->required();
    tmpl->callback([=]() {
      const ExperimentConfig d;
      std::ofstream file(*out);
      if (!file) throw std::runtime_error("cannot open '" + *out + "' for writing");
      file << "# Experiment configuration (flat key = value pairs).\n";
      file << "n = " << d.geometry.n << "\n";
      file << "sample_period = " << format_g17(d.geometry.dt) << "\n";
      file << "center_hz = " << format_g17(d.geometry.f0_hz) << "\n";
      file << "fr_hz = " << format_g17(d.geometry.fr_hz) << "\n";
      file << "energies = 4e3, 4e4, 4e6\n";
      file << "ho_scales = 2e-6, 4e-6, 6e-6\n";
      file << "w_hz = 0.5, 0.75, 1.0\n";
      file << "repetitions = " << d.repetitions << "\n";
      file << "master_seed = " << d.master_seed << "\n";
      file << "analysis_grid = " << d.analysis_grid << "\n";
      file << "noise_variance = " << format_g17(d.noise_variance) << "\n";
      file << "input_classes = gaussian_white, m_sequence, ssr, modulated_dpss\n";
      file << "system_labels = null, alternate\n";
      file << "num_basis_functions = " << d.num_basis_functions << "\n";
      file << "scaling_mode = " << d.scaling_mode << "\n";
      file << "sd_target = " << format_g17(d.sd_target) << "\n";
      file << "cross_energy = " << format_g17(d.cross_energy) << "\n";
      file << "cross_scale = " << format_g17(d.cross_scale) << "\n";
      std::cout << "wrote " << *out << "\n";
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
