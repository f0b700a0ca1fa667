#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "focksep/config.hpp"
#include "focksep/diagnostics.hpp"
#include "focksep/grid.hpp"
#include "focksep/kernel.hpp"
#include "focksep/parallel.hpp"
#include "focksep/radial_law.hpp"
#include "focksep/report_io.hpp"
#include "focksep/rng.hpp"
#include "focksep/sampler.hpp"
#include "focksep/verification.hpp"
#include "focksep/weight.hpp"

namespace {

using focksep::RunConfig;
using ordered_json = nlohmann::ordered_json;

struct CommonFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  int workers = -1;
  std::string out_dir;
  std::string format;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file");
  cmd->add_option("--seed", flags.seed, "base seed (overrides config)");
  cmd->add_option("--workers", flags.workers, "worker count, 0 = hardware (overrides config)");
  cmd->add_option("--out", flags.out_dir, "output directory (overrides config)");
  cmd->add_option("--format", flags.format, "json, csv or svg (overrides config)");
}

RunConfig load_config(const CLI::App* cmd, const CommonFlags& flags) {
  std::string text = "{}";
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) throw focksep::IoError("cannot read config: " + flags.config_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  RunConfig cfg = focksep::parse_config(text);
  if (cmd->count("--seed")) cfg.seed = flags.seed;
  if (cmd->count("--workers")) cfg.workers = flags.workers;
  if (cmd->count("--out")) cfg.out_dir = flags.out_dir;
  if (cmd->count("--format")) cfg.format = flags.format;
  focksep::par::set_workers(cfg.workers);
  return cfg;
}

ordered_json report_head(const char* command, const RunConfig& cfg) {
  ordered_json doc;
  doc["schema_version"] = 1;
  doc["command"] = command;
  doc["weight"] = ordered_json(cfg.weight_spec);
  doc["seed"] = cfg.seed;
  return doc;
}

std::filesystem::path out_path(const RunConfig& cfg, const std::string& file) {
  return std::filesystem::path(cfg.out_dir) / file;
}

void emit_json(const RunConfig& cfg, const std::string& name, const ordered_json& doc) {
  focksep::io::write_file(out_path(cfg, name + ".json"), focksep::io::to_json_text(doc));
}

int run_classify(const CLI::App* cmd, const CommonFlags& flags) {
  const RunConfig cfg = load_config(cmd, flags);
  const auto rep = focksep::classify_critical_sum(cfg.weight(), cfg.classify.n_max);

  ordered_json doc = report_head("classify", cfg);
  doc["n_max"] = rep.n_max;
  doc["verdict"] = focksep::verdict_name(rep.verdict);
  doc["degenerate"] = rep.degenerate;
  doc["analytic"] = rep.analytic;
  doc["fitted_tail_exponent"] = rep.fitted_tail_exponent;
  doc["undecided_band"] = rep.undecided_band;
  doc["rho"] = rep.rho_values;
  doc["summands"] = rep.summands;
  doc["partial_sums"] = rep.partial_sums;

  const auto fmt = focksep::io::parse_format(cfg.format);
  if (fmt == focksep::io::EmitFormat::Svg)
    throw focksep::UnsupportedFormat("classify has no svg output");
  if (fmt == focksep::io::EmitFormat::Json) {
    emit_json(cfg, "classify", doc);
  } else {
    std::string csv = "n,rho,summand,partial_sum\n";
    for (int n = 1; n <= rep.n_max; ++n)
      csv += std::to_string(n) + "," + focksep::io::fmt17(rep.rho_values[n - 1]) + "," +
             focksep::io::fmt17(rep.summands[n - 1]) + "," +
             focksep::io::fmt17(rep.partial_sums[n - 1]) + "\n";
    focksep::io::write_file(out_path(cfg, "classify.csv"), csv);
  }
  std::cout << "classify: verdict " << focksep::verdict_name(rep.verdict)
            << (rep.degenerate ? " (degenerate)" : "") << ", tail exponent "
            << rep.fitted_tail_exponent << "\n";
  return 0;
}

int run_rho(const CLI::App* cmd, const CommonFlags& flags) {
  const RunConfig cfg = load_config(cmd, flags);
  const focksep::RadialWeight w = cfg.weight();
  ordered_json doc = report_head("rho", cfg);
  ordered_json rows = ordered_json::array();
  std::string csv = "x,rho,mass_residual\n";
  for (double x : cfg.rho.x_list) {
    const double rho = focksep::rho_at(w, x);
    const double residual = focksep::disk_mass(w, x, rho) - 1.0;
    ordered_json row;
    row["x"] = x;
    row["rho"] = rho;
    row["mass_residual"] = residual;
    rows.push_back(row);
    csv += focksep::io::fmt17(x) + "," + focksep::io::fmt17(rho) + "," +
           focksep::io::fmt17(residual) + "\n";
    std::cout << "rho(" << x << ") = " << rho << "\n";
  }
  doc["rows"] = rows;
  const auto fmt = focksep::io::parse_format(cfg.format);
  if (fmt == focksep::io::EmitFormat::Svg)
    throw focksep::UnsupportedFormat("rho has no svg output");
  if (fmt == focksep::io::EmitFormat::Json)
    emit_json(cfg, "rho", doc);
  else
    focksep::io::write_file(out_path(cfg, "rho.csv"), csv);
  return 0;
}

int run_sample(const CLI::App* cmd, const CommonFlags& flags) {
  const RunConfig cfg = load_config(cmd, flags);
  const focksep::RadialWeight w = cfg.weight();
  focksep::PointSample sample;
  if (cfg.sample.kind == "hybrid")
    sample = focksep::sample_hybrid(w, cfg.sample.R, cfg.seed, cfg.sample.eps);
  else
    sample = focksep::sample_poisson(w, cfg.sample.R, cfg.seed, cfg.sample.intensity_scale);

  const auto fmt = focksep::io::parse_format(cfg.format);
  if (fmt == focksep::io::EmitFormat::Json) {
    ordered_json doc = report_head("sample", cfg);
    doc["kind"] = cfg.sample.kind;
    doc["R"] = sample.window_R;
    doc["truncation_K"] = sample.truncation_K;
    doc["count"] = sample.points.size();
    ordered_json pts = ordered_json::array();
    for (const auto& p : sample.points)
      pts.push_back(ordered_json::array({p.modulus, p.angle, p.source_k}));
    doc["points"] = pts;
    emit_json(cfg, "sample", doc);
    focksep::io::write_file(out_path(cfg, "sample.jsonl"), focksep::to_jsonl(sample));
  } else if (fmt == focksep::io::EmitFormat::Csv) {
    focksep::io::write_file(out_path(cfg, "sample.csv"), focksep::to_csv(sample));
  } else {
    focksep::io::write_file(out_path(cfg, "sample.svg"), focksep::to_svg(sample));
  }
  std::cout << "sample: " << sample.points.size() << " points in window R = "
            << sample.window_R << "\n";
  return 0;
}

int run_collide(const CLI::App* cmd, const CommonFlags& flags) {
  const RunConfig cfg = load_config(cmd, flags);
  focksep::ExperimentConfig ex;
  ex.weight = cfg.weight();
  ex.R_list = {cfg.collide.R};
  ex.trials = cfg.collide.trials;
  ex.scales = cfg.collide.scales;
  ex.shifted = cfg.collide.shifted;
  ex.base_seed = cfg.seed;
  const auto rep = focksep::collision_frequencies(ex);

  ordered_json doc = report_head("collide", cfg);
  doc["R"] = rep.window_R;
  doc["trials"] = rep.trials;
  doc["min_sep_median"] = rep.min_sep_median;
  ordered_json rows = ordered_json::array();
  std::string csv = "scale_l,shifted,n,cells,mu,freq,ci_lo,ci_hi,proxy,pb_predicted,hits,trials\n";
  for (const auto& row : rep.rows) {
    ordered_json r;
    r["scale_l"] = row.scale_l;
    r["shifted"] = row.shifted;
    r["n"] = row.n;
    r["cells"] = row.cells;
    r["mu"] = row.mu;
    r["freq"] = row.freq;
    r["ci_lo"] = row.ci_lo;
    r["ci_hi"] = row.ci_hi;
    r["proxy"] = row.proxy;
    r["pb_predicted"] = row.pb_predicted;
    r["hits"] = row.hits;
    r["trials"] = row.trials;
    rows.push_back(r);
    csv += std::to_string(row.scale_l) + "," + (row.shifted ? "1," : "0,") +
           std::to_string(row.n) + "," + std::to_string(row.cells) + "," +
           focksep::io::fmt17(row.mu) + "," + focksep::io::fmt17(row.freq) + "," +
           focksep::io::fmt17(row.ci_lo) + "," + focksep::io::fmt17(row.ci_hi) + "," +
           focksep::io::fmt17(row.proxy) + "," + focksep::io::fmt17(row.pb_predicted) + "," +
           std::to_string(row.hits) + "," + std::to_string(row.trials) + "\n";
  }
  doc["rows"] = rows;
  {
    ordered_json sums = ordered_json::array();
    for (const auto& g : rep.grids) {
      ordered_json s;
      s["scale_l"] = g.scale_l;
      s["shifted"] = g.shifted;
      s["freq_partial_sum"] = g.freq_partial_sum;
      s["proxy_partial_sum"] = g.proxy_partial_sum;
      sums.push_back(s);
    }
    doc["grid_partial_sums"] = sums;
  }
  doc["min_separations"] = rep.min_separations;

  const auto fmt = focksep::io::parse_format(cfg.format);
  if (fmt == focksep::io::EmitFormat::Json) {
    emit_json(cfg, "collide", doc);
  } else if (fmt == focksep::io::EmitFormat::Csv) {
    focksep::io::write_file(out_path(cfg, "collide.csv"), csv);
  } else {
    // scatter of the first trial's realization
    const auto seed0 = focksep::rng::derive_key(cfg.seed, focksep::rng::kTagTrial, 0);
    const auto sample = focksep::sample_hybrid(ex.weight, ex.R_list.back(), seed0);
    focksep::io::write_file(out_path(cfg, "collide.svg"), focksep::to_svg(sample));
  }
  std::cout << "collide: " << rep.rows.size() << " annulus rows over " << rep.trials
            << " trials, min-sep median " << rep.min_sep_median << "\n";
  return 0;
}

int run_trace_identity(const CLI::App* cmd, const CommonFlags& flags) {
  const RunConfig cfg = load_config(cmd, flags);
  const focksep::RadialWeight w = cfg.weight();
  ordered_json doc = report_head("trace-identity", cfg);
  ordered_json rows = ordered_json::array();
  std::string csv = "n,sum_pk2,double_integral,rel_err,k_cut\n";
  int max_n = 1;
  for (int n : cfg.trace_identity.n_list) {
    const auto rep = focksep::trace_identity_check(w, n);
    ordered_json r;
    r["n"] = rep.n;
    r["sum_pk2"] = rep.sum_pk2;
    r["double_integral"] = rep.double_integral;
    r["rel_err"] = rep.rel_err;
    r["k_cut"] = rep.k_cut;
    rows.push_back(r);
    csv += std::to_string(rep.n) + "," + focksep::io::fmt17(rep.sum_pk2) + "," +
           focksep::io::fmt17(rep.double_integral) + "," + focksep::io::fmt17(rep.rel_err) +
           "," + std::to_string(rep.k_cut) + "\n";
    max_n = std::max(max_n, n);
    std::cout << "trace-identity n=" << n << ": sum " << rep.sum_pk2 << " vs integral "
              << rep.double_integral << " (rel err " << rep.rel_err << ")\n";
  }
  doc["rows"] = rows;
  {
    const auto model = focksep::build_kernel_model(w, static_cast<double>(max_n) + 1.0);
    const auto fit = focksep::kernel_decay_fit(model, std::max(1.0, 0.5 * max_n));
    ordered_json f;
    f["epsilon"] = fit.epsilon;
    f["points"] = fit.points;
    doc["decay_fit"] = f;
  }
  const auto fmt = focksep::io::parse_format(cfg.format);
  if (fmt == focksep::io::EmitFormat::Svg)
    throw focksep::UnsupportedFormat("trace-identity has no svg output");
  if (fmt == focksep::io::EmitFormat::Json)
    emit_json(cfg, "trace_identity", doc);
  else
    focksep::io::write_file(out_path(cfg, "trace_identity.csv"), csv);
  return 0;
}

int run_zero_one(const CLI::App* cmd, const CommonFlags& flags) {
  const RunConfig cfg = load_config(cmd, flags);
  focksep::ExperimentConfig ex;
  ex.weight = cfg.weight();
  ex.R_list = cfg.zero_one.R_list;
  ex.trials = cfg.zero_one.trials;
  ex.base_seed = cfg.seed;
  ex.shrink_factor = cfg.zero_one.shrink_factor;
  ex.stable_band = cfg.zero_one.stable_band;
  const auto rep = focksep::zero_one_experiment(ex);

  ordered_json doc = report_head("zero-one", cfg);
  doc["R_list"] = rep.R_list;
  doc["trials"] = ex.trials;
  {
    ordered_json a;
    a["verdict"] = focksep::verdict_name(rep.analytic.verdict);
    a["degenerate"] = rep.analytic.degenerate;
    a["analytic"] = rep.analytic.analytic;
    a["fitted_tail_exponent"] = rep.analytic.fitted_tail_exponent;
    doc["analytic"] = a;
  }
  doc["empirical_trend"] = focksep::trend_name(rep.trend);
  doc["medians"] = rep.medians;
  doc["thresholds"] = {{"shrink_factor", ex.shrink_factor}, {"stable_band", ex.stable_band}};
  ordered_json raw = ordered_json::array();
  for (const auto& series : rep.min_seps) raw.push_back(series);
  doc["min_separations"] = raw;

  const auto fmt = focksep::io::parse_format(cfg.format);
  if (fmt == focksep::io::EmitFormat::Json) {
    emit_json(cfg, "zero_one", doc);
  } else if (fmt == focksep::io::EmitFormat::Csv) {
    std::string csv = "R,trial,min_separation\n";
    for (std::size_t ri = 0; ri < rep.R_list.size(); ++ri)
      for (std::size_t t = 0; t < rep.min_seps[ri].size(); ++t)
        csv += focksep::io::fmt17(rep.R_list[ri]) + "," + std::to_string(t) + "," +
               focksep::io::fmt17(rep.min_seps[ri][t]) + "\n";
    focksep::io::write_file(out_path(cfg, "zero_one.csv"), csv);
  } else {
    // one scatter per window radius, drawn from the first trial's seed
    const auto seed0 = focksep::rng::derive_key(cfg.seed, focksep::rng::kTagTrial, 0);
    for (std::size_t ri = 0; ri < rep.R_list.size(); ++ri) {
      const auto sample = focksep::sample_hybrid(ex.weight, rep.R_list[ri], seed0);
      focksep::io::write_file(out_path(cfg, "zero_one_R" + std::to_string(ri) + ".svg"),
                              focksep::to_svg(sample));
    }
  }
  std::cout << "zero-one: analytic " << focksep::verdict_name(rep.analytic.verdict)
            << (rep.analytic.degenerate ? " (degenerate)" : "") << ", trend "
            << focksep::trend_name(rep.trend) << "\n";
  return 0;
}

int run_verify(const CLI::App* cmd, const CommonFlags& flags, const char* argv0) {
  const RunConfig cfg = load_config(cmd, flags);
  auto results = focksep::run_verification_suite({cfg.seed == 1 ? 20240801 : cfg.seed});

  std::string self = argv0;
  std::error_code ec;
  const auto exe = std::filesystem::read_symlink("/proc/self/exe", ec);
  if (!ec) self = exe.string();
  results.push_back(
      focksep::check_determinism(self, (out_path(cfg, "determinism_scratch")).string()));

  ordered_json doc = report_head("verify", cfg);
  ordered_json rows = ordered_json::array();
  bool all_pass = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
    all_pass = all_pass && r.pass;
    ordered_json row;
    row["name"] = r.name;
    row["pass"] = r.pass;
    row["detail"] = r.detail;
    row["seconds"] = r.seconds;
    rows.push_back(row);
  }
  doc["checks"] = rows;
  doc["all_pass"] = all_pass;
  emit_json(cfg, "verify", doc);
  return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid radial point-process separation toolkit"};
  app.require_subcommand(1);

  CommonFlags f_classify, f_rho, f_sample, f_collide, f_verify, f_trace, f_zero;
  auto* c_classify = app.add_subcommand("classify", "convergence of the critical sum");
  auto* c_rho = app.add_subcommand("rho", "unit-mass radii at requested centers");
  auto* c_sample = app.add_subcommand("sample", "draw one finite-window realization");
  auto* c_collide = app.add_subcommand("collide", "cell-collision Monte Carlo");
  auto* c_verify = app.add_subcommand("verify", "run the bound/identity verification suite");
  auto* c_trace = app.add_subcommand("trace-identity", "restriction-trace identity check");
  auto* c_zero = app.add_subcommand("zero-one", "separation trend experiment");
  add_common(c_classify, f_classify);
  add_common(c_rho, f_rho);
  add_common(c_sample, f_sample);
  add_common(c_collide, f_collide);
  add_common(c_verify, f_verify);
  add_common(c_trace, f_trace);
  add_common(c_zero, f_zero);

  CLI11_PARSE(app, argc, argv);

  if (const char* cache = std::getenv("FOCKSEP_CACHE_DIR"); cache && *cache)
    focksep::set_law_cache_dir(cache);

  try {
    if (c_classify->parsed()) return run_classify(c_classify, f_classify);
    if (c_rho->parsed()) return run_rho(c_rho, f_rho);
    if (c_sample->parsed()) return run_sample(c_sample, f_sample);
    if (c_collide->parsed()) return run_collide(c_collide, f_collide);
    if (c_verify->parsed()) return run_verify(c_verify, f_verify, argv[0]);
    if (c_trace->parsed()) return run_trace_identity(c_trace, f_trace);
    if (c_zero->parsed()) return run_zero_one(c_zero, f_zero);
  } catch (const focksep::SchemaError& e) {
    std::cerr << "config invalid:\n";
    for (const auto& v : e.violations())
      std::cerr << "  " << (v.pointer.empty() ? "(root)" : v.pointer) << ": " << v.message
                << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
