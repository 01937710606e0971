// spectra-sde command line: reproducible experiments over the simulation,
// training, analysis and forecasting modules, emitting plot-ready CSV/JSON.
//
// Exit codes: 0 success, 1 runtime/numerical failure, 2 usage error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ssde/estimators.hpp"
#include "ssde/forecast.hpp"
#include "ssde/io.hpp"
#include "ssde/nn.hpp"
#include "ssde/rmt.hpp"
#include "ssde/sde.hpp"
#include "ssde/spectral.hpp"
#include "ssde/svd.hpp"
#include "ssde/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace ssde;

namespace {

std::vector<int> parse_arch(const std::string& arch) {
  std::vector<int> dims;
  std::stringstream ss(arch);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    try {
      dims.push_back(std::stoi(part));
    } catch (const std::exception&) {
      throw DomainError("invalid arch string: " + arch);
    }
    if (dims.back() < 1) throw DomainError("invalid arch string: " + arch);
  }
  if (dims.size() < 2) throw DomainError("arch needs at least input and output dims: " + arch);
  return dims;
}

std::string arch_string(const std::vector<int>& dims) {
  std::string out;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(dims[i]);
  }
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DomainError("cannot create output directory " + dir);
}

std::vector<std::string> series_header(int n, const std::string& prefix,
                                       const std::vector<std::string>& fixed) {
  std::vector<std::string> h = fixed;
  for (int i = 1; i <= n; ++i) h.push_back(prefix + std::to_string(i));
  return h;
}

// ---- train records on disk ----

json train_config_json(const nn::TrainConfig& cfg) {
  return json{{"arch", arch_string(cfg.arch)},
              {"data", cfg.data},
              {"dataset_size", cfg.dataset_size},
              {"batch", cfg.batch},
              {"eta", cfg.eta},
              {"steps", cfg.steps},
              {"record_stride", cfg.record_stride},
              {"grad_stride", cfg.grad_stride},
              {"per_example_stride", cfg.per_example_stride},
              {"per_example_count", cfg.per_example_count},
              {"activation", nn::activation_name(cfg.activation)},
              {"seed", cfg.seed}};
}

nn::TrainConfig train_config_from_json(const json& j) {
  nn::TrainConfig cfg;
  cfg.arch = parse_arch(j.at("arch").get<std::string>());
  cfg.data = j.at("data").get<std::string>();
  cfg.dataset_size = j.at("dataset_size").get<int>();
  cfg.batch = j.at("batch").get<int>();
  cfg.eta = j.at("eta").get<double>();
  cfg.steps = j.at("steps").get<long>();
  cfg.record_stride = j.at("record_stride").get<int>();
  cfg.grad_stride = j.at("grad_stride").get<int>();
  cfg.per_example_stride = j.at("per_example_stride").get<int>();
  cfg.per_example_count = j.at("per_example_count").get<int>();
  cfg.activation = nn::parse_activation(j.at("activation").get<std::string>());
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

nn::TrainConfig load_record_config(const std::string& dir) {
  std::ifstream f(dir + "/config.json");
  if (!f) throw DomainError("missing config.json in record " + dir);
  json j;
  f >> j;
  return train_config_from_json(j);
}

std::string grad_path(const std::string& dir, long step, int layer) {
  return dir + "/grads/step" + std::to_string(step) + "_layer" + std::to_string(layer) + ".bin";
}

// Per-step squared singular values and projected gradients of one layer,
// recovered by a deterministic replay of the record's training run.
struct LayerSeries {
  Matrix lambda;     // steps x modes
  Matrix grad_proj;  // steps x modes, u_k^T (grad L) v_k
  int layer_rows = 0;
  int layer_cols = 0;
};

LayerSeries replay_layer_series(const nn::TrainConfig& cfg, int layer, int modes) {
  const int layers = static_cast<int>(cfg.arch.size()) - 1;
  if (layer < 1 || layer > layers) throw DomainError("layer index out of range");
  const int rows = cfg.arch[static_cast<std::size_t>(layer)];
  const int cols = cfg.arch[static_cast<std::size_t>(layer - 1)];
  const int rank = std::min(rows, cols);
  if (modes < 1 || modes > rank) throw DomainError("mode count exceeds layer rank");
  if (cfg.steps < 2) throw DomainError("record too short for series extraction");

  LayerSeries out;
  out.layer_rows = rows;
  out.layer_cols = cols;
  out.lambda.resize(cfg.steps, modes);
  out.grad_proj.resize(cfg.steps, modes);

  // shadow copy of the layer weights, advanced alongside the trainer via the
  // gradient sink (the sink fires before each update with the step's grads)
  RngStream init_rng(cfg.seed, "init");
  nn::MLP init = nn::init_mlp(cfg.arch, cfg.activation, init_rng);
  Matrix W = init.W[static_cast<std::size_t>(layer - 1)];

  nn::TrainConfig replay = cfg;
  replay.grad_stride = 1;
  replay.per_example_stride = 0;
  replay.record_stride = static_cast<int>(std::max<long>(cfg.steps, 1));
  nn::TrainSinks sinks;
  sinks.minibatch_grad = [&](long step, int lyr, const Matrix& grad) {
    if (lyr != layer || step >= cfg.steps) return;
    SvdResult svd = ssde::svd(rows >= cols ? W : Matrix(W.transpose()));
    const Matrix G = rows >= cols ? grad : Matrix(grad.transpose());
    for (int k = 0; k < modes; ++k) {
      out.lambda(step, k) = svd.s(k) * svd.s(k);
      out.grad_proj(step, k) = svd.U.col(k).dot(G * svd.V.col(k));
    }
    W -= cfg.eta * grad;
  };
  nn::sgd_train(replay, sinks);
  return out;
}

// ---- simulate ----

int cmd_simulate_matrix(int m, int n, double eta, double D, long steps, double dt,
                        std::uint64_t seed, const std::string& out_dir, long record_stride,
                        double init_var, bool dump_matrices) {
  ensure_dir(out_dir);
  RngStream rng(seed, "simulate-matrix");
  sde::WeightState w;
  w.matrix =
      init_var > 0.0 ? gaussian_matrix(m, n, rng, std::sqrt(init_var)) : Matrix::Zero(m, n);
  sde::SDEParams params{eta, D, dt};

  const std::string traj_path = out_dir + "/trajectory.csv";
  std::vector<std::string> outputs = {traj_path};
  {
    io::CsvWriter csv(traj_path, series_header(std::min(m, n), "sv_", {"step"}));
    if (dump_matrices) ensure_dir(out_dir + "/matrices");
    sde::SnapshotRecorder recorder = [&](const sde::WeightState& s) {
      Vector sv = singular_values(s.matrix);
      csv.row(s.step, std::vector<double>(sv.data(), sv.data() + sv.size()));
      if (dump_matrices) {
        const std::string path = out_dir + "/matrices/step" + std::to_string(s.step) + ".bin";
        io::write_matrix(path, s.matrix, static_cast<std::uint32_t>(s.step));
        outputs.push_back(path);
      }
    };
    sde::simulate_weights(w, nullptr, params, steps, rng, recorder, record_stride);
  }

  json cfg{{"m", m},          {"n", n},
           {"eta", eta},      {"diffusion", D},
           {"steps", steps},  {"dt", dt},
           {"seed", seed},    {"record_stride", record_stride},
           {"init_var", init_var}};
  io::write_manifest(out_dir, "simulate matrix", cfg, seed, {}, outputs);
  return 0;
}

int cmd_simulate_dyson(int r, int m, int n, double eta, double D, long steps, double dt,
                       std::uint64_t seed, const std::string& out_dir, long record_stride,
                       double beta1, double lambda_scale) {
  ensure_dir(out_dir);
  spectral::DysonState state;
  state.m = m;
  state.n = n;
  for (int k = 0; k < r; ++k) state.lambdas.push_back(lambda_scale * (r - k));
  spectral::validate_dyson(state);

  const std::string traj_path = out_dir + "/trajectory.csv";
  spectral::DysonRunStats stats;
  {
    io::CsvWriter csv(traj_path, series_header(r, "lambda_", {"step", "time"}));
    spectral::DysonRecorder recorder = [&](const spectral::DysonState& s) {
      std::vector<double> vals;
      vals.push_back(s.time);
      vals.insert(vals.end(), s.lambdas.begin(), s.lambdas.end());
      csv.row(static_cast<long>(std::llround(s.time / dt)), vals);
    };
    RngStream rng(seed, "simulate-dyson");
    spectral::DysonOptions opt;
    opt.beta1 = beta1;
    auto result =
        spectral::simulate_dyson(state, eta, D, steps, dt, rng, recorder, record_stride, opt);
    stats = result.second;
  }
  json cfg{{"r", r},
           {"m", m},
           {"n", n},
           {"eta", eta},
           {"diffusion", D},
           {"steps", steps},
           {"dt", dt},
           {"seed", seed},
           {"record_stride", record_stride},
           {"beta1", beta1},
           {"lambda_scale", lambda_scale}};
  cfg["stats"] = {{"bisection_events", stats.bisection_events},
                  {"rejected_proposals", stats.rejected_proposals},
                  {"reflections", stats.reflections},
                  {"max_depth", stats.max_depth},
                  {"engagement_rate", stats.engagement_rate()}};
  io::write_manifest(out_dir, "simulate dyson", cfg, seed, {}, {traj_path});
  if (stats.engagement_rate() > 0.01) {
    std::cerr << "warning: collision bisection engaged on " << stats.engagement_rate() * 100.0
              << "% of steps; consider a smaller --dt\n";
  }
  return 0;
}

// ---- train ----

int cmd_train(const nn::TrainConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  ensure_dir(out_dir + "/spectra");
  if (cfg.grad_stride > 0 || cfg.per_example_stride > 0) ensure_dir(out_dir + "/grads");

  std::vector<std::string> outputs;
  const int layers = static_cast<int>(cfg.arch.size()) - 1;

  {
    std::ofstream config_file(out_dir + "/config.json");
    config_file << train_config_json(cfg).dump(2) << "\n";
  }
  outputs.push_back(out_dir + "/config.json");

  bool diverged = false;
  long diverged_step = 0;
  {
    io::CsvWriter loss_csv(out_dir + "/loss.csv", {"step", "loss"});
    outputs.push_back(out_dir + "/loss.csv");

    std::vector<std::unique_ptr<io::CsvWriter>> spectra_csv;
    for (int l = 1; l <= layers; ++l) {
      const int rank = std::min(cfg.arch[static_cast<std::size_t>(l)],
                                cfg.arch[static_cast<std::size_t>(l - 1)]);
      const std::string path = out_dir + "/spectra/layer" + std::to_string(l) + ".csv";
      spectra_csv.push_back(
          std::make_unique<io::CsvWriter>(path, series_header(rank, "sv_", {"step"})));
      outputs.push_back(path);
    }

    nn::TrainSinks sinks;
    sinks.loss = [&](long step, double loss) { loss_csv.row(step, {loss}); };
    sinks.spectrum = [&](int layer, const SpectrumSnapshot& snap) {
      spectra_csv[static_cast<std::size_t>(layer - 1)]->row(snap.step, snap.values);
    };
    if (cfg.grad_stride > 0) {
      sinks.minibatch_grad = [&](long step, int layer, const Matrix& grad) {
        const std::string path = grad_path(out_dir, step, layer);
        io::write_matrix(path, grad, static_cast<std::uint32_t>(step));
        outputs.push_back(path);
      };
    }
    if (cfg.per_example_stride > 0) {
      sinks.per_example_grad = [&](long step, int layer, int example, const Matrix& grad) {
        const std::string path = out_dir + "/grads/step" + std::to_string(step) + "_layer" +
                                 std::to_string(layer) + "_ex" + std::to_string(example) + ".bin";
        io::write_matrix(path, grad, static_cast<std::uint32_t>(step));
        outputs.push_back(path);
      };
    }

    nn::TrainRecord rec = nn::sgd_train(cfg, sinks);
    diverged = rec.diverged;
    diverged_step = rec.steps_run;
  }
  if (diverged) {
    std::cerr << "training diverged at step " << diverged_step << " (loss is not finite)\n";
    return 1;
  }
  io::write_manifest(out_dir, "train", train_config_json(cfg), cfg.seed, {}, outputs);
  return 0;
}

// ---- analyze ----

void layer_step_spectrum(const std::string& record, int layer, long step,
                         std::vector<double>* out, int* rows, int* cols) {
  nn::TrainConfig cfg = load_record_config(record);
  const int layers = static_cast<int>(cfg.arch.size()) - 1;
  if (layer < 1 || layer > layers) throw DomainError("layer index out of range");
  *rows = cfg.arch[static_cast<std::size_t>(layer)];
  *cols = cfg.arch[static_cast<std::size_t>(layer - 1)];
  io::Csv csv = io::read_csv(record + "/spectra/layer" + std::to_string(layer) + ".csv");
  io::validate_csv_schema(csv, {"step"}, "sv_");
  for (const auto& row : csv.rows) {
    if (static_cast<long>(row[0]) == step) {
      out->assign(row.begin() + 1, row.end());
      return;
    }
  }
  throw DomainError("no spectrum recorded at step " + std::to_string(step));
}

int cmd_analyze_mp_check(const std::string& record, int layer, long step, double threshold,
                         const std::string& out_dir) {
  std::vector<double> sv;
  int rows = 0, cols = 0;
  layer_step_spectrum(record, layer, step, &sv, &rows, &cols);
  const int major = std::max(rows, cols), minor = std::min(rows, cols);
  const double entry_var = 1.0 / cols;  // init is N(0, 1/fan_in)
  std::vector<double> lambda;
  for (double s : sv) lambda.push_back(s * s / major);
  rmt::MPParams p = rmt::mp_params(static_cast<double>(minor) / major, entry_var);
  const double ks = rmt::ks_distance(rmt::EmpiricalSpectrum(lambda),
                                     [&](double x) { return rmt::mp_cdf(x, p); });
  json report{{"layer", layer}, {"step", step},
              {"rows", rows},   {"cols", cols},
              {"transposed", rows < cols},
              {"gamma", p.gamma},
              {"scale", p.scale},
              {"ks", ks},
              {"threshold", threshold},
              {"pass", ks < threshold}};
  ensure_dir(out_dir);
  {
    std::ofstream f(out_dir + "/mp_check.json");
    f << report.dump(2) << "\n";
  }
  std::cout << report.dump(2) << "\n";
  io::write_manifest(out_dir, "analyze mp-check",
                     json{{"record", record},
                          {"layer", layer},
                          {"step", step},
                          {"threshold", threshold}},
                     0, {record + "/config.json"}, {out_dir + "/mp_check.json"});
  return 0;
}

int cmd_analyze_tw_edge(const std::string& record, int layer, long step, double threshold,
                        const std::string& out_dir) {
  std::vector<double> sv;
  int rows = 0, cols = 0;
  layer_step_spectrum(record, layer, step, &sv, &rows, &cols);
  const int major = std::max(rows, cols), minor = std::min(rows, cols);
  const double entry_var = 1.0 / cols;
  std::vector<double> lambda;
  for (double s : sv) lambda.push_back(s * s / major);
  rmt::EdgeScaling edge = rmt::edge_scaling(major, minor, entry_var);
  const double chi = (lambda.front() - edge.mu) / edge.sigma;
  json report{{"layer", layer},
              {"step", step},
              {"mu", edge.mu},
              {"sigma", edge.sigma},
              {"chi_max", chi},
              {"tw1_cdf_at_chi", rmt::tw1_cdf(chi)},
              {"tail_count",
               rmt::tail_count_beyond_edge(rmt::EmpiricalSpectrum(lambda), edge, threshold)},
              {"threshold", threshold}};
  ensure_dir(out_dir);
  {
    std::ofstream f(out_dir + "/tw_edge.json");
    f << report.dump(2) << "\n";
  }
  std::cout << report.dump(2) << "\n";
  io::write_manifest(out_dir, "analyze tw-edge",
                     json{{"record", record},
                          {"layer", layer},
                          {"step", step},
                          {"threshold", threshold}},
                     0, {record + "/config.json"}, {out_dir + "/tw_edge.json"});
  return 0;
}

int cmd_analyze_fit_gamma(const std::string& run_dir, long burn_in, const std::string& out_dir) {
  const json manifest = io::read_manifest(run_dir);
  if (manifest.value("subcommand", "") != "simulate dyson") {
    throw DomainError("fit-gamma expects a 'simulate dyson' run directory");
  }
  const json& cfg = manifest.at("config");
  const double eta = cfg.at("eta").get<double>();
  const double D = cfg.at("diffusion").get<double>();
  const int m = cfg.at("m").get<int>(), n = cfg.at("n").get<int>();

  io::Csv csv = io::read_csv(run_dir + "/trajectory.csv");
  io::validate_csv_schema(csv, {"step", "time"}, "lambda_");
  std::vector<double> samples;
  for (const auto& row : csv.rows) {
    if (static_cast<long>(row[0]) < burn_in) continue;
    samples.insert(samples.end(), row.begin() + 2, row.end());
  }
  spectral::GammaFitResult fit = spectral::fit_stationary(samples, m, n, eta, D);
  json report{{"shape", fit.shape},
              {"rate", fit.rate},
              {"implied_beta1", fit.implied_beta1},
              {"gof", fit.gof},
              {"sample_count", fit.sample_count},
              {"theoretical_shape", fit.theoretical_shape}};
  ensure_dir(out_dir);
  {
    std::ofstream f(out_dir + "/gamma_fit.json");
    f << report.dump(2) << "\n";
  }
  std::cout << report.dump(2) << "\n";
  io::write_manifest(out_dir, "analyze fit-gamma", json{{"run", run_dir}, {"burn_in", burn_in}},
                     0, {run_dir + "/trajectory.csv"}, {out_dir + "/gamma_fit.json"});
  return 0;
}

int cmd_analyze_extract_beta(const std::string& record, int layer, int modes,
                             const std::string& convention, double diffusion,
                             const std::string& out_dir) {
  nn::TrainConfig cfg = load_record_config(record);
  LayerSeries series = replay_layer_series(cfg, layer, modes);

  estimators::ExtractBetaParams p;
  p.eta = cfg.eta;
  p.dt = 1.0;
  if (convention == "force-balance") {
    p.convention = estimators::BetaConvention::ForceBalance;
  } else if (convention == "drift-inversion") {
    p.convention = estimators::BetaConvention::DriftInversion;
    p.m = std::max(series.layer_rows, series.layer_cols);
    p.n = std::min(series.layer_rows, series.layer_cols);
    p.D = diffusion;
    if (p.D <= 0.0) throw DomainError("drift-inversion convention needs --diffusion > 0");
  } else {
    throw DomainError("unknown convention: " + convention + " (use force-balance|drift-inversion)");
  }
  estimators::BetaSeries beta = estimators::extract_beta(series.lambda, series.grad_proj, p);

  ensure_dir(out_dir);
  const std::string csv_path = out_dir + "/beta_series.csv";
  {
    std::vector<std::string> header = {"step"};
    for (const char* comp : {"beta_", "dlambda_", "gradforce_", "repulsion_"}) {
      for (int k = 1; k <= modes; ++k) header.push_back(comp + std::to_string(k));
    }
    io::CsvWriter csv(csv_path, header);
    for (long t = 0; t < beta.steps(); ++t) {
      std::vector<double> row;
      for (int k = 0; k < modes; ++k) row.push_back(beta.beta(t, k));
      for (int k = 0; k < modes; ++k) row.push_back(beta.dlambda_dt(t, k));
      for (int k = 0; k < modes; ++k) row.push_back(beta.grad_force(t, k));
      for (int k = 0; k < modes; ++k) row.push_back(beta.repulsion(t, k));
      csv.row(t, row);
    }
  }
  io::write_manifest(out_dir, "analyze extract-beta",
                     json{{"record", record},
                          {"layer", layer},
                          {"modes", modes},
                          {"convention", convention},
                          {"diffusion", diffusion}},
                     cfg.seed, {record + "/config.json"}, {csv_path});
  return 0;
}

int cmd_analyze_noise_report(const std::string& record, int layer, int modes, int batch,
                             const std::string& out_dir) {
  nn::TrainConfig cfg = load_record_config(record);

  io::Csv spectra = io::read_csv(record + "/spectra/layer" + std::to_string(layer) + ".csv");
  io::validate_csv_schema(spectra, {"step"}, "sv_");
  std::vector<SpectrumSnapshot> snaps;
  for (const auto& row : spectra.rows) {
    SpectrumSnapshot s;
    s.step = static_cast<long>(row[0]);
    s.values.assign(row.begin() + 1, row.end());
    snaps.push_back(std::move(s));
  }
  const double d_hat = estimators::estimate_diffusion(snaps, static_cast<double>(cfg.steps));

  // beta_1 from per-example gradients at the final weights (deterministic
  // replay; the record itself need not carry the dumps)
  nn::TrainRecord rec = nn::sgd_train(cfg);
  RngStream data_rng(cfg.seed, "dataset");
  nn::Dataset ds = nn::make_dataset(cfg, data_rng);
  const int examples =
      std::min(cfg.per_example_count > 0 ? cfg.per_example_count : 64, ds.size());
  std::vector<Matrix> per_example;
  for (int e = 0; e < examples; ++e) {
    nn::ForwardCache cache = nn::forward(rec.final_mlp, ds.X.col(e));
    nn::LossEval loss =
        ds.classification
            ? nn::softmax_xent(cache.a.back(), {ds.labels[static_cast<std::size_t>(e)]})
            : nn::squared_loss(cache.a.back(), ds.targets.col(e));
    nn::Grads g = nn::backprop(rec.final_mlp, cache, loss.grad);
    per_example.push_back(g.dW[static_cast<std::size_t>(layer - 1)]);
  }
  RngStream mc_rng(cfg.seed, "beta1-mc");
  const int B = batch > 0 ? batch : std::min(cfg.batch, examples);
  estimators::NoiseStats noise = estimators::estimate_beta1(per_example, B, mc_rng);

  LayerSeries series = replay_layer_series(cfg, layer, modes);
  estimators::ExtractBetaParams p;
  p.eta = cfg.eta;
  p.dt = 1.0;
  p.convention = estimators::BetaConvention::ForceBalance;
  estimators::BetaSeries beta = estimators::extract_beta(series.lambda, series.grad_proj, p);
  estimators::CorrelationReport corr = estimators::noise_correlation_report(beta);

  json report{{"D_hat", d_hat},
              {"beta1_hat", noise.beta1},
              {"beta1_se", noise.se},
              {"batch", B},
              {"correlations",
               {{"repulsion_vs_dlambda", corr.repulsion_vs_dlambda},
                {"repulsion_vs_gradforce", corr.repulsion_vs_gradforce},
                {"undefined", corr.undefined_correlation}}},
              {"magnitude_shares",
               {{"dlambda", corr.share_dlambda},
                {"gradforce", corr.share_gradforce},
                {"repulsion", corr.share_repulsion}}}};
  ensure_dir(out_dir);
  {
    std::ofstream f(out_dir + "/noise_report.json");
    f << report.dump(2) << "\n";
  }
  std::cout << report.dump(2) << "\n";
  io::write_manifest(out_dir, "analyze noise-report",
                     json{{"record", record}, {"layer", layer}, {"modes", modes}, {"batch", B}},
                     cfg.seed, {record + "/config.json"}, {out_dir + "/noise_report.json"});
  return 0;
}

int cmd_analyze_mp_table(double gamma, double scale, int points, const std::string& out_dir) {
  rmt::MPParams p = rmt::mp_params(gamma, scale);
  ensure_dir(out_dir);
  const std::string path = out_dir + "/mp_density.csv";
  {
    io::CsvWriter csv(path, {"x", "density"}, 6);
    for (int i = 0; i < points; ++i) {
      const double x = p.lambda_minus +
                       (p.lambda_plus - p.lambda_minus) * i / static_cast<double>(points - 1);
      csv.row({x, rmt::mp_density(x, p)});
    }
  }
  io::write_manifest(out_dir, "analyze mp-table",
                     json{{"gamma", gamma}, {"scale", scale}, {"points", points}}, 0, {}, {path});
  return 0;
}

int cmd_analyze_tw_table(double from, double to, int points, const std::string& out_dir) {
  if (!(from < to)) throw DomainError("tw-table needs from < to");
  ensure_dir(out_dir);
  const std::string path = out_dir + "/tw1_cdf.csv";
  {
    io::CsvWriter csv(path, {"s", "cdf"}, 6);
    for (int i = 0; i < points; ++i) {
      const double s = from + (to - from) * i / static_cast<double>(points - 1);
      csv.row({s, rmt::tw1_cdf(s)});
    }
  }
  io::write_manifest(out_dir, "analyze tw-table",
                     json{{"from", from}, {"to", to}, {"points", points}}, 0, {}, {path});
  return 0;
}

int cmd_analyze_stationary_table(int m, int n, double eta, double D, double beta1,
                                 const std::string& variable, int points,
                                 const std::string& out_dir) {
  spectral::StationaryParams p{eta, D, beta1, m, n};
  spectral::validate_stationary(p);
  if (variable != "lambda" && variable != "sigma") {
    throw DomainError("unknown variable: " + variable + " (use lambda|sigma)");
  }
  ensure_dir(out_dir);
  const std::string path = out_dir + "/stationary_density.csv";
  {
    const double lambda_hi = (p.shape() + 12.0) / p.rate();
    io::CsvWriter csv(path, {variable, "density"}, 6);
    for (int i = 1; i <= points; ++i) {
      if (variable == "lambda") {
        const double x = lambda_hi * i / static_cast<double>(points);
        csv.row({x, spectral::stationary_lambda_pdf(x, p)});
      } else {
        const double x = std::sqrt(lambda_hi) * i / static_cast<double>(points);
        csv.row({x, spectral::stationary_sigma_pdf(x, p)});
      }
    }
  }
  io::write_manifest(out_dir, "analyze stationary-table",
                     json{{"m", m},
                          {"n", n},
                          {"eta", eta},
                          {"diffusion", D},
                          {"beta1", beta1},
                          {"variable", variable},
                          {"points", points}},
                     0, {}, {path});
  return 0;
}

// ---- forecast ----

int cmd_forecast(const std::string& record, const std::string& weights_file,
                 const std::string& grads_dir, int layer, int k, double eta_flag, bool compare,
                 const std::string& out_dir) {
  Matrix w0;
  std::vector<Matrix> grads;
  double eta = eta_flag;
  std::optional<Matrix> reference;
  std::uint64_t seed = 0;

  if (!record.empty()) {
    nn::TrainConfig cfg = load_record_config(record);
    seed = cfg.seed;
    const int layers = static_cast<int>(cfg.arch.size()) - 1;
    if (layer < 1 || layer > layers) throw DomainError("layer index out of range");
    const int rows = cfg.arch[static_cast<std::size_t>(layer)];
    const int cols = cfg.arch[static_cast<std::size_t>(layer - 1)];
    if (k > std::min(rows, cols)) throw DomainError("--k exceeds layer rank");
    if (eta <= 0.0) eta = cfg.eta;
    if (cfg.grad_stride != 1) {
      std::cerr << "record has grad_stride " << cfg.grad_stride
                << "; forecasting needs per-step gradient dumps (grad_stride 1)\n";
      return 1;
    }
    RngStream init_rng(cfg.seed, "init");
    nn::MLP mlp = nn::init_mlp(cfg.arch, cfg.activation, init_rng);
    w0 = mlp.W[static_cast<std::size_t>(layer - 1)];
    for (long t = 0; t < cfg.steps; ++t) {
      const std::string path = grad_path(record, t, layer);
      if (!fs::exists(path)) {
        std::cerr << "missing gradient dump: " << path << "\n";
        return 1;
      }
      grads.push_back(io::read_matrix(path).matrix);
    }
    if (compare) {
      io::Csv spectra = io::read_csv(record + "/spectra/layer" + std::to_string(layer) + ".csv");
      io::validate_csv_schema(spectra, {"step"}, "sv_");
      bool ok = static_cast<long>(spectra.rows.size()) >= cfg.steps + 1;
      Matrix ref;
      if (ok) {
        ref.resize(cfg.steps + 1, k);
        for (long t = 0; t <= cfg.steps && ok; ++t) {
          const auto& row = spectra.rows[static_cast<std::size_t>(t)];
          if (static_cast<long>(row[0]) != t) {
            ok = false;
            break;
          }
          for (int i = 0; i < k; ++i) ref(t, i) = row[static_cast<std::size_t>(i + 1)];
        }
      }
      if (!ok) {
        std::cerr << "--compare needs spectra at every step (record_stride 1)\n";
        return 1;
      }
      reference = std::move(ref);
    }
  } else {
    if (weights_file.empty() || grads_dir.empty()) {
      throw DomainError("forecast needs either --record or both --weights and --grads");
    }
    if (eta <= 0.0) throw DomainError("--eta is required with --weights/--grads");
    w0 = io::read_matrix(weights_file).matrix;
    if (k > std::min(w0.rows(), w0.cols())) throw DomainError("--k exceeds matrix rank");
    for (long t = 0;; ++t) {
      const std::string path = grads_dir + "/step" + std::to_string(t) + ".bin";
      if (!fs::exists(path)) break;
      grads.push_back(io::read_matrix(path).matrix);
    }
    if (grads.empty()) throw DomainError("no gradient dumps found in " + grads_dir);
  }

  forecast::ForecastConfig fcfg;
  fcfg.k = k;
  fcfg.eta = eta;
  const bool transpose = w0.rows() < w0.cols();
  if (transpose) {
    w0.transposeInPlace();
    for (auto& g : grads) g.transposeInPlace();
  }
  forecast::ForecastTrajectory traj =
      forecast::forecast_trajectory(w0, grads, fcfg, reference ? &*reference : nullptr);

  ensure_dir(out_dir);
  const std::string path = out_dir + "/forecast.csv";
  {
    std::vector<std::string> header = series_header(k, "sigma_", {"step"});
    if (reference) {
      for (int i = 1; i <= k; ++i) header.push_back("err_" + std::to_string(i));
    }
    io::CsvWriter csv(path, header);
    for (long t = 0; t < traj.sigmas.rows(); ++t) {
      std::vector<double> row;
      for (int i = 0; i < k; ++i) row.push_back(traj.sigmas(t, i));
      if (traj.errors) {
        for (int i = 0; i < k; ++i) row.push_back((*traj.errors)(t, i));
      }
      csv.row(t, row);
    }
  }
  io::write_manifest(out_dir, "forecast",
                     json{{"record", record},
                          {"weights", weights_file},
                          {"grads", grads_dir},
                          {"layer", layer},
                          {"k", k},
                          {"eta", eta},
                          {"compare", compare},
                          {"transposed", transpose}},
                     seed, {}, {path});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral dynamics of SGD: simulation, training, analysis, forecasting"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "integrate the matrix or particle SDE");
  simulate->require_subcommand(1);
  struct {
    int m = 64, n = 64, r = 16;
    double eta = 1.0, diffusion = 1e-3, dt = 1.0, init_var = 0.0, beta1 = 0.0, lambda_scale = 1.0;
    long steps = 1000, record_stride = 1;
    std::uint64_t seed = 1;
    std::string out = "out";
    bool dump_matrices = false;
  } sim;
  auto* sim_matrix = simulate->add_subcommand("matrix", "matrix-valued SDE (zero gradient)");
  sim_matrix->add_option("--m", sim.m, "rows")->required();
  sim_matrix->add_option("--n", sim.n, "cols")->required();
  sim_matrix->add_option("--eta", sim.eta, "learning rate");
  sim_matrix->add_option("--diffusion", sim.diffusion, "diffusion constant D");
  sim_matrix->add_option("--steps", sim.steps, "step count");
  sim_matrix->add_option("--dt", sim.dt, "time increment");
  sim_matrix->add_option("--seed", sim.seed, "seed");
  sim_matrix->add_option("--out", sim.out, "output directory")->required();
  sim_matrix->add_option("--record-stride", sim.record_stride, "snapshot stride");
  sim_matrix->add_option("--init-var", sim.init_var, "gaussian init variance (0 = zero init)");
  sim_matrix->add_flag("--dump-matrices", sim.dump_matrices, "write raw matrix dumps");

  auto* sim_dyson = simulate->add_subcommand("dyson", "interacting squared singular values");
  sim_dyson->add_option("--r", sim.r, "particle count")->required();
  sim_dyson->add_option("--m", sim.m, "rows")->required();
  sim_dyson->add_option("--n", sim.n, "cols")->required();
  sim_dyson->add_option("--eta", sim.eta, "learning rate");
  sim_dyson->add_option("--diffusion", sim.diffusion, "diffusion constant D");
  sim_dyson->add_option("--steps", sim.steps, "step count");
  sim_dyson->add_option("--dt", sim.dt, "time increment");
  sim_dyson->add_option("--seed", sim.seed, "seed");
  sim_dyson->add_option("--out", sim.out, "output directory")->required();
  sim_dyson->add_option("--record-stride", sim.record_stride, "snapshot stride");
  sim_dyson->add_option("--beta1", sim.beta1, "mean-field restoring coefficient");
  sim_dyson->add_option("--lambda-scale", sim.lambda_scale, "initial particle spacing");

  auto* train = app.add_subcommand("train", "train the desk-scale MLP");
  struct {
    std::string arch = "16x64x64x64x2", data = "blobs", activation = "tanh", out = "out";
    int size = 512, batch = 32, record_stride = 10, grad_stride = 0, pe_stride = 0, pe_count = 64;
    double eta = 5e-4;
    long steps = 800;
    std::uint64_t seed = 1;
  } tr;
  train->add_option("--arch", tr.arch, "layer dims, e.g. 784x64x64x10");
  train->add_option("--data", tr.data, "blobs|teacher");
  train->add_option("--size", tr.size, "dataset size");
  train->add_option("--batch", tr.batch, "minibatch size");
  train->add_option("--eta", tr.eta, "learning rate");
  train->add_option("--steps", tr.steps, "SGD steps");
  train->add_option("--record-stride", tr.record_stride, "spectrum stride");
  train->add_option("--grad-stride", tr.grad_stride, "minibatch gradient dump stride (0 = off)");
  train->add_option("--per-example-stride", tr.pe_stride, "per-example gradient dump stride");
  train->add_option("--per-example-count", tr.pe_count, "examples per per-example dump");
  train->add_option("--activation", tr.activation, "tanh|relu|identity");
  train->add_option("--seed", tr.seed, "seed");
  train->add_option("--out", tr.out, "output directory")->required();

  auto* analyze = app.add_subcommand("analyze", "statistical reports over runs and records");
  struct {
    std::string mode, in, out = "out", convention = "force-balance", variable = "lambda";
    int layer = 1, modes = 4, points = 200, batch = 0, m = 64, n = 64;
    long step = 0, burn_in = 0;
    double threshold = 0.08, tw_threshold = 4.0, gamma = 1.0, scale = 1.0;
    double from = -10.0, to = 8.0, eta = 1.0, diffusion = 1e-3, beta1 = 0.1;
  } an;
  analyze
      ->add_option("mode", an.mode,
                   "mp-check|tw-edge|fit-gamma|extract-beta|noise-report|mp-table|tw-table|"
                   "stationary-table")
      ->required();
  analyze->add_option("--in", an.in, "input record/run directory");
  analyze->add_option("--out", an.out, "output directory");
  analyze->add_option("--layer", an.layer, "1-based layer index");
  analyze->add_option("--step", an.step, "training step");
  analyze->add_option("--threshold", an.threshold, "KS pass threshold (mp-check)");
  analyze->add_option("--tw-threshold", an.tw_threshold, "scaled-coordinate tail threshold");
  analyze->add_option("--burn-in", an.burn_in, "steps discarded before fitting");
  analyze->add_option("--modes", an.modes, "tracked mode count");
  analyze->add_option("--convention", an.convention, "force-balance|drift-inversion (extract-beta)");
  analyze->add_option("--batch", an.batch, "minibatch size override (noise-report)");
  analyze->add_option("--gamma", an.gamma, "MP aspect ratio (mp-table)");
  analyze->add_option("--scale", an.scale, "MP scale (mp-table)");
  analyze->add_option("--points", an.points, "table points");
  analyze->add_option("--from", an.from, "table lower bound (tw-table)");
  analyze->add_option("--to", an.to, "table upper bound (tw-table)");
  analyze->add_option("--m", an.m, "rows (stationary-table)");
  analyze->add_option("--n", an.n, "cols (stationary-table)");
  analyze->add_option("--eta", an.eta, "learning rate (stationary-table)");
  analyze->add_option("--diffusion", an.diffusion, "diffusion constant");
  analyze->add_option("--beta1", an.beta1, "restoring coefficient (stationary-table)");
  analyze->add_option("--variable", an.variable, "lambda|sigma (stationary-table)");

  auto* forecast_cmd = app.add_subcommand("forecast", "bootstrapped-drift spectrum prediction");
  struct {
    std::string record, weights, grads, out = "out";
    int layer = 1, k = 8;
    double eta = 0.0;
    bool compare = false;
  } fc;
  forecast_cmd->add_option("--record", fc.record, "train record directory");
  forecast_cmd->add_option("--weights", fc.weights, "initial weight dump (raw mode)");
  forecast_cmd->add_option("--grads", fc.grads, "gradient dump directory (raw mode)");
  forecast_cmd->add_option("--layer", fc.layer, "1-based layer index");
  forecast_cmd->add_option("--k", fc.k, "tracked modes");
  forecast_cmd->add_option("--eta", fc.eta, "learning rate (defaults to the record's)");
  forecast_cmd->add_flag("--compare", fc.compare, "join true spectra and emit error columns");
  forecast_cmd->add_option("--out", fc.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim_matrix->parsed()) {
      return cmd_simulate_matrix(sim.m, sim.n, sim.eta, sim.diffusion, sim.steps, sim.dt,
                                 sim.seed, sim.out, sim.record_stride, sim.init_var,
                                 sim.dump_matrices);
    }
    if (sim_dyson->parsed()) {
      return cmd_simulate_dyson(sim.r, sim.m, sim.n, sim.eta, sim.diffusion, sim.steps, sim.dt,
                                sim.seed, sim.out, sim.record_stride, sim.beta1,
                                sim.lambda_scale);
    }
    if (train->parsed()) {
      nn::TrainConfig cfg;
      cfg.arch = parse_arch(tr.arch);
      cfg.data = tr.data;
      cfg.dataset_size = tr.size;
      cfg.batch = tr.batch;
      cfg.eta = tr.eta;
      cfg.steps = tr.steps;
      cfg.record_stride = tr.record_stride;
      cfg.grad_stride = tr.grad_stride;
      cfg.per_example_stride = tr.pe_stride;
      cfg.per_example_count = tr.pe_count;
      cfg.activation = nn::parse_activation(tr.activation);
      cfg.seed = tr.seed;
      return cmd_train(cfg, tr.out);
    }
    if (analyze->parsed()) {
      if (an.mode == "mp-check") {
        if (an.in.empty()) throw DomainError("mp-check needs --in <record>");
        return cmd_analyze_mp_check(an.in, an.layer, an.step, an.threshold, an.out);
      }
      if (an.mode == "tw-edge") {
        if (an.in.empty()) throw DomainError("tw-edge needs --in <record>");
        return cmd_analyze_tw_edge(an.in, an.layer, an.step, an.tw_threshold, an.out);
      }
      if (an.mode == "fit-gamma") {
        if (an.in.empty()) throw DomainError("fit-gamma needs --in <dyson run>");
        return cmd_analyze_fit_gamma(an.in, an.burn_in, an.out);
      }
      if (an.mode == "extract-beta") {
        if (an.in.empty()) throw DomainError("extract-beta needs --in <record>");
        return cmd_analyze_extract_beta(an.in, an.layer, an.modes, an.convention, an.diffusion,
                                        an.out);
      }
      if (an.mode == "noise-report") {
        if (an.in.empty()) throw DomainError("noise-report needs --in <record>");
        return cmd_analyze_noise_report(an.in, an.layer, an.modes, an.batch, an.out);
      }
      if (an.mode == "mp-table") {
        return cmd_analyze_mp_table(an.gamma, an.scale, an.points, an.out);
      }
      if (an.mode == "tw-table") {
        return cmd_analyze_tw_table(an.from, an.to, an.points, an.out);
      }
      if (an.mode == "stationary-table") {
        return cmd_analyze_stationary_table(an.m, an.n, an.eta, an.diffusion, an.beta1,
                                            an.variable, an.points, an.out);
      }
      throw DomainError("unknown analyze mode: " + an.mode);
    }
    if (forecast_cmd->parsed()) {
      return cmd_forecast(fc.record, fc.weights, fc.grads, fc.layer, fc.k, fc.eta, fc.compare,
                          fc.out);
    }
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const FitError& e) {
    json diag{{"error", e.what()},
              {"moment_shape", e.moment_shape},
              {"moment_rate", e.moment_rate}};
    std::cerr << "fit failure: " << diag.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
