// SPDX-License-Identifier: Apache-2.0
//
// genchan - generative modeling of geometric MIMO wireless channels
// Copyright (C) 2026 genchan contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Command-line front end. Exit codes: 0 success, 1 runtime failure,
// 2 usage or validation error.

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"

#include "genchan/genchan.hpp"
#include "genchan/manifest.hpp"

namespace {

using namespace genchan;
using Clock = std::chrono::steady_clock;

// Relative output paths resolve under GENCHAN_OUT_DIR when it is set.
std::filesystem::path resolve_out(const std::string &out) {
  std::filesystem::path p(out);
  if (p.is_relative()) {
    if (const char *base = std::getenv("GENCHAN_OUT_DIR")) p = std::filesystem::path(base) / p;
  }
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  return p;
}

ScenarioSpec resolve_spec(const std::string &source) {
  constexpr std::string_view kPresetPrefix = "preset:";
  if (source.rfind(kPresetPrefix, 0) == 0)
    return scenario_preset(source.substr(kPresetPrefix.size()));
  return load_scenario_spec(source);
}

std::vector<int> parse_width_list(const std::string &text) {
  std::vector<int> widths = parse_widths(text);
  if (widths.empty()) throw std::invalid_argument("width list must not be empty");
  return widths;
}

// "name=path,name=path" pairs for cross-eval.
std::vector<std::pair<std::string, std::string>> parse_named_paths(const std::string &text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size())
      throw std::invalid_argument("expected name=path, got '" + item + "'");
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  if (out.empty()) throw std::invalid_argument("expected at least one name=path entry");
  return out;
}

Dictionary build_model_dictionary(const VaeModel &model) {
  return Dictionary(*model.grid, model.array);
}

int cmd_synthesize(const std::string &spec_source, int count, std::uint64_t seed,
                   const std::string &out) {
  const auto t0 = Clock::now();
  const ScenarioSpec spec = resolve_spec(spec_source);
  const ChannelDataset dataset = generate_dataset(spec, count, seed);
  const auto out_path = resolve_out(out);
  save_dataset(dataset, out_path);

  RunManifest manifest;
  manifest.command = "synthesize";
  manifest.config = {{"spec", spec_source},
                     {"count", count},
                     {"name", spec.name},
                     {"n_t", spec.array.n_t},
                     {"n_r", spec.array.n_r},
                     {"u", spec.array.u},
                     {"paths", spec.paths.size()}};
  manifest.seed = seed;
  if (spec_source.rfind("preset:", 0) != 0) manifest.inputs.push_back(spec_source);
  manifest.outputs.push_back(out_path.string());
  manifest.duration_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  write_manifest(manifest, out_path);

  std::cout << "wrote " << dataset.size() << " channels to " << out_path.string() << "\n";
  return 0;
}

struct TrainFlags {
  std::string data, mode = "relaxed", out, init_from;
  int resolution = 64, latent = 64, epochs = 300, batch = 256, paths = 5;
  double alpha_d = 1e-3, alpha_s = 1e-4, lr = 1e-3;
  double theta_min = -kPi / 2.0, theta_max = kPi / 2.0, u = kPi;
  std::string enc_widths = "512,256", dec_widths = "256,512";
  std::uint64_t seed = 1;
};

int cmd_train(const TrainFlags &flags) {
  const auto t0 = Clock::now();
  const ChannelDataset dataset = load_dataset(flags.data);
  if (dataset.channels.empty()) throw std::invalid_argument("train: dataset is empty");
  const int n_r = static_cast<int>(dataset.channels.front().rows());
  const int n_t = static_cast<int>(dataset.channels.front().cols());
  const ArrayConfig array(n_t, n_r, flags.u);

  VaeConfig config;
  config.mode = vae_mode_from_string(flags.mode);
  config.latent_dim = flags.latent;
  config.encoder_widths = parse_width_list(flags.enc_widths);
  config.decoder_widths = parse_width_list(flags.dec_widths);
  config.alpha_d = flags.alpha_d;
  config.alpha_s = flags.alpha_s;
  config.learning_rate = flags.lr;
  config.epochs = flags.epochs;
  config.batch_size = flags.batch;
  config.seed = flags.seed;
  config.n_paths = flags.paths;

  std::optional<Dictionary> dict;
  if (config.mode == VaeMode::Relaxed)
    dict.emplace(AngleGrid(flags.theta_min, flags.theta_max, flags.resolution), array);

  // optional warm start; the checkpoint's layout must match the flags
  VaeModel model = [&]() -> VaeModel {
    if (flags.init_from.empty())
      return train(dataset.channels, array, dict ? &*dict : nullptr, config);
    VaeModel init = load_vae(flags.init_from);
    VaeModel probe(config, array, dict ? std::optional<AngleGrid>(dict->grid()) : std::nullopt);
    auto want = probe.collect_tensors();
    auto have = init.collect_tensors();
    if (init.config.mode != config.mode || want.size() != have.size())
      throw std::invalid_argument("--init-from checkpoint does not match the model layout");
    for (std::size_t i = 0; i < want.size(); ++i)
      if (want[i].name != have[i].name || want[i].data->rows() != have[i].data->rows() ||
          want[i].data->cols() != have[i].data->cols())
        throw std::invalid_argument("--init-from checkpoint shape mismatch at tensor '" +
                                    want[i].name + "'");
    if (init.array.n_r != array.n_r || init.array.n_t != array.n_t || init.array.u != array.u)
      throw std::invalid_argument("--init-from checkpoint array config mismatch");
    init.config = config;  // adopt this run's epochs, rate, seed and weights
    train_in_place(init, dataset.channels, dict ? &*dict : nullptr);
    return init;
  }();

  const auto out_path = resolve_out(flags.out);
  save_vae(model, out_path);
  std::filesystem::path metrics_path = out_path;
  metrics_path += ".metrics.csv";
  write_history_csv(model.history, metrics_path);

  RunManifest manifest;
  manifest.command = "train";
  manifest.config = {{"data", flags.data},
                     {"mode", flags.mode},
                     {"resolution", flags.resolution},
                     {"latent", flags.latent},
                     {"alpha_d", flags.alpha_d},
                     {"alpha_s", flags.alpha_s},
                     {"epochs", flags.epochs},
                     {"batch", flags.batch},
                     {"lr", flags.lr},
                     {"paths", flags.paths},
                     {"theta_min", flags.theta_min},
                     {"theta_max", flags.theta_max},
                     {"u", flags.u},
                     {"enc_widths", flags.enc_widths},
                     {"dec_widths", flags.dec_widths},
                     {"n_r", n_r},
                     {"n_t", n_t},
                     {"train_samples", dataset.size()}};
  manifest.seed = flags.seed;
  manifest.inputs.push_back(flags.data);
  manifest.outputs = {out_path.string(), metrics_path.string()};
  manifest.duration_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  write_manifest(manifest, out_path);

  std::cout << "trained " << flags.mode << " model for " << flags.epochs
            << " epochs; final nmse " << model.history.back().nmse << "; wrote "
            << out_path.string() << "\n";
  return 0;
}

int cmd_generate(const std::string &model_path, int count, std::uint64_t seed,
                 const std::string &out, const std::string &gains_out) {
  const auto t0 = Clock::now();
  VaeModel model = load_vae(model_path);
  std::optional<Dictionary> dict;
  if (model.config.mode == VaeMode::Relaxed) dict.emplace(build_model_dictionary(model));
  const GeneratedSamples samples = generate(model, dict ? &*dict : nullptr, count, seed);

  ChannelDataset dataset;
  dataset.channels = samples.channels;
  dataset.normalization_scale = mean_frobenius_norm(dataset.channels);
  const auto out_path = resolve_out(out);
  save_dataset(dataset, out_path);

  RunManifest manifest;
  manifest.command = "generate";
  manifest.config = {{"model", model_path},
                     {"count", count},
                     {"mode", to_string(model.config.mode)}};
  manifest.seed = seed;
  manifest.inputs.push_back(model_path);
  manifest.outputs.push_back(out_path.string());

  if (!gains_out.empty()) {
    if (model.config.mode != VaeMode::Relaxed)
      throw std::invalid_argument("--gains-out needs a relaxed-mode model");
    const auto gains_path = resolve_out(gains_out);
    save_gain_matrices(samples.gains, gains_path);
    manifest.outputs.push_back(gains_path.string());
  }
  manifest.duration_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  write_manifest(manifest, out_path);

  std::cout << "generated " << samples.channels.size() << " channels to " << out_path.string()
            << "\n";
  return 0;
}

int cmd_evaluate(const std::string &a_path, const std::string &b_path, const std::string &metrics,
                 int max_count, std::uint64_t seed, const std::string &out) {
  const auto t0 = Clock::now();
  ChannelDataset a = load_dataset(a_path);
  ChannelDataset b = load_dataset(b_path);
  if (max_count > 0) {
    Rng rng(seed);
    auto subsample = [&rng, max_count](ChannelDataset &ds) {
      if (static_cast<int>(ds.size()) <= max_count) return;
      std::vector<std::size_t> order(ds.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      rng.shuffle(order);
      std::vector<ChannelMatrix> keep;
      keep.reserve(max_count);
      for (int i = 0; i < max_count; ++i) keep.push_back(ds.channels[order[i]]);
      ds.channels = std::move(keep);
      ds.truth.reset();
    };
    subsample(a);
    subsample(b);
  }
  const SampleSet sa = SampleSet::from_channels(a.channels);
  const SampleSet sb = SampleSet::from_channels(b.channels);

  bool want_w2 = false, want_mmd = false;
  {
    std::istringstream is(metrics);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      if (tok == "w2") {
        want_w2 = true;
      } else if (tok == "mmd") {
        want_mmd = true;
      } else {
        throw std::invalid_argument("unknown metric '" + tok + "' (use w2,mmd)");
      }
    }
    if (!want_w2 && !want_mmd) throw std::invalid_argument("no metrics selected");
  }

  nlohmann::json records = nlohmann::json::array();
  std::ostringstream summary;
  if (want_w2) {
    const double value = wasserstein2(sa, sb);
    records.push_back(
        {{"metric", "w2"}, {"value", value}, {"n_a", sa.size()}, {"n_b", sb.size()}});
    summary << "w2=" << value << " ";
  }
  if (want_mmd) {
    double bandwidth = 0.0;
    const double value = mmd(sa, sb, &bandwidth);
    records.push_back({{"metric", "mmd"},
                       {"value", value},
                       {"n_a", sa.size()},
                       {"n_b", sb.size()},
                       {"bandwidth", bandwidth}});
    summary << "mmd=" << value << " ";
  }

  const auto out_path = resolve_out(out);
  {
    std::ofstream os(out_path);
    if (!os) throw std::runtime_error("evaluate: cannot open " + out_path.string());
    os << records.dump(2) << "\n";
  }

  RunManifest manifest;
  manifest.command = "evaluate";
  manifest.config = {{"a", a_path}, {"b", b_path}, {"metrics", metrics}, {"max_count", max_count}};
  manifest.seed = seed;
  manifest.inputs = {a_path, b_path};
  manifest.outputs.push_back(out_path.string());
  manifest.duration_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  write_manifest(manifest, out_path);

  std::cout << summary.str() << "(n_a=" << sa.size() << ", n_b=" << sb.size() << ")\n";
  return 0;
}

int cmd_surface(double theta_a, double theta_d, double gain, int n, double u, int grid_points,
                double range_min, double range_max, bool pin_truth, const std::string &out) {
  const auto t0 = Clock::now();
  const ArrayConfig config(n, n, u);
  const PathParams truth(gain, theta_a, theta_d);
  const SurfaceGrid surface =
      loss_surface(truth, config, {range_min, range_max}, grid_points, pin_truth);
  const SurfaceSummary summary = summarize_surface(surface);

  const auto out_path = resolve_out(out);
  write_surface_csv(surface, out_path);
  std::filesystem::path summary_path = out_path;
  summary_path += ".summary.json";
  {
    nlohmann::json j = {{"n", summary.n_r},
                        {"flatness_fraction", summary.flatness_fraction},
                        {"argmin_theta_a", summary.argmin_theta_a},
                        {"argmin_theta_d", summary.argmin_theta_d},
                        {"min_value", summary.min_value}};
    if (summary.optimality_gap)
      j["optimality_gap"] = *summary.optimality_gap;
    else
      j["optimality_gap"] = nullptr;
    std::ofstream os(summary_path);
    if (!os) throw std::runtime_error("surface: cannot open " + summary_path.string());
    os << j.dump(2) << "\n";
  }

  RunManifest manifest;
  manifest.command = "surface";
  manifest.config = {{"theta_a", theta_a}, {"theta_d", theta_d}, {"gain", gain},
                     {"n", n},             {"u", u},             {"grid", grid_points},
                     {"range_min", range_min}, {"range_max", range_max}, {"pin_truth", pin_truth}};
  manifest.outputs = {out_path.string(), summary_path.string()};
  manifest.duration_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  write_manifest(manifest, out_path);

  std::cout << "surface n=" << n << " flatness=" << summary.flatness_fraction << " min="
            << summary.min_value << " at (" << summary.argmin_theta_a << ", "
            << summary.argmin_theta_d << ")\n";
  return 0;
}

int cmd_extract_params(const std::string &model_path, const std::string &gains_path, int count,
                       std::uint64_t seed, double threshold, const std::string &out) {
  const auto t0 = Clock::now();
  if (model_path.empty() == gains_path.empty())
    throw std::invalid_argument("give exactly one of --model or --gains");

  std::vector<GainMatrix> gains;
  std::optional<AngleGrid> grid;
  if (!model_path.empty()) {
    VaeModel model = load_vae(model_path);
    if (model.config.mode != VaeMode::Relaxed)
      throw std::invalid_argument("extract-params needs a relaxed-mode model");
    Dictionary dict = build_model_dictionary(model);
    gains = generate(model, &dict, count, seed).gains;
    grid = *model.grid;
  } else {
    gains = load_gain_matrices(gains_path);
    if (gains.empty()) throw std::invalid_argument("gain file holds no samples");
    grid = AngleGrid(-kPi / 2.0, kPi / 2.0, static_cast<int>(gains.front().rows()));
  }

  const auto out_path = resolve_out(out);
  std::ofstream os(out_path);
  if (!os) throw std::runtime_error("extract-params: cannot open " + out_path.string());
  os << "sample,path,gain,aoa,aod\n";
  char buf[128];
  std::size_t total = 0;
  for (std::size_t s = 0; s < gains.size(); ++s) {
    const std::vector<PathParams> paths = extract_paths(gains[s], *grid, threshold);
    for (std::size_t p = 0; p < paths.size(); ++p) {
      std::snprintf(buf, sizeof(buf), "%zu,%zu,%.17g,%.17g,%.17g\n", s, p, paths[p].gain,
                    paths[p].aoa, paths[p].aod);
      os << buf;
    }
    total += paths.size();
  }
  os.close();

  RunManifest manifest;
  manifest.command = "extract-params";
  manifest.config = {{"model", model_path},
                     {"gains", gains_path},
                     {"count", count},
                     {"threshold", threshold}};
  manifest.seed = seed;
  if (!model_path.empty()) manifest.inputs.push_back(model_path);
  if (!gains_path.empty()) manifest.inputs.push_back(gains_path);
  manifest.outputs.push_back(out_path.string());
  manifest.duration_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  write_manifest(manifest, out_path);

  std::cout << "extracted " << total << " paths from " << gains.size() << " samples\n";
  return 0;
}

int cmd_cross_eval(const std::string &train_spec, const std::string &test_spec, int bottleneck,
                   const std::string &widths, int epochs, int batch, double lr,
                   std::uint64_t seed, int jobs, const std::string &out) {
  const auto t0 = Clock::now();
  const auto train_paths = parse_named_paths(train_spec);
  const auto test_paths = parse_named_paths(test_spec);

  std::vector<ChannelDataset> storage;
  storage.reserve(train_paths.size() + test_paths.size());
  std::vector<NamedDataset> trains, tests;
  for (const auto &[name, path] : train_paths) {
    storage.push_back(load_dataset(path));
    trains.push_back({name, &storage.back()});
  }
  for (const auto &[name, path] : test_paths) {
    storage.push_back(load_dataset(path));
    tests.push_back({name, &storage.back()});
  }

  CompressorConfig config;
  config.bottleneck_dim = bottleneck;
  config.widths = parse_width_list(widths);
  config.epochs = epochs;
  config.batch_size = batch;
  config.learning_rate = lr;
  config.seed = seed;

  const CrossEvalResult result = cross_evaluate(trains, tests, config, jobs);
  const auto out_path = resolve_out(out);
  write_cross_eval_csv(result, out_path);

  RunManifest manifest;
  manifest.command = "cross-eval";
  manifest.config = {{"train", train_spec}, {"test", test_spec},   {"bottleneck", bottleneck},
                     {"widths", widths},    {"epochs", epochs},    {"batch", batch},
                     {"lr", lr},            {"jobs", jobs}};
  manifest.seed = seed;
  for (const auto &[name, path] : train_paths) manifest.inputs.push_back(path);
  for (const auto &[name, path] : test_paths) manifest.inputs.push_back(path);
  manifest.outputs.push_back(out_path.string());
  manifest.duration_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  write_manifest(manifest, out_path);

  std::cout << "cross-eval matrix (" << result.train_labels.size() << "x"
            << result.test_labels.size() << ") written to " << out_path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"generative modeling of geometric MIMO wireless channels"};
  app.set_version_flag("--version", genchan::kVersion);
  app.require_subcommand(1);

  // synthesize
  std::string syn_spec, syn_out;
  int syn_count = 1000;
  std::uint64_t syn_seed = 1;
  auto *syn = app.add_subcommand("synthesize", "sample a scenario into a CHNL dataset");
  syn->add_option("spec", syn_spec, "scenario spec file or preset:<name>")->required();
  syn->add_option("--count", syn_count, "number of channels");
  syn->add_option("--seed", syn_seed, "RNG seed");
  syn->add_option("--out", syn_out, "output CHNL file")->required();

  // train
  TrainFlags tf;
  auto *tr = app.add_subcommand("train", "train a VAE on a CHNL dataset");
  tr->add_option("--data", tf.data, "training CHNL file")->required();
  tr->add_option("--mode", tf.mode, "direct|relaxed")->check(CLI::IsMember({"direct", "relaxed"}));
  tr->add_option("--resolution", tf.resolution, "dictionary resolution R");
  tr->add_option("--latent", tf.latent, "latent dimension Z");
  tr->add_option("--alpha-d", tf.alpha_d, "KL weight");
  tr->add_option("--alpha-s", tf.alpha_s, "L1 sparsity weight");
  tr->add_option("--epochs", tf.epochs, "training epochs");
  tr->add_option("--batch", tf.batch, "batch size");
  tr->add_option("--lr", tf.lr, "Adam learning rate");
  tr->add_option("--seed", tf.seed, "RNG seed");
  tr->add_option("--paths", tf.paths, "path count P (direct mode)");
  tr->add_option("--theta-min", tf.theta_min, "grid lower angle");
  tr->add_option("--theta-max", tf.theta_max, "grid upper angle");
  tr->add_option("--u", tf.u, "array phase constant");
  tr->add_option("--enc-widths", tf.enc_widths, "encoder hidden widths");
  tr->add_option("--dec-widths", tf.dec_widths, "decoder hidden widths");
  tr->add_option("--init-from", tf.init_from, "checkpoint to validate shapes against");
  tr->add_option("--out", tf.out, "output checkpoint file")->required();

  // generate
  std::string gen_model, gen_out, gen_gains;
  int gen_count = 3000;
  std::uint64_t gen_seed = 1;
  auto *gen = app.add_subcommand("generate", "sample channels from a trained model");
  gen->add_option("--model", gen_model, "checkpoint file")->required();
  gen->add_option("--count", gen_count, "number of samples");
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--out", gen_out, "output CHNL file")->required();
  gen->add_option("--gains-out", gen_gains, "also write per-sample gain matrices (GMTX)");

  // evaluate
  std::string ev_a, ev_b, ev_metrics = "w2,mmd", ev_out;
  int ev_max = 0;
  std::uint64_t ev_seed = 1;
  auto *ev = app.add_subcommand("evaluate", "distribution metrics between two CHNL files");
  ev->add_option("--a", ev_a, "first CHNL file")->required();
  ev->add_option("--b", ev_b, "second CHNL file")->required();
  ev->add_option("--metrics", ev_metrics, "comma list of w2,mmd");
  ev->add_option("--max-count", ev_max, "seeded subsample cap per set (0 = all)");
  ev->add_option("--seed", ev_seed, "subsample seed");
  ev->add_option("--out", ev_out, "output JSON file")->required();

  // surface
  double sf_ta = 1.0, sf_td = 1.0, sf_gain = 1.0, sf_u = genchan::kPi;
  double sf_min = -genchan::kPi / 2.0, sf_max = genchan::kPi / 2.0;
  int sf_n = 16, sf_grid = 201;
  bool sf_pin = false;
  std::string sf_out;
  auto *sf = app.add_subcommand("surface", "loss surface over (aoa, aod) for one path");
  sf->add_option("--theta-a", sf_ta, "true angle of arrival");
  sf->add_option("--theta-d", sf_td, "true angle of departure");
  sf->add_option("--gain", sf_gain, "true gain");
  sf->add_option("--n", sf_n, "antennas per side");
  sf->add_option("--u", sf_u, "array phase constant");
  sf->add_option("--grid", sf_grid, "grid points per axis");
  sf->add_option("--range-min", sf_min, "axis lower bound");
  sf->add_option("--range-max", sf_max, "axis upper bound");
  sf->add_flag("--pin-truth", sf_pin, "pin the nearest node exactly onto the truth");
  sf->add_option("--out", sf_out, "output CSV file")->required();

  // extract-params
  std::string ex_model, ex_gains, ex_out;
  int ex_count = 3000;
  std::uint64_t ex_seed = 1;
  double ex_threshold = 0.1;
  auto *ex = app.add_subcommand("extract-params", "peak extraction from gain matrices");
  ex->add_option("--model", ex_model, "relaxed checkpoint (generates --count samples)");
  ex->add_option("--gains", ex_gains, "GMTX file of gain matrices");
  ex->add_option("--count", ex_count, "samples to generate with --model");
  ex->add_option("--seed", ex_seed, "generation seed");
  ex->add_option("--threshold", ex_threshold, "relative peak threshold in (0,1]");
  ex->add_option("--out", ex_out, "output CSV file")->required();

  // cross-eval
  std::string ce_train, ce_test, ce_widths = "256", ce_out;
  int ce_bottleneck = 32, ce_epochs = 300, ce_batch = 256, ce_jobs = 1;
  double ce_lr = 1e-3;
  std::uint64_t ce_seed = 1;
  auto *ce = app.add_subcommand("cross-eval", "train/test compression NMSE matrix");
  ce->add_option("--train", ce_train, "name=path[,name=path...]")->required();
  ce->add_option("--test", ce_test, "name=path[,name=path...]")->required();
  ce->add_option("--bottleneck", ce_bottleneck, "bottleneck dimension");
  ce->add_option("--widths", ce_widths, "compressor hidden widths");
  ce->add_option("--epochs", ce_epochs, "training epochs");
  ce->add_option("--batch", ce_batch, "batch size");
  ce->add_option("--lr", ce_lr, "Adam learning rate");
  ce->add_option("--seed", ce_seed, "RNG seed");
  ce->add_option("--jobs", ce_jobs, "parallel training jobs");
  ce->add_option("--out", ce_out, "output CSV file")->required();

  try {
    app.parse(argc, argv);
    if (syn->parsed()) return cmd_synthesize(syn_spec, syn_count, syn_seed, syn_out);
    if (tr->parsed()) return cmd_train(tf);
    if (gen->parsed()) return cmd_generate(gen_model, gen_count, gen_seed, gen_out, gen_gains);
    if (ev->parsed()) return cmd_evaluate(ev_a, ev_b, ev_metrics, ev_max, ev_seed, ev_out);
    if (sf->parsed())
      return cmd_surface(sf_ta, sf_td, sf_gain, sf_n, sf_u, sf_grid, sf_min, sf_max, sf_pin,
                         sf_out);
    if (ex->parsed())
      return cmd_extract_params(ex_model, ex_gains, ex_count, ex_seed, ex_threshold, ex_out);
    if (ce->parsed())
      return cmd_cross_eval(ce_train, ce_test, ce_bottleneck, ce_widths, ce_epochs, ce_batch,
                            ce_lr, ce_seed, ce_jobs, ce_out);
    return 2;
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const genchan::SpecParseError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const genchan::FormatError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
