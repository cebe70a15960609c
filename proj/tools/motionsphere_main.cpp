// motionsphere command line: SRVF encode/decode, sphere means and
// distances, synthetic data generation, training, prediction and
// evaluation. Exit codes: 0 success, 2 usage, 3 data error, 4 numerical or
// convergence error, 5 training divergence.

#include <CLI11.hpp>

#include "motionsphere/cliconfig.hpp"
#include "motionsphere/dataio.hpp"
#include "motionsphere/gan.hpp"
#include "motionsphere/metrics.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace motionsphere;

namespace {

int verbosity() {
  const char* v = std::getenv("MOTIONSPHERE_VERBOSE");
  return v ? std::atoi(v) : 1;
}

void info(const std::string& msg) {
  if (verbosity() >= 1) std::cerr << msg << "\n";
}

std::vector<std::string> csv_files_in(const std::string& dir) {
  std::vector<std::string> out;
  if (!fs::is_directory(dir)) throw ParseError("not a directory: " + dir);
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  if (out.empty()) throw ParseError("no .csv files in " + dir);
  return out;
}

DatasetPair build_datasets(const CliConfig& cfg) {
  const SkeletonTopology topo = cfg.load_topology();
  std::vector<std::string> files = csv_files_in(cfg.train_dir);
  SplitRule rule;
  if (!cfg.test_dir.empty()) {
    for (const std::string& f : csv_files_in(cfg.test_dir)) {
      files.push_back(f);
      rule.test_files.insert(f);
    }
  }
  return make_dataset(files, topo, cfg.prior_len, cfg.future_len, rule, cfg.downsample);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
}

int run(int argc, char** argv) {
  CLI::App app{"motion prediction on the SRVF hypersphere"};
  app.require_subcommand(1);

  // ---- encode ----
  auto* c_enc = app.add_subcommand("encode", "encode a motion CSV into a .srvf file");
  std::string enc_in, enc_out, enc_anchor = "first";
  c_enc->add_option("--in", enc_in, "input motion CSV")->required();
  c_enc->add_option("--out", enc_out, "output .srvf path")->required();
  c_enc->add_option("--anchor", enc_anchor, "anchor rule: first or last frame")
      ->check(CLI::IsMember({"first", "last"}))
      ->capture_default_str();

  // ---- decode ----
  auto* c_dec = app.add_subcommand("decode", "decode a .srvf file into a motion CSV");
  std::string dec_in, dec_out, dec_prior;
  Eigen::Index dec_frames = 0;
  double dec_fps = 25.0;
  c_dec->add_option("--in", dec_in, "input .srvf path")->required();
  c_dec->add_option("--out", dec_out, "output motion CSV")->required();
  c_dec->add_option("--frames", dec_frames, "output frame count (default: stored grid size)");
  c_dec->add_option("--fps", dec_fps, "frame rate written to the CSV")->capture_default_str();
  c_dec->add_option("--anchor-last-prior", dec_prior,
                    "re-anchor the decoded curve at this CSV's final pose");

  // ---- dist ----
  auto* c_dist = app.add_subcommand("dist", "geodesic distance between two .srvf files");
  std::string dist_a, dist_b;
  c_dist->add_option("a", dist_a, "first .srvf")->required();
  c_dist->add_option("b", dist_b, "second .srvf")->required();

  // ---- mean ----
  auto* c_mean = app.add_subcommand("mean", "Karcher mean of .srvf files");
  std::vector<std::string> mean_in;
  std::string mean_out;
  KarcherConfig mean_cfg;
  c_mean->add_option("inputs", mean_in, "input .srvf files")->required();
  c_mean->add_option("--out", mean_out, "output .srvf path")->required();
  c_mean->add_option("--eps", mean_cfg.epsilon, "step size")->capture_default_str();
  c_mean->add_option("--tau", mean_cfg.threshold, "convergence threshold")->capture_default_str();
  c_mean->add_option("--max-iters", mean_cfg.max_iters, "iteration cap")->capture_default_str();

  // ---- synth ----
  auto* c_synth = app.add_subcommand("synth", "generate synthetic chain motions");
  std::string synth_kind = "pendulum_walk", synth_dir;
  int synth_count = 10;
  Eigen::Index synth_frames = 100;
  std::uint64_t synth_seed = 0;
  c_synth->add_option("--kind", synth_kind, "pendulum_walk, figure8 or two_mode")
      ->capture_default_str();
  c_synth->add_option("--count", synth_count, "number of sequences")->capture_default_str();
  c_synth->add_option("--frames", synth_frames, "frames per sequence")->capture_default_str();
  c_synth->add_option("--seed", synth_seed, "generator seed")->capture_default_str();
  c_synth->add_option("--out-dir", synth_dir, "output directory")->required();

  // ---- train ----
  auto* c_train = app.add_subcommand("train", "train a predictor from a config file");
  std::string train_config;
  std::vector<std::string> train_sets;
  c_train->add_option("--config", train_config, "config file (key = value lines)");
  c_train->add_option("--set", train_sets, "override: key=value (repeatable)");

  // ---- predict ----
  auto* c_pred = app.add_subcommand("predict", "predict future motion from a prior CSV");
  std::string pred_ckpt, pred_prior, pred_out;
  Eigen::Index pred_horizon = 0;
  int pred_recursive = 1;
  c_pred->add_option("--ckpt", pred_ckpt, "checkpoint file")->required();
  c_pred->add_option("--prior", pred_prior, "prior motion CSV")->required();
  c_pred->add_option("--out", pred_out, "output motion CSV")->required();
  c_pred->add_option("--horizon", pred_horizon, "frames per prediction (default: trained length)");
  c_pred->add_option("--recursive", pred_recursive, "number of chained predictions")
      ->capture_default_str();

  // ---- eval ----
  auto* c_eval = app.add_subcommand("eval", "evaluate a checkpoint on the test split");
  std::string eval_config, eval_ckpt, eval_out;
  std::vector<std::string> eval_sets;
  int eval_draws = 100, eval_draw_size = 8;
  std::uint64_t eval_seed = 1;
  c_eval->add_option("--config", eval_config, "config file naming the dataset");
  c_eval->add_option("--set", eval_sets, "override: key=value (repeatable)");
  c_eval->add_option("--ckpt", eval_ckpt, "checkpoint file")->required();
  c_eval->add_option("--out", eval_out, "report output path")->required();
  c_eval->add_option("--draws", eval_draws, "resampling draw count")->capture_default_str();
  c_eval->add_option("--draw-size", eval_draw_size, "sequences per draw")->capture_default_str();
  c_eval->add_option("--eval-seed", eval_seed, "resampling seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (c_enc->parsed()) {
    const PoseSequence seq = load_motion_csv(enc_in);
    const ScaledSrvf s = srvf_encode(sequence_to_curve(seq), enc_anchor == "first"
                                                                 ? AnchorRule::kFirstSample
                                                                 : AnchorRule::kLastSample);
    save_srvf(enc_out, s);
    info("encoded " + enc_in + " (" + std::to_string(seq.frames()) + " frames) -> " + enc_out);
    return 0;
  }

  if (c_dec->parsed()) {
    ScaledSrvf s = load_srvf(dec_in);
    if (!dec_prior.empty()) {
      const PoseSequence prior = load_motion_csv(dec_prior);
      if (prior.flat.cols() != s.point.dim())
        throw DimensionError("decode: prior dimension differs from the SRVF");
      s = ScaledSrvf(s.point, s.scale, prior.flat.row(prior.frames() - 1));
    }
    const Eigen::Index frames = dec_frames > 0 ? dec_frames : s.point.time_samples();
    const Curve c = srvf_decode(s, frames);
    const auto joints = static_cast<int>(c.samples.cols() / 3);
    save_motion_csv(dec_out, curve_to_sequence(c, joints, dec_fps));
    info("decoded " + dec_in + " -> " + dec_out);
    return 0;
  }

  if (c_dist->parsed()) {
    const ScaledSrvf a = load_srvf(dist_a);
    const ScaledSrvf b = load_srvf(dist_b);
    std::printf("%s\n", format_double(geodesic_distance(a.point, b.point)).c_str());
    return 0;
  }

  if (c_mean->parsed()) {
    std::vector<SrvfPoint> points;
    Eigen::RowVectorXd anchor;
    double scale_acc = 0.0;
    for (const std::string& f : mean_in) {
      const ScaledSrvf s = load_srvf(f);
      if (points.empty()) anchor = s.anchor;
      scale_acc += s.scale;
      points.push_back(s.point);
    }
    const KarcherResult r = karcher_mean(points, mean_cfg);
    save_srvf(mean_out,
              ScaledSrvf(r.mean, scale_acc / static_cast<double>(points.size()), anchor));
    std::printf("iterations %d final_step_norm %s\n", r.iterations,
                format_double(r.final_step_norm).c_str());
    return 0;
  }

  if (c_synth->parsed()) {
    fs::create_directories(synth_dir);
    const auto motions = synthetic_motions(synthetic_kind_from_string(synth_kind), synth_count,
                                           synth_frames, synth_seed);
    for (std::size_t i = 0; i < motions.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "sample_%03zu.csv", i);
      save_motion_csv((fs::path(synth_dir) / name).string(), motions[i]);
    }
    chain5_topology().save((fs::path(synth_dir) / "chain5.topo").string());
    info("wrote " + std::to_string(motions.size()) + " sequences to " + synth_dir);
    return 0;
  }

  if (c_train->parsed()) {
    const CliConfig cfg = CliConfig::load(train_config, train_sets);
    const DatasetPair data = build_datasets(cfg);
    info("training on " + std::to_string(data.train.samples.size()) + " pairs, validating on " +
         std::to_string(data.test.samples.size()));
    const gan::TrainResult r =
        gan::train(data.train, cfg.train, data.test.samples.empty() ? nullptr : &data.test);
    gan::save_checkpoint(cfg.checkpoint_out, r.checkpoint);
    write_text(cfg.checkpoint_out + ".manifest", data.manifest.to_text());
    info("karcher mean: " + std::to_string(r.karcher_iterations) + " iterations, residual " +
         format_double(r.karcher_residual));
    if (!cfg.log_out.empty()) {
      std::string log = "epoch,adversarial,reconstruction,integrity,bone,total,val_mpjpe\n";
      for (const gan::EpochLog& e : r.log) {
        log += std::to_string(e.epoch) + "," + format_double(e.losses.adversarial) + "," +
               format_double(e.losses.reconstruction) + "," + format_double(e.losses.integrity) +
               "," + format_double(e.losses.bone) + "," + format_double(e.losses.total) + "," +
               format_double(e.val_mpjpe) + "\n";
      }
      write_text(cfg.log_out, log);
    }
    info("checkpoint written to " + cfg.checkpoint_out);
    return 0;
  }

  if (c_pred->parsed()) {
    const gan::Checkpoint ckpt = gan::load_checkpoint(pred_ckpt);
    const PoseSequence prior = load_motion_csv(pred_prior);
    const Eigen::Index horizon = pred_horizon > 0 ? pred_horizon : ckpt.future_len;
    const PoseSequence out = pred_recursive > 1
                                 ? gan::recursive_predict(ckpt, prior, pred_recursive, horizon)
                                 : gan::predict(ckpt, prior, horizon);
    save_motion_csv(pred_out, out);
    info("predicted " + std::to_string(out.frames()) + " frames -> " + pred_out);
    return 0;
  }

  if (c_eval->parsed()) {
    const CliConfig cfg = CliConfig::load(eval_config, eval_sets);
    const gan::Checkpoint ckpt = gan::load_checkpoint(eval_ckpt);
    const DatasetPair data = build_datasets(cfg);
    if (data.test.samples.empty()) throw ParseError("eval: test split is empty");
    const EvalReport rep = gan::evaluate(ckpt, data.test, eval_draws, eval_draw_size, eval_seed);
    write_text(eval_out, rep.to_text());
    info("report written to " + eval_out);
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const TrainingDivergedError& e) {
    std::cerr << "error (training diverged): " << e.what() << "\n";
    return 5;
  } catch (const ConvergenceError& e) {
    std::cerr << "error (no convergence): " << e.what() << "\n";
    return 4;
  } catch (const DomainError& e) {
    std::cerr << "error (domain): " << e.what() << "\n";
    return 4;
  } catch (const ParseError& e) {
    std::cerr << "error (parse): " << e.what() << "\n";
    return 3;
  } catch (const DegenerateInputError& e) {
    std::cerr << "error (degenerate input): " << e.what() << "\n";
    return 3;
  } catch (const DimensionError& e) {
    std::cerr << "error (shape): " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
