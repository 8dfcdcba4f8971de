// bcgnn: synthesize data, train, run inference and evaluate proposals.
//
// Exit codes: 0 success, 2 invalid input or configuration, 3 numeric failure
// during training, 1 anything else.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bcgnn/commands.hpp"
#include "bcgnn/errors.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string ablation;
  std::size_t jobs = 1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "key=value configuration file");
  cmd->add_option("--seed", flags.seed, "overrides the seed key");
  cmd->add_option("--ablation", flags.ablation, "directed=<bool>,edge_update=<bool>,gcn_baseline=<bool>");
  cmd->add_option("--jobs", flags.jobs, "worker threads")->check(CLI::PositiveNumber);
}

bool has_overrides(const CommonFlags& flags) {
  return !flags.config_path.empty() || flags.seed || !flags.ablation.empty();
}

bcgnn::app::RunConfig resolve(const CommonFlags& flags, bcgnn::app::RunConfig base = {}) {
  bcgnn::app::RunConfig config =
      flags.config_path.empty() ? base : bcgnn::app::load_run_config(flags.config_path, base);
  if (flags.seed) config.seed = *flags.seed;
  if (!flags.ablation.empty()) bcgnn::app::apply_ablation(config, flags.ablation);
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-content graph proposal generator"};
  app.require_subcommand(1);
  CommonFlags flags;

  std::string out_dir;
  auto* synth = app.add_subcommand("synth", "write a synthetic dataset");
  add_common(synth, flags);
  synth->add_option("--out", out_dir, "output directory")->required();

  std::string data_dir, checkpoint, log_path;
  auto* train = app.add_subcommand("train", "train a model");
  add_common(train, flags);
  train->add_option("--data", data_dir, "dataset directory")->required();
  train->add_option("--out", checkpoint, "checkpoint path")->required();
  train->add_option("--log", log_path, "also write the epoch log here");

  std::string results_path;
  auto* infer = app.add_subcommand("infer", "generate proposals");
  add_common(infer, flags);
  infer->add_option("--checkpoint", checkpoint, "checkpoint path")->required();
  infer->add_option("--data", data_dir, "dataset directory")->required();
  infer->add_option("--out", results_path, "result file")->required();

  std::string annotations_path, report_path;
  bool force = false;
  auto* eval = app.add_subcommand("eval", "compute AR@AN and AUC");
  add_common(eval, flags);
  eval->add_option("--results", results_path, "result file")->required();
  eval->add_option("--annotations", annotations_path, "annotation file")->required();
  eval->add_option("--out", report_path, "metrics report path");
  eval->add_flag("--force", force, "accept results produced under a different config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      bcgnn::app::cmd_synth(resolve(flags), out_dir);
      std::cout << "wrote dataset to " << out_dir << "\n";
    } else if (*train) {
      std::ofstream log_file;
      if (!log_path.empty()) log_file.open(log_path);
      struct Tee : std::streambuf {
        std::streambuf* a;
        std::streambuf* b;
        Tee(std::streambuf* x, std::streambuf* y) : a(x), b(y) {}
        int overflow(int c) override {
          if (c == EOF) return !EOF;
          a->sputc(static_cast<char>(c));
          if (b) b->sputc(static_cast<char>(c));
          return c;
        }
        int sync() override {
          a->pubsync();
          if (b) b->pubsync();
          return 0;
        }
      } tee(std::cout.rdbuf(), log_file.is_open() ? log_file.rdbuf() : nullptr);
      std::ostream log(&tee);
      bcgnn::app::cmd_train(resolve(flags), data_dir, checkpoint, log);
    } else if (*infer) {
      std::optional<bcgnn::app::RunConfig> config;
      if (has_overrides(flags)) {
        // Start from the checkpoint's settings so partial overrides keep the network intact.
        const auto ckpt = bcgnn::train::load_checkpoint(checkpoint);
        config = resolve(flags, bcgnn::app::parse_run_config(ckpt.config_text));
      }
      const auto results = bcgnn::app::cmd_infer(checkpoint, data_dir, results_path, config, flags.jobs);
      std::cout << "wrote proposals for " << results.size() << " videos to " << results_path << "\n";
    } else if (*eval) {
      std::optional<bcgnn::app::RunConfig> config;
      if (has_overrides(flags)) config = resolve(flags);
      std::optional<std::filesystem::path> report;
      if (!report_path.empty()) report = report_path;
      const auto r = bcgnn::app::cmd_eval(results_path, annotations_path, config, force, report);
      std::cout << bcgnn::eval::report_to_json(r) << "\n";
    }
  } catch (const bcgnn::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
