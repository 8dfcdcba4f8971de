#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "bcgnn/result_io.hpp"
#include "bcgnn/run_config.hpp"
#include "bcgnn/training.hpp"

// Entry points behind the command line tool. Each writes its outputs to disk
// and echoes the config hash into them.
namespace bcgnn::app {

/// Path of the metadata file written next to an output file or directory.
std::filesystem::path meta_path(const std::filesystem::path& output);

struct RunMeta {
  std::string config_hash;
  std::string config_text;
};
void save_meta(const std::filesystem::path& output, const RunConfig& config);
std::optional<RunMeta> load_meta(const std::filesystem::path& output);

/// Generates the synthetic dataset into `out_dir`.
void cmd_synth(const RunConfig& config, const std::filesystem::path& out_dir);

struct TrainSummary {
  train::TrainResult result;
  std::string config_hash;
};

/// Trains on the dataset in `data_dir` and writes the selected parameters to
/// `checkpoint`. The last validation_fraction of videos is held out for model
/// selection. One JSON line per epoch goes to `log`.
TrainSummary cmd_train(const RunConfig& config, const std::filesystem::path& data_dir,
                       const std::filesystem::path& checkpoint, std::ostream& log);

/// Runs the checkpointed model over every video in `data_dir`. Without an
/// explicit config the one stored in the checkpoint is used; an explicit
/// config must describe the same network.
eval::ProposalResults cmd_infer(const std::filesystem::path& checkpoint,
                                const std::filesystem::path& data_dir,
                                const std::filesystem::path& out_file,
                                const std::optional<RunConfig>& config, std::size_t jobs);

/// Scores a result file against annotations. The config defaults to the one
/// recorded with the results; an explicit config whose hash differs is
/// refused unless `force` is set.
eval::MetricsReport cmd_eval(const std::filesystem::path& results_file,
                             const std::filesystem::path& annotations_file,
                             const std::optional<RunConfig>& config, bool force,
                             const std::optional<std::filesystem::path>& report_file);

}  // namespace bcgnn::app
