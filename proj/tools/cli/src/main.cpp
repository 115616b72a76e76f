#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "oracular_cli/analysis.hpp"
#include "oracular_cli/commands.hpp"
#include "oracular_cli/compare.hpp"
#include "oracular_cli/run_config.hpp"

using namespace oracular;

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("oracular");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("ORACULAR_LOG");
  const std::string level = env ? env : "warn";
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "warn") {
    spdlog::set_level(spdlog::level::warn);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    spdlog::set_level(spdlog::level::warn);
    spdlog::warn("ORACULAR_LOG='{}' not one of error, warn, info, debug; using warn", level);
  }
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Symbolic music structure analysis and a convolutional-variational RNN generator"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "key=value run configuration file")->check(CLI::ExistingFile);
  cli::ConfigLayer flags;

  auto* analyze = app.add_subcommand("analyze", "Threshold sweep, total IR and motifs of one MIDI file (JSON)");
  std::string analyze_path, analyze_out;
  analyze->add_option("midi", analyze_path, "input MIDI file")->required();
  analyze->add_option("--hop", flags.hop, "piano-roll steps per chroma frame");
  analyze->add_option("--min-len", flags.min_motif_len, "shortest motif in chroma frames");
  analyze->add_option("--out", analyze_out, "write the report here instead of stdout");

  auto* sweep = app.add_subcommand("sweep", "Total IR against threshold for one MIDI file");
  std::string sweep_path, sweep_format = "csv";
  sweep->add_option("midi", sweep_path, "input MIDI file")->required();
  sweep->add_option("--hop", flags.hop, "piano-roll steps per chroma frame");
  sweep->add_option("--format", sweep_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* motifs = app.add_subcommand("motifs", "Repeated patterns at the best threshold");
  std::string motifs_path, motifs_format = "csv";
  motifs->add_option("midi", motifs_path, "input MIDI file")->required();
  motifs->add_option("--min-len", flags.min_motif_len, "shortest motif in chroma frames");
  motifs->add_option("--hop", flags.hop, "piano-roll steps per chroma frame");
  motifs->add_option("--format", motifs_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* train = app.add_subcommand("train", "Train the generator on a directory of MIDI files");
  std::string checkpoint_out = "model.ckpt", loss_csv = "loss.csv";
  train->add_option("--data-dir", flags.data_dir, "directory of training MIDI files");
  train->add_option("--epochs", flags.epochs);
  train->add_option("--learning-rate", flags.learning_rate);
  train->add_option("--z-dim", flags.z_dim);
  train->add_option("--dropout", flags.dropout_p);
  train->add_option("--seed", flags.seed);
  train->add_option("--checkpoint", checkpoint_out, "checkpoint output path");
  train->add_option("--loss-csv", loss_csv, "loss history output path");

  auto* generate = app.add_subcommand("generate", "Sample a MIDI file from a trained checkpoint");
  std::string checkpoint_in, generate_out = "generated.mid", binarize = "threshold";
  double bars = 8.0;
  generate->add_option("checkpoint", checkpoint_in, "checkpoint file")->required();
  generate->add_option("--bars", bars, "length in bars, a multiple of 0.5");
  generate->add_option("--seed", flags.seed);
  generate->add_option("--binarize", binarize, "threshold or bernoulli")
      ->check(CLI::IsMember({"threshold", "bernoulli"}));
  generate->add_option("--out", generate_out, "output MIDI path");

  auto* compare = app.add_subcommand("compare", "Mean total IR per directory at a fixed length (CSV)");
  std::vector<std::string> dirs;
  int compare_bars = 8;
  std::string compare_out;
  compare->add_option("--dirs", dirs, "directories to compare")->required()->delimiter(',');
  compare->add_option("--bars", compare_bars, "8, 16 or 32")->check(CLI::IsMember({8, 16, 32}));
  compare->add_option("--hop", flags.hop, "piano-roll steps per chroma frame");
  compare->add_option("--out", compare_out, "write the table here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    const cli::ConfigLayer file = config_path.empty() ? cli::ConfigLayer{} : cli::load_config_file(config_path);
    const cli::RunConfig cfg = cli::resolve(file, flags);

    if (*analyze) {
      emit(cli::report_to_json(cli::analyze_file(analyze_path, cfg.hop, cfg.min_motif_len)), analyze_out);
    } else if (*sweep) {
      std::cout << cli::run_sweep(sweep_path, cfg.hop, sweep_format == "csv");
    } else if (*motifs) {
      std::cout << cli::run_motifs(motifs_path, cfg.hop, cfg.min_motif_len, motifs_format == "csv");
    } else if (*train) {
      const auto s = cli::run_train(cfg, checkpoint_out, loss_csv);
      std::cout << "trained on " << s.corpus.songs.size() << " files (" << s.corpus.unreadable << " unreadable, "
                << s.corpus.too_short << " too short)\n"
                << "final loss: kl " << s.final_loss.kl << " reconstruction " << s.final_loss.reconstruction
                << " total " << s.final_loss.total << "\n"
                << "checkpoint: " << s.checkpoint_path << "\nloss history: " << s.loss_csv_path << "\n";
    } else if (*generate) {
      cli::run_generate(checkpoint_in, bars, cfg.seed,
                        binarize == "bernoulli" ? cvrnn::Binarize::kBernoulli : cvrnn::Binarize::kThreshold,
                        generate_out);
      std::cout << generate_out << "\n";
    } else if (*compare) {
      emit(cli::compare_csv(cli::compare_dirs(dirs, compare_bars, cfg.hop), compare_bars), compare_out);
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
