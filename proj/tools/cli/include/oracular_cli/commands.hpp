#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "oracular/training.hpp"
#include "oracular_cli/run_config.hpp"

namespace oracular::cli {

struct Corpus {
  std::vector<midi::PianoRoll> songs;
  std::vector<std::string> used;     // files that entered the corpus
  std::size_t unreadable = 0;        // failed to parse or had no notes
  std::size_t too_short = 0;         // fewer than 8 bars
};

/// Every MIDI file in `dir` with at least one full batch (8 bars).
Corpus load_corpus(const std::string& dir);

struct TrainSummary {
  Corpus corpus;
  cvrnn::EpochLoss final_loss;
  std::string checkpoint_path;
  std::string loss_csv_path;
};

cvrnn::TrainingConfig training_config(const RunConfig& cfg);

/// Loads the corpus from cfg.data_dir, trains, writes the checkpoint and the
/// loss history. Throws TrainingError(kEmptyCorpus) when no file qualifies.
TrainSummary run_train(const RunConfig& cfg, const std::string& checkpoint_path, const std::string& loss_csv_path);

/// Loads a checkpoint, generates `bars` bars and writes a MIDI file.
void run_generate(const std::string& checkpoint_path, double bars, std::uint64_t seed, cvrnn::Binarize mode,
                  const std::string& out_path);

/// Motif listing of one file at its best threshold, as JSON or CSV.
std::string run_motifs(const std::string& midi_path, std::size_t hop, std::size_t min_len, bool csv);

/// Threshold curve of one file, as JSON (SweepResult) or CSV.
std::string run_sweep(const std::string& midi_path, std::size_t hop, bool csv);

}  // namespace oracular::cli
