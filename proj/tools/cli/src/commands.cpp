#include "oracular_cli/commands.hpp"

#include <fstream>

#include <spdlog/spdlog.h>

#include "oracular/checkpoint.hpp"
#include "oracular/serialize.hpp"
#include "oracular_cli/analysis.hpp"
#include "oracular_cli/compare.hpp"

namespace oracular::cli {

Corpus load_corpus(const std::string& dir) {
  Corpus c;
  const std::size_t min_steps = midi::kFramesPerBatch * midi::kStepsPerFrame;
  for (const auto& path : midi_files(dir)) {
    try {
      midi::PianoRoll roll = load_roll(path);
      if (roll.num_steps() < min_steps) {
        spdlog::warn("{}: shorter than 8 bars; skipped", path);
        ++c.too_short;
        continue;
      }
      c.songs.push_back(std::move(roll));
      c.used.push_back(path);
    } catch (const std::exception& e) {
      spdlog::warn("{}: {}; skipped", path, e.what());
      ++c.unreadable;
    }
  }
  return c;
}

cvrnn::TrainingConfig training_config(const RunConfig& cfg) {
  cvrnn::TrainingConfig t;
  t.epochs = cfg.epochs;
  t.learning_rate = cfg.learning_rate;
  t.z_dim = cfg.z_dim;
  t.dropout_p = cfg.dropout_p;
  t.rng_seed = cfg.seed;
  return t;
}

TrainSummary run_train(const RunConfig& cfg, const std::string& checkpoint_path, const std::string& loss_csv_path) {
  TrainSummary s;
  s.corpus = load_corpus(cfg.data_dir);
  spdlog::info("corpus: {} songs, {} unreadable, {} too short", s.corpus.songs.size(), s.corpus.unreadable,
               s.corpus.too_short);
  if (s.corpus.songs.empty()) {
    throw cvrnn::TrainingError(cvrnn::TrainingErrc::kEmptyCorpus, "no usable MIDI file in " + cfg.data_dir);
  }

  const cvrnn::TrainingConfig tc = training_config(cfg);
  const cvrnn::TrainResult result = cvrnn::train(s.corpus.songs, tc, {}, [](std::size_t epoch, const cvrnn::EpochLoss& l) {
    spdlog::info("epoch {}: kl {:.4f} reconstruction {:.4f} total {:.4f}", epoch, l.kl, l.reconstruction, l.total);
  });

  cvrnn::save_checkpoint(checkpoint_path, {result.params, tc});
  std::ofstream csv(loss_csv_path);
  if (!csv) throw std::runtime_error("cannot write " + loss_csv_path);
  csv << cvrnn::loss_history_csv(result.history);

  s.final_loss = result.history.empty() ? cvrnn::EpochLoss{} : result.history.back();
  s.checkpoint_path = checkpoint_path;
  s.loss_csv_path = loss_csv_path;
  return s;
}

void run_generate(const std::string& checkpoint_path, double bars, std::uint64_t seed, cvrnn::Binarize mode,
                  const std::string& out_path) {
  const cvrnn::Checkpoint ckpt = cvrnn::load_checkpoint(checkpoint_path);
  const midi::PianoRoll roll = cvrnn::generate(ckpt.params, bars, seed, mode);
  const auto bytes = midi::write_smf(roll);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  spdlog::info("{}: {} steps, {} active cells", out_path, roll.num_steps(), roll.active_count());
}

std::string run_motifs(const std::string& midi_path, std::size_t hop, std::size_t min_len, bool csv) {
  const AnalysisReport r = analyze_file(midi_path, hop, min_len);
  return csv ? to_csv(r.motifs) : to_json(r.motifs) + "\n";
}

std::string run_sweep(const std::string& midi_path, std::size_t hop, bool csv) {
  const auto chroma = features::chroma_from_piano_roll(load_roll(midi_path), hop);
  const auto sweep = oracle::sweep_threshold(chroma);
  return csv ? curve_to_csv(sweep) : to_json(sweep) + "\n";
}

}  // namespace oracular::cli
