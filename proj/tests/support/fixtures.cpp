#include "fixtures.hpp"

#include <cmath>

namespace oracular::fixtures {

features::ChromaSequence symbols_to_chroma(std::string_view symbols) {
  features::ChromaSequence seq;
  for (char c : symbols) {
    features::ChromaFrame f{};
    f[static_cast<std::size_t>(c - 'a') % features::kNumPitchClasses] = 1.0;
    seq.frames.push_back(f);
  }
  return seq;
}

features::ChromaSequence random_chroma(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  features::ChromaSequence seq;
  for (std::size_t i = 0; i < n; ++i) {
    features::ChromaFrame f{};
    double norm = 0.0;
    for (double& v : f) {
      v = u(rng);
      norm += v * v;
    }
    for (double& v : f) v /= std::sqrt(norm);
    seq.frames.push_back(f);
  }
  return seq;
}

std::vector<std::string> all_strings(std::size_t alphabet, std::size_t len) {
  std::vector<std::string> out{""};
  for (std::size_t i = 0; i < len; ++i) {
    std::vector<std::string> next;
    next.reserve(out.size() * alphabet);
    for (const auto& s : out) {
      for (std::size_t a = 0; a < alphabet; ++a) next.push_back(s + static_cast<char>('a' + a));
    }
    out = std::move(next);
  }
  return out;
}

midi::PianoRoll random_roll(std::size_t steps, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution on(density);
  midi::PianoRoll roll(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t p = 0; p < midi::kNumPitches; ++p) {
      if (on(rng)) roll.set(s, p);
    }
  }
  return roll;
}

midi::PianoRoll phrase_roll(std::size_t bars, std::size_t phrase_bars, double density, std::mt19937_64& rng) {
  const midi::PianoRoll phrase = random_roll(phrase_bars * midi::kStepsPerBar, density, rng);
  midi::PianoRoll roll(bars * midi::kStepsPerBar);
  for (std::size_t s = 0; s < roll.num_steps(); ++s) {
    for (std::size_t p = 0; p < midi::kNumPitches; ++p) {
      if (phrase.active(s % phrase.num_steps(), p)) roll.set(s, p);
    }
  }
  return roll;
}

midi::PianoRoll scattered_roll(std::size_t steps, std::size_t active, std::mt19937_64& rng) {
  midi::PianoRoll roll(steps);
  std::uniform_int_distribution<std::size_t> cell(0, steps * midi::kNumPitches - 1);
  while (roll.active_count() < active) {
    const std::size_t c = cell(rng);
    roll.set(c / midi::kNumPitches, c % midi::kNumPitches);
  }
  return roll;
}

cvrnn::CvrnnParams random_params(const cvrnn::Architecture& arch, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, scale);
  cvrnn::CvrnnParams p = cvrnn::CvrnnParams::zeros(arch);
  for (auto& [name, t] : p.named_tensors()) {
    for (double& v : t->values()) v = n(rng);
  }
  return p;
}

cvrnn::Batch random_batch(const cvrnn::Architecture& arch, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution on(density);
  cvrnn::Batch batch(arch.seq_len, cvrnn::Frame(arch.frame_size()));
  for (auto& f : batch) {
    for (double& v : f) v = on(rng) ? 1.0 : 0.0;
  }
  return batch;
}

}  // namespace oracular::fixtures
