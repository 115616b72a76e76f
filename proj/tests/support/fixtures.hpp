#pragma once

// Shared builders for tests and the acceptance binary.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "oracular/cvrnn.hpp"
#include "oracular/features.hpp"
#include "oracular/midi.hpp"
#include "oracular/oracle.hpp"

namespace oracular::fixtures {

/// Symbol k becomes the unit chroma vector at pitch class k, so distinct
/// symbols sit at distance sqrt(2) and equal ones at 0.
features::ChromaSequence symbols_to_chroma(std::string_view symbols);

/// Uniform random unit chroma frames.
features::ChromaSequence random_chroma(std::size_t n, std::mt19937_64& rng);

/// Every string of length `len` over the first `alphabet` letters of a..z.
std::vector<std::string> all_strings(std::size_t alphabet, std::size_t len);

/// Each cell active independently with probability `density`.
midi::PianoRoll random_roll(std::size_t steps, double density, std::mt19937_64& rng);

/// A random_roll phrase of `phrase_bars` bars repeated to fill `bars` bars.
midi::PianoRoll phrase_roll(std::size_t bars, std::size_t phrase_bars, double density, std::mt19937_64& rng);

/// Exactly `active` cells placed uniformly at random.
midi::PianoRoll scattered_roll(std::size_t steps, std::size_t active, std::mt19937_64& rng);

/// Polyphonic texture used by the structure-ordering checks: about three
/// notes per eighth-note step.
inline constexpr double kPhraseDensity = 3.0 / 128.0;

/// Random parameters with every tensor drawn from N(0, scale^2).
cvrnn::CvrnnParams random_params(const cvrnn::Architecture& arch, double scale, std::mt19937_64& rng);

/// Random binary frames for `arch`.
cvrnn::Batch random_batch(const cvrnn::Architecture& arch, double density, std::mt19937_64& rng);

}  // namespace oracular::fixtures
