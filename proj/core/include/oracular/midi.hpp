#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracular::midi {

inline constexpr std::size_t kNumPitches = 128;
// One piano-roll step is an eighth note; a model frame is half a 4/4 bar.
inline constexpr std::size_t kStepsPerFrame = 4;
inline constexpr std::size_t kFramesPerBatch = 16;
inline constexpr std::size_t kStepsPerBar = 8;
// Upper bound on quantized length (~32k bars); protects against absurd tick values.
inline constexpr std::size_t kMaxSteps = std::size_t{1} << 18;

enum class MidiErrc {
  kMalformedHeader,
  kTruncatedChunk,
  kUnsupportedFormat,
  kMalformedEvent,
  kEmptyDocument,
  kTooLong,
};

const char* to_string(MidiErrc code);

class MidiError : public std::runtime_error {
 public:
  MidiError(MidiErrc code, const std::string& what);
  MidiErrc code() const noexcept { return code_; }

 private:
  MidiErrc code_;
};

struct NoteEvent {
  int pitch = 0;
  std::int64_t onset = 0;
  std::int64_t duration = 1;
  int velocity = 64;
  int channel = 0;

  friend bool operator==(const NoteEvent&, const NoteEvent&) = default;
};

struct TempoChange {
  std::int64_t tick = 0;
  std::uint32_t micros_per_quarter = 500000;

  friend bool operator==(const TempoChange&, const TempoChange&) = default;
};

struct SmfDocument {
  int format = 0;
  int ticks_per_quarter = 480;
  std::vector<std::vector<NoteEvent>> tracks;
  std::vector<TempoChange> tempo_changes;
  // Largest End-of-Track tick over all tracks.
  std::int64_t end_tick = 0;

  std::size_t note_count() const;
};

/// Decodes a variable-length quantity starting at `pos`, advancing it.
/// Throws MidiError(kTruncatedChunk) on running off the end and
/// kMalformedEvent for quantities longer than four bytes.
std::uint32_t read_vlq(std::span<const std::uint8_t> bytes, std::size_t& pos);
void append_vlq(std::vector<std::uint8_t>& out, std::uint32_t value);

/// Parses a format 0 or 1 Standard MIDI File. Note-ons with velocity 0
/// count as note-offs, running status is honoured, and notes still sounding
/// at End-of-Track are closed there. Never crashes on arbitrary input: every
/// failure is reported as a MidiError.
SmfDocument parse_smf(std::span<const std::uint8_t> bytes);

/// Binary (num_steps x 128) grid at eighth-note resolution.
class PianoRoll {
 public:
  explicit PianoRoll(std::size_t num_steps = 1, int beats_per_bar = 4);

  std::size_t num_steps() const { return num_steps_; }
  int beats_per_bar() const { return beats_per_bar_; }

  bool active(std::size_t step, std::size_t pitch) const {
    return cells_[step * kNumPitches + pitch] != 0;
  }
  void set(std::size_t step, std::size_t pitch, bool on = true) {
    cells_[step * kNumPitches + pitch] = on ? 1 : 0;
  }
  std::span<const std::uint8_t> row(std::size_t step) const {
    return {cells_.data() + step * kNumPitches, kNumPitches};
  }
  std::span<const std::uint8_t> cells() const { return cells_; }

  std::size_t active_count() const;
  /// First `num_steps` steps (zero-extended if the roll is shorter).
  PianoRoll resized(std::size_t num_steps) const;

  friend bool operator==(const PianoRoll&, const PianoRoll&) = default;

 private:
  std::size_t num_steps_;
  int beats_per_bar_;
  std::vector<std::uint8_t> cells_;
};

/// Merges every track into one roll. A note covers
/// round(onset / step) .. + max(1, round(duration / step)) with
/// step = ticks_per_quarter / 2. Throws kEmptyDocument when there are no notes.
PianoRoll quantize(const SmfDocument& doc);

/// Consecutive non-overlapping windows of kStepsPerFrame steps, row-major
/// [step][pitch], the last one zero-padded.
struct FrameSequence {
  std::vector<std::vector<std::uint8_t>> frames;
  std::size_t source_steps = 0;
  std::size_t frames_per_batch = kFramesPerBatch;

  std::size_t size() const { return frames.size(); }
  /// Number of complete batches of frames_per_batch frames.
  std::size_t full_batches() const { return frames.size() / frames_per_batch; }
};

FrameSequence piano_roll_to_frames(const PianoRoll& roll);

/// Concatenates frames along time and trims to `num_steps`
/// (0 means keep every step, padding included).
PianoRoll frames_to_piano_roll(const FrameSequence& frames, std::size_t num_steps = 0);

/// Format 0 file: tempo 120 BPM, 4/4, each maximal horizontal run of active
/// cells becomes one note. End-of-Track sits at the end of the last step so
/// the roll length survives a round trip.
std::vector<std::uint8_t> write_smf(const PianoRoll& roll, int ticks_per_quarter = 480);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);

}  // namespace oracular::midi
