#include "oracular/midi.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iterator>
#include <map>
#include <utility>

namespace oracular::midi {

const char* to_string(MidiErrc code) {
  switch (code) {
    case MidiErrc::kMalformedHeader: return "MalformedHeader";
    case MidiErrc::kTruncatedChunk: return "TruncatedChunk";
    case MidiErrc::kUnsupportedFormat: return "UnsupportedFormat";
    case MidiErrc::kMalformedEvent: return "MalformedEvent";
    case MidiErrc::kEmptyDocument: return "EmptyDocument";
    case MidiErrc::kTooLong: return "TooLong";
  }
  return "Unknown";
}

MidiError::MidiError(MidiErrc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

std::size_t SmfDocument::note_count() const {
  std::size_t n = 0;
  for (const auto& t : tracks) n += t.size();
  return n;
}

namespace {

std::uint32_t read_be(std::span<const std::uint8_t> bytes, std::size_t pos, int width) {
  std::uint32_t v = 0;
  for (int i = 0; i < width; ++i) v = (v << 8) | bytes[pos + static_cast<std::size_t>(i)];
  return v;
}

void append_be(std::vector<std::uint8_t>& out, std::uint32_t value, int width) {
  for (int i = width - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

std::uint8_t next_byte(std::span<const std::uint8_t> track, std::size_t& pos) {
  if (pos >= track.size()) throw MidiError(MidiErrc::kTruncatedChunk, "event runs past end of track");
  return track[pos++];
}

std::uint8_t next_data_byte(std::span<const std::uint8_t> track, std::size_t& pos) {
  const std::uint8_t b = next_byte(track, pos);
  if (b & 0x80) throw MidiError(MidiErrc::kMalformedEvent, "status byte where data byte expected");
  return b;
}

struct TrackResult {
  std::vector<NoteEvent> notes;
  std::vector<TempoChange> tempos;
  std::int64_t end_tick = 0;
};

TrackResult parse_track(std::span<const std::uint8_t> track) {
  TrackResult result;
  // Open note-ons per (channel, pitch), matched first-in first-out.
  std::map<std::pair<int, int>, std::deque<std::pair<std::int64_t, int>>> open;
  std::size_t pos = 0;
  std::int64_t tick = 0;
  int running = -1;
  bool ended = false;

  auto close_note = [&](int channel, int pitch) {
    auto it = open.find({channel, pitch});
    if (it == open.end() || it->second.empty()) return;
    auto [onset, velocity] = it->second.front();
    it->second.pop_front();
    if (tick > onset) {
      result.notes.push_back({pitch, onset, tick - onset, velocity, channel});
    }
  };

  while (pos < track.size() && !ended) {
    tick += read_vlq(track, pos);
    std::uint8_t status = next_byte(track, pos);
    if (status < 0x80) {
      if (running < 0) throw MidiError(MidiErrc::kMalformedEvent, "data byte without running status");
      --pos;
      status = static_cast<std::uint8_t>(running);
    }

    if (status == 0xFF) {
      running = -1;
      const std::uint8_t type = next_byte(track, pos);
      const std::uint32_t len = read_vlq(track, pos);
      if (len > track.size() - pos) throw MidiError(MidiErrc::kTruncatedChunk, "meta event longer than track");
      if (type == 0x51 && len == 3) {
        result.tempos.push_back({tick, read_be(track, pos, 3)});
      } else if (type == 0x2F) {
        ended = true;
      }
      pos += len;
    } else if (status == 0xF0 || status == 0xF7) {
      running = -1;
      const std::uint32_t len = read_vlq(track, pos);
      if (len > track.size() - pos) throw MidiError(MidiErrc::kTruncatedChunk, "sysex longer than track");
      pos += len;
    } else if (status >= 0xF0) {
      throw MidiError(MidiErrc::kMalformedEvent, "system message not allowed in a track");
    } else {
      running = status;
      const int kind = status & 0xF0;
      const int channel = status & 0x0F;
      const std::uint8_t a = next_data_byte(track, pos);
      if (kind == 0xC0 || kind == 0xD0) continue;
      const std::uint8_t b = next_data_byte(track, pos);
      if (kind == 0x90 && b > 0) {
        open[{channel, a}].emplace_back(tick, b);
      } else if (kind == 0x80 || kind == 0x90) {
        close_note(channel, a);
      }
    }
  }

  result.end_tick = tick;
  for (auto& [key, queue] : open) {
    while (!queue.empty()) close_note(key.first, key.second);
  }
  std::stable_sort(result.notes.begin(), result.notes.end(),
                   [](const NoteEvent& x, const NoteEvent& y) { return x.onset < y.onset; });
  return result;
}

}  // namespace

std::uint32_t read_vlq(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  std::uint32_t value = 0;
  for (int i = 0; i < 4; ++i) {
    if (pos >= bytes.size()) throw MidiError(MidiErrc::kTruncatedChunk, "variable-length quantity truncated");
    const std::uint8_t b = bytes[pos++];
    value = (value << 7) | (b & 0x7F);
    if (!(b & 0x80)) return value;
  }
  throw MidiError(MidiErrc::kMalformedEvent, "variable-length quantity exceeds four bytes");
}

void append_vlq(std::vector<std::uint8_t>& out, std::uint32_t value) {
  std::uint8_t buf[5];
  int n = 0;
  buf[n++] = static_cast<std::uint8_t>(value & 0x7F);
  while (value >>= 7) buf[n++] = static_cast<std::uint8_t>(0x80 | (value & 0x7F));
  while (n > 0) out.push_back(buf[--n]);
}

SmfDocument parse_smf(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 14 || !std::equal(bytes.begin(), bytes.begin() + 4, "MThd")) {
    throw MidiError(MidiErrc::kMalformedHeader, "missing MThd chunk");
  }
  const std::uint32_t header_len = read_be(bytes, 4, 4);
  if (header_len < 6) throw MidiError(MidiErrc::kMalformedHeader, "MThd length below 6");
  if (header_len > bytes.size() - 8) throw MidiError(MidiErrc::kTruncatedChunk, "MThd longer than file");

  SmfDocument doc;
  doc.format = static_cast<int>(read_be(bytes, 8, 2));
  const std::uint32_t declared_tracks = read_be(bytes, 10, 2);
  const std::uint32_t division = read_be(bytes, 12, 2);
  if (doc.format == 2) throw MidiError(MidiErrc::kUnsupportedFormat, "SMF format 2");
  if (doc.format > 2) throw MidiError(MidiErrc::kMalformedHeader, "unknown SMF format");
  if (division & 0x8000) throw MidiError(MidiErrc::kUnsupportedFormat, "SMPTE time division");
  if (division == 0) throw MidiError(MidiErrc::kMalformedHeader, "ticks per quarter is zero");
  doc.ticks_per_quarter = static_cast<int>(division);

  std::size_t pos = 8 + header_len;
  while (pos < bytes.size() && doc.tracks.size() < declared_tracks) {
    if (bytes.size() - pos < 8) throw MidiError(MidiErrc::kTruncatedChunk, "chunk header truncated");
    const bool is_track = std::equal(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                     bytes.begin() + static_cast<std::ptrdiff_t>(pos + 4), "MTrk");
    const std::uint32_t len = read_be(bytes, pos + 4, 4);
    pos += 8;
    if (len > bytes.size() - pos) throw MidiError(MidiErrc::kTruncatedChunk, "chunk longer than file");
    if (is_track) {
      TrackResult track = parse_track(bytes.subspan(pos, len));
      doc.end_tick = std::max(doc.end_tick, track.end_tick);
      doc.tempo_changes.insert(doc.tempo_changes.end(), track.tempos.begin(), track.tempos.end());
      doc.tracks.push_back(std::move(track.notes));
    }
    pos += len;
  }
  if (doc.tracks.size() < declared_tracks) {
    throw MidiError(MidiErrc::kTruncatedChunk, "fewer track chunks than declared");
  }
  std::stable_sort(doc.tempo_changes.begin(), doc.tempo_changes.end(),
                   [](const TempoChange& a, const TempoChange& b) { return a.tick < b.tick; });
  return doc;
}

PianoRoll::PianoRoll(std::size_t num_steps, int beats_per_bar)
    : num_steps_(num_steps == 0 ? 1 : num_steps),
      beats_per_bar_(beats_per_bar),
      cells_(num_steps_ * kNumPitches, 0) {}

std::size_t PianoRoll::active_count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

PianoRoll PianoRoll::resized(std::size_t num_steps) const {
  PianoRoll out(num_steps, beats_per_bar_);
  const std::size_t keep = std::min(num_steps_, out.num_steps_) * kNumPitches;
  std::copy_n(cells_.begin(), keep, out.cells_.begin());
  return out;
}

PianoRoll quantize(const SmfDocument& doc) {
  if (doc.ticks_per_quarter <= 0) throw MidiError(MidiErrc::kMalformedHeader, "ticks per quarter must be positive");
  if (doc.note_count() == 0) throw MidiError(MidiErrc::kEmptyDocument, "document contains no notes");

  const double step = doc.ticks_per_quarter / 2.0;
  auto to_steps = [&](std::int64_t ticks) {
    const double s = std::round(static_cast<double>(ticks) / step);
    if (!(s >= 0 && s <= static_cast<double>(kMaxSteps))) {
      throw MidiError(MidiErrc::kTooLong, "note position beyond supported length");
    }
    return static_cast<std::size_t>(s);
  };

  struct Span { std::size_t start, length; int pitch; };
  std::vector<Span> spans;
  std::size_t num_steps = to_steps(doc.end_tick);
  for (const auto& track : doc.tracks) {
    for (const auto& note : track) {
      const std::size_t start = to_steps(note.onset);
      const std::size_t length = std::max<std::size_t>(1, to_steps(note.duration));
      if (start + length > kMaxSteps) throw MidiError(MidiErrc::kTooLong, "note extends beyond supported length");
      spans.push_back({start, length, note.pitch});
      num_steps = std::max(num_steps, start + length);
    }
  }

  PianoRoll roll(num_steps);
  for (const auto& s : spans) {
    for (std::size_t t = s.start; t < s.start + s.length; ++t) roll.set(t, static_cast<std::size_t>(s.pitch));
  }
  return roll;
}

FrameSequence piano_roll_to_frames(const PianoRoll& roll) {
  FrameSequence seq;
  seq.source_steps = roll.num_steps();
  const std::size_t count = (roll.num_steps() + kStepsPerFrame - 1) / kStepsPerFrame;
  seq.frames.reserve(count);
  for (std::size_t f = 0; f < count; ++f) {
    std::vector<std::uint8_t> frame(kStepsPerFrame * kNumPitches, 0);
    for (std::size_t s = 0; s < kStepsPerFrame; ++s) {
      const std::size_t step = f * kStepsPerFrame + s;
      if (step >= roll.num_steps()) break;
      auto row = roll.row(step);
      std::copy(row.begin(), row.end(), frame.begin() + static_cast<std::ptrdiff_t>(s * kNumPitches));
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

PianoRoll frames_to_piano_roll(const FrameSequence& frames, std::size_t num_steps) {
  const std::size_t total = frames.size() * kStepsPerFrame;
  PianoRoll roll(num_steps == 0 ? total : num_steps);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (std::size_t s = 0; s < kStepsPerFrame; ++s) {
      const std::size_t step = f * kStepsPerFrame + s;
      if (step >= roll.num_steps()) return roll;
      for (std::size_t p = 0; p < kNumPitches; ++p) {
        if (frames.frames[f][s * kNumPitches + p]) roll.set(step, p);
      }
    }
  }
  return roll;
}

std::vector<std::uint8_t> write_smf(const PianoRoll& roll, int ticks_per_quarter) {
  if (ticks_per_quarter <= 0 || ticks_per_quarter % 2 != 0 || ticks_per_quarter > 0x7FFF) {
    throw std::invalid_argument("ticks_per_quarter must be a positive even number below 32768");
  }
  const std::int64_t step_ticks = ticks_per_quarter / 2;

  struct Event { std::int64_t tick; bool on; int pitch; };
  std::vector<Event> events;
  for (std::size_t p = 0; p < kNumPitches; ++p) {
    std::size_t t = 0;
    while (t < roll.num_steps()) {
      if (!roll.active(t, p)) { ++t; continue; }
      const std::size_t start = t;
      while (t < roll.num_steps() && roll.active(t, p)) ++t;
      events.push_back({static_cast<std::int64_t>(start) * step_ticks, true, static_cast<int>(p)});
      events.push_back({static_cast<std::int64_t>(t) * step_ticks, false, static_cast<int>(p)});
    }
  }
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.tick != b.tick) return a.tick < b.tick;
    return !a.on && b.on;
  });

  std::vector<std::uint8_t> body;
  // Tempo 120 BPM and a 4/4 time signature at tick 0.
  body.insert(body.end(), {0x00, 0xFF, 0x51, 0x03, 0x07, 0xA1, 0x20});
  body.insert(body.end(), {0x00, 0xFF, 0x58, 0x04, 0x04, 0x02, 0x18, 0x08});
  std::int64_t now = 0;
  for (const auto& e : events) {
    append_vlq(body, static_cast<std::uint32_t>(e.tick - now));
    now = e.tick;
    body.push_back(e.on ? 0x90 : 0x80);
    body.push_back(static_cast<std::uint8_t>(e.pitch));
    body.push_back(e.on ? 100 : 0);
  }
  const std::int64_t end = static_cast<std::int64_t>(roll.num_steps()) * step_ticks;
  append_vlq(body, static_cast<std::uint32_t>(end - now));
  body.insert(body.end(), {0xFF, 0x2F, 0x00});

  std::vector<std::uint8_t> out = {'M', 'T', 'h', 'd'};
  append_be(out, 6, 4);
  append_be(out, 0, 2);
  append_be(out, 1, 2);
  append_be(out, static_cast<std::uint32_t>(ticks_per_quarter), 2);
  out.insert(out.end(), {'M', 'T', 'r', 'k'});
  append_be(out, static_cast<std::uint32_t>(body.size()), 4);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace oracular::midi
