#include "brute.hpp"

#include "fixtures.hpp"
#include "oracular/oracle.hpp"

namespace oracular::fixtures {

RepeatedSuffix brute_repeated_suffix(std::string_view s, std::size_t i) {
  RepeatedSuffix best;
  for (std::size_t len = i - 1; len >= 1 && len < i; --len) {
    const std::string_view suffix = s.substr(i - len, len);
    for (std::size_t end = len - 1; end + 1 < i; ++end) {
      if (s.substr(end + 1 - len, len) == suffix) return {len, end + 1};
    }
  }
  return best;
}

OracleCheck check_oracle_against_brute_force(std::string_view s) {
  OracleCheck out;
  const auto frames = symbols_to_chroma(s);
  const auto fo = oracle::build_oracle(frames, 0.0);
  const std::string str(s);

  for (std::size_t i = 1; i <= s.size(); ++i) {
    const RepeatedSuffix ref = brute_repeated_suffix(s, i);
    if (fo.lrs[i] != ref.length && out.lrs_ok) {
      out.lrs_ok = false;
      out.detail = "lrs[" + std::to_string(i) + "]=" + std::to_string(fo.lrs[i]) + " expected " +
                   std::to_string(ref.length);
    }
    if (fo.sfx[i] != ref.state && out.sfx_ok) {
      out.sfx_ok = false;
      if (out.detail.empty()) {
        out.detail = "sfx[" + std::to_string(i) + "]=" + std::to_string(fo.sfx[i]) + " expected " +
                     std::to_string(ref.state);
      }
    }
  }

  for (std::size_t start = 0; start < s.size() && out.factors_ok; ++start) {
    std::size_t state = 0;
    for (std::size_t end = start; end < s.size(); ++end) {
      const auto next = oracle::next_state(fo, frames, state, frames.frames[end]);
      if (!next) {
        out.factors_ok = false;
        if (out.detail.empty()) out.detail = "factor '" + str.substr(start, end - start + 1) + "' rejected";
        break;
      }
      state = *next;
    }
  }
  if (!out.detail.empty()) out.detail = "'" + str + "': " + out.detail;
  return out;
}

}  // namespace oracular::fixtures
