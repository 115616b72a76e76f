#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace oracular::cli {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
  std::string data_dir = ".";
  std::size_t epochs = 200;
  double learning_rate = 0.001;
  std::size_t z_dim = 64;
  double dropout_p = 0.3;
  std::uint64_t seed = 0;
  std::size_t hop = 1;
  std::size_t min_motif_len = 4;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Values set by one source (config file or flags); unset keys defer to
/// the layer below.
struct ConfigLayer {
  std::optional<std::string> data_dir;
  std::optional<std::size_t> epochs;
  std::optional<double> learning_rate;
  std::optional<std::size_t> z_dim;
  std::optional<double> dropout_p;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> hop;
  std::optional<std::size_t> min_motif_len;
};

/// key=value lines; blank lines and lines starting with '#' are ignored.
/// Unknown keys, duplicates and malformed values throw ConfigError.
ConfigLayer parse_config_text(std::string_view text);
ConfigLayer load_config_file(const std::string& path);

/// Later layers win: resolve(file, flags) gives flag > file > default.
RunConfig resolve(const ConfigLayer& file, const ConfigLayer& flags);

}  // namespace oracular::cli
