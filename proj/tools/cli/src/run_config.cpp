#include "oracular_cli/run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace oracular::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || end != value.data() + value.size()) {
    throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

template <typename T>
void set_once(std::optional<T>& slot, std::string_view key, T value) {
  if (slot) throw ConfigError("duplicate key " + std::string(key));
  slot = std::move(value);
}

template <typename T>
void overlay(std::optional<T> const& src, T& dst) {
  if (src) dst = *src;
}

}  // namespace

ConfigLayer parse_config_text(std::string_view text) {
  ConfigLayer layer;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));

    if (key == "data_dir") {
      set_once(layer.data_dir, key, std::string(value));
    } else if (key == "epochs") {
      set_once(layer.epochs, key, parse_number<std::size_t>(key, value));
    } else if (key == "learning_rate") {
      set_once(layer.learning_rate, key, parse_number<double>(key, value));
    } else if (key == "z_dim") {
      set_once(layer.z_dim, key, parse_number<std::size_t>(key, value));
    } else if (key == "dropout_p") {
      set_once(layer.dropout_p, key, parse_number<double>(key, value));
    } else if (key == "seed") {
      set_once(layer.seed, key, parse_number<std::uint64_t>(key, value));
    } else if (key == "hop") {
      set_once(layer.hop, key, parse_number<std::size_t>(key, value));
    } else if (key == "min_motif_len") {
      set_once(layer.min_motif_len, key, parse_number<std::size_t>(key, value));
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
  }
  return layer;
}

ConfigLayer load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

RunConfig resolve(const ConfigLayer& file, const ConfigLayer& flags) {
  RunConfig cfg;
  for (const ConfigLayer* layer : {&file, &flags}) {
    overlay(layer->data_dir, cfg.data_dir);
    overlay(layer->epochs, cfg.epochs);
    overlay(layer->learning_rate, cfg.learning_rate);
    overlay(layer->z_dim, cfg.z_dim);
    overlay(layer->dropout_p, cfg.dropout_p);
    overlay(layer->seed, cfg.seed);
    overlay(layer->hop, cfg.hop);
    overlay(layer->min_motif_len, cfg.min_motif_len);
  }
  if (cfg.hop == 0) throw ConfigError("hop must be at least 1");
  if (cfg.min_motif_len == 0) throw ConfigError("min_motif_len must be at least 1");
  return cfg;
}

}  // namespace oracular::cli
