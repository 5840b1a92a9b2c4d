#include "mmdec/data/run_config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

#include "mmdec/common/binary_io.hpp"
#include "mmdec/common/error.hpp"

namespace mmdec::data {

std::string to_string(EvalMode mode) { return mode == EvalMode::MatchMismatch ? "match_mismatch" : "attention"; }

EvalMode parse_eval_mode(const std::string& text) {
  if (text == "match_mismatch" || text == "match-mismatch") return EvalMode::MatchMismatch;
  if (text == "attention") return EvalMode::Attention;
  throw Error("unknown evaluation mode '" + text + "' (expected match_mismatch or attention)");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty() || !std::isfinite(out)) {
    throw Error("config key '" + key + "': expected a number, got '" + v + "'");
  }
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw Error("config key '" + key + "': expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::string format_double(double v) {
  // Shortest representation that round-trips.
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general);
  return std::string(buf, r.ptr);
}

template <typename T, typename F>
std::string join(const std::vector<T>& values, F format) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + format(values[i]);
  return out;
}

struct Entry {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename M>
Entry real(std::string key, M member) {
  return {key, [key, member](RunConfig& c, const std::string& v) { c.*member = parse_double(key, v); },
          [member](const RunConfig& c) { return format_double(c.*member); }};
}

template <typename M>
Entry count(std::string key, M member) {
  return {key,
          [key, member](RunConfig& c, const std::string& v) {
            c.*member = static_cast<std::remove_reference_t<decltype(c.*member)>>(parse_uint(key, v));
          },
          [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      {"feature", [](RunConfig& c, const std::string& v) { c.feature = signal::parse_feature_kind(v); },
       [](const RunConfig& c) { return signal::to_string(c.feature); }},
      count("seed", &RunConfig::seed),
      {"output_dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; },
       [](const RunConfig& c) { return c.output_dir; }},
      real("segment_seconds", &RunConfig::segment_seconds),
      real("stride_seconds", &RunConfig::stride_seconds),
      real("gap_seconds", &RunConfig::gap_seconds),
      count("batch_size", &RunConfig::batch_size),
      real("learning_rate", &RunConfig::learning_rate),
      count("lr_decay_every", &RunConfig::lr_decay_every),
      real("lr_decay_factor", &RunConfig::lr_decay_factor),
      count("patience", &RunConfig::patience),
      count("max_epochs", &RunConfig::max_epochs),
      real("adam_beta1", &RunConfig::adam_beta1),
      real("adam_beta2", &RunConfig::adam_beta2),
      real("adam_epsilon", &RunConfig::adam_epsilon),
      count("threads", &RunConfig::threads),
      {"eval_mode", [](RunConfig& c, const std::string& v) { c.eval_mode = parse_eval_mode(v); },
       [](const RunConfig& c) { return to_string(c.eval_mode); }},
      {"eval_portion",
       [](RunConfig& c, const std::string& v) {
         if (v == "test") c.eval_portion = EvalPortion::Test;
         else if (v == "all") c.eval_portion = EvalPortion::All;
         else throw Error("config key 'eval_portion': expected test or all, got '" + v + "'");
       },
       [](const RunConfig& c) { return std::string(c.eval_portion == EvalPortion::Test ? "test" : "all"); }},
      {"eval_segments",
       [](RunConfig& c, const std::string& v) {
         c.eval_segments.clear();
         for (const auto& item : split_list(v)) c.eval_segments.push_back(parse_double("eval_segments", item));
       },
       [](const RunConfig& c) { return join(c.eval_segments, format_double); }},
      {"ensemble_sizes",
       [](RunConfig& c, const std::string& v) {
         c.ensemble_sizes.clear();
         for (const auto& item : split_list(v)) c.ensemble_sizes.push_back(parse_uint("ensemble_sizes", item));
       },
       [](const RunConfig& c) {
         return join(c.ensemble_sizes, [](std::size_t n) { return std::to_string(n); });
       }},
      count("ensemble_draws", &RunConfig::ensemble_draws),
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  const auto positive = [](double v, const char* key) {
    if (!(v > 0.0)) throw Error(std::string("config key '") + key + "' must be positive");
  };
  positive(segment_seconds, "segment_seconds");
  positive(stride_seconds, "stride_seconds");
  positive(gap_seconds, "gap_seconds");
  positive(learning_rate, "learning_rate");
  positive(lr_decay_factor, "lr_decay_factor");
  positive(adam_epsilon, "adam_epsilon");
  if (stride_seconds > segment_seconds) throw Error("config: stride_seconds must not exceed segment_seconds");
  if (batch_size < 2 || batch_size % 2 != 0) throw Error("config key 'batch_size' must be even and at least 2");
  if (lr_decay_every == 0) throw Error("config key 'lr_decay_every' must be positive");
  if (patience == 0) throw Error("config key 'patience' must be positive");
  if (threads == 0) throw Error("config key 'threads' must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw Error("config: Adam betas must lie in [0, 1)");
  }
  if (eval_segments.empty()) throw Error("config key 'eval_segments' must list at least one duration");
  for (const double s : eval_segments) positive(s, "eval_segments");
  for (const std::size_t n : ensemble_sizes) {
    if (n == 0) throw Error("config key 'ensemble_sizes' entries must be positive");
  }
  if (ensemble_draws == 0) throw Error("config key 'ensemble_draws' must be positive");
}

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const auto& e : entries()) {
    if (e.key == key) {
      e.set(*this, value);
      return;
    }
  }
  throw Error("unknown config key '" + key + "'");
}

RunConfig RunConfig::parse(const std::string& text, const std::string& source) {
  RunConfig c;
  std::stringstream ss(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(ss, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError(source + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    try {
      c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const DataError&) {
      throw;
    } catch (const Error& e) {
      throw DataError(source + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  try {
    c.validate();
  } catch (const Error& e) {
    throw DataError(source + ": " + e.what());
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) { return parse(read_file(path), path.string()); }

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& e : entries()) out += e.key + " = " + e.get(*this) + "\n";
  return out;
}

void RunConfig::save(const std::filesystem::path& path) const { write_file_atomic(path, to_text()); }

std::vector<std::string> RunConfig::keys() {
  std::vector<std::string> out;
  for (const auto& e : entries()) out.push_back(e.key);
  return out;
}

}  // namespace mmdec::data
