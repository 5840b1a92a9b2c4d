#include "mmdec/data/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"
#include "mmdec/common/binary_io.hpp"
#include "mmdec/common/error.hpp"

namespace mmdec::data {

using nlohmann::json;

std::string to_string(Condition c) {
  switch (c) {
    case Condition::Quiet: return "quiet";
    case Condition::Noise: return "noise";
    case Condition::Foreign: return "foreign";
    case Condition::Competing: return "competing";
  }
  return "unknown";
}

Condition parse_condition(const std::string& text) {
  if (text == "quiet") return Condition::Quiet;
  if (text == "noise") return Condition::Noise;
  if (text == "foreign") return Condition::Foreign;
  if (text == "competing") return Condition::Competing;
  throw DataError("unknown condition '" + text + "' (expected quiet, noise, foreign or competing)");
}

void SplitFractions::validate() const {
  if (!(train > 0.0) || !(validation > 0.0) || !(test > 0.0) ||
      std::abs(train + validation + test - 1.0) > 1e-9) {
    throw DataError("split fractions must be positive and sum to 1");
  }
}

const std::string& StreamFiles::feature(FeatureKind kind) const {
  return kind == FeatureKind::Envelope ? envelope : modulations;
}
std::string& StreamFiles::feature(FeatureKind kind) { return kind == FeatureKind::Envelope ? envelope : modulations; }

const std::string& EegFiles::aligned(FeatureKind kind) const {
  return kind == FeatureKind::Envelope ? envelope : modulations;
}
std::string& EegFiles::aligned(FeatureKind kind) { return kind == FeatureKind::Envelope ? envelope : modulations; }

void DatasetManifest::validate() const {
  splits.validate();
  std::set<std::string> ids;
  for (const auto& t : trials) {
    if (t.trial_id.empty() || t.participant_id.empty()) throw DataError("manifest: trial with empty id");
    if (!ids.insert(t.trial_id).second) throw DataError("manifest: duplicate trial id '" + t.trial_id + "'");
    const std::size_t expected = t.condition == Condition::Competing ? 2 : 1;
    if (t.streams.size() != expected) {
      throw DataError("manifest: trial '" + t.trial_id + "' (" + to_string(t.condition) + ") needs " +
                      std::to_string(expected) + " stream(s), has " + std::to_string(t.streams.size()));
    }
    if (t.condition == Condition::Noise && !t.snr_db) {
      throw DataError("manifest: noise trial '" + t.trial_id + "' lacks snr_db");
    }
  }
}

std::filesystem::path DatasetManifest::resolve(const std::string& relative) const {
  const std::filesystem::path p(relative);
  return p.is_absolute() ? p : base_dir / p;
}

std::vector<std::string> DatasetManifest::participants() const {
  std::vector<std::string> out;
  for (const auto& t : trials) {
    if (std::find(out.begin(), out.end(), t.participant_id) == out.end()) out.push_back(t.participant_id);
  }
  return out;
}

namespace {

json stream_json(const StreamFiles& s) {
  json j = json::object();
  if (!s.audio.empty()) j["audio"] = s.audio;
  if (!s.envelope.empty()) j["envelope"] = s.envelope;
  if (!s.modulations.empty()) j["modulations"] = s.modulations;
  return j;
}

StreamFiles stream_from(const json& j) {
  StreamFiles s;
  s.audio = j.value("audio", "");
  s.envelope = j.value("envelope", "");
  s.modulations = j.value("modulations", "");
  return s;
}

}  // namespace

DatasetManifest read_manifest(const std::filesystem::path& path) {
  DatasetManifest m;
  m.base_dir = path.parent_path();
  try {
    const json j = json::parse(read_file(path));
    m.name = j.value("name", "");
    m.layout = j.value("layout", "biosemi64");
    if (j.contains("splits")) {
      const auto& s = j.at("splits");
      m.splits = {s.at("train").get<double>(), s.at("validation").get<double>(), s.at("test").get<double>()};
    }
    for (const auto& t : j.at("trials")) {
      TrialRecord r;
      r.participant_id = t.at("participant").get<std::string>();
      r.trial_id = t.at("trial").get<std::string>();
      r.condition = parse_condition(t.value("condition", "quiet"));
      if (t.contains("snr_db") && !t.at("snr_db").is_null()) r.snr_db = t.at("snr_db").get<double>();
      if (t.contains("narrator")) {
        r.narrator.sex = t.at("narrator").value("sex", "");
        r.narrator.pitch_hz = t.at("narrator").value("pitch_hz", 0.0);
      }
      if (t.contains("eeg")) {
        const auto& e = t.at("eeg");
        r.eeg.raw = e.value("raw", "");
        r.eeg.envelope = e.value("envelope", "");
        r.eeg.modulations = e.value("modulations", "");
      }
      for (const auto& s : t.at("streams")) r.streams.push_back(stream_from(s));
      m.trials.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": malformed manifest: " + e.what());
  }
  m.validate();
  return m;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  manifest.validate();
  json trials = json::array();
  for (const auto& t : manifest.trials) {
    json eeg = json::object();
    if (!t.eeg.raw.empty()) eeg["raw"] = t.eeg.raw;
    if (!t.eeg.envelope.empty()) eeg["envelope"] = t.eeg.envelope;
    if (!t.eeg.modulations.empty()) eeg["modulations"] = t.eeg.modulations;
    json streams = json::array();
    for (const auto& s : t.streams) streams.push_back(stream_json(s));
    json row = {{"participant", t.participant_id},
                {"trial", t.trial_id},
                {"condition", to_string(t.condition)},
                {"narrator", {{"sex", t.narrator.sex}, {"pitch_hz", t.narrator.pitch_hz}}},
                {"eeg", eeg},
                {"streams", streams}};
    if (t.snr_db) row["snr_db"] = *t.snr_db;
    trials.push_back(std::move(row));
  }
  const json j = {{"name", manifest.name},
                  {"layout", manifest.layout},
                  {"splits",
                   {{"train", manifest.splits.train},
                    {"validation", manifest.splits.validation},
                    {"test", manifest.splits.test}}},
                  {"trials", trials}};
  write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace mmdec::data
