#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mmdec/analysis/evaluate.hpp"
#include "mmdec/analysis/lda.hpp"
#include "mmdec/analysis/report.hpp"
#include "mmdec/cli/cli.hpp"
#include "mmdec/common/binary_io.hpp"
#include "mmdec/common/error.hpp"
#include "mmdec/common/log.hpp"
#include "mmdec/common/parallel.hpp"
#include "mmdec/data/manifest.hpp"
#include "mmdec/data/run_config.hpp"
#include "mmdec/data/synth.hpp"
#include "mmdec/data/timeseries_io.hpp"
#include "mmdec/eeg/preprocess.hpp"
#include "mmdec/model/checkpoint.hpp"
#include "mmdec/signal/features.hpp"
#include "mmdec/train/trainer.hpp"

namespace mmdec::cli {
namespace {

namespace fs = std::filesystem;
using data::FeatureKind;
using data::RunConfig;

// Flags shared by every subcommand.
struct Common {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
  std::vector<std::string> set;
  std::optional<std::size_t> threads;
  bool quiet = false;
};

void add_common(CLI::App* sub, Common& c, bool out_required) {
  sub->add_option("--seed", c.seed, "Base random seed");
  sub->add_option("--config", c.config, "Run configuration file (key = value)")->check(CLI::ExistingFile);
  auto* out = sub->add_option("--out", c.out, "Output path");
  if (out_required) out->required();
  sub->add_option("--set", c.set, "Configuration override key=value (repeatable)");
  sub->add_option("--threads", c.threads, "Worker threads");
  sub->add_flag("--quiet", c.quiet, "Only print warnings");
}

RunConfig resolve_config(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : RunConfig::load(c.config);
  for (const auto& assignment : c.set) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw Error("--set expects key=value, got '" + assignment + "'");
    cfg.set(assignment.substr(0, eq), assignment.substr(eq + 1));
  }
  if (c.seed) cfg.seed = *c.seed;
  if (c.threads) cfg.threads = *c.threads;
  if (!c.out.empty()) cfg.output_dir = c.out;
  cfg.validate();
  return cfg;
}

std::string instance_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "instance_%02zu", i + 1);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file_atomic(path, text);
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
  Common common;
  data::SynthSpec spec;
  std::string kinds = "envelope";
};

void register_synth(CLI::App& app, SynthOptions& o, std::function<int()>& action) {
  auto* sub = app.add_subcommand("synth", "Generate a synthetic dataset");
  add_common(sub, o.common, true);
  sub->add_option("--name", o.spec.name, "Dataset name");
  sub->add_option("--participants", o.spec.participants, "Number of participants")->check(CLI::PositiveNumber);
  sub->add_option("--minutes", o.spec.minutes_per_participant, "Single-stream minutes per participant");
  sub->add_option("--trial-minutes", o.spec.trial_minutes, "Maximum minutes per trial");
  sub->add_option("--snr-db", o.spec.snr_db, "Envelope-kind SNR in dB");
  sub->add_option("--ffr-snr-db", o.spec.modulations_snr_db, "Modulations-kind SNR in dB");
  sub->add_option("--kinds", o.kinds, "Comma-separated feature kinds (envelope, ffr)");
  sub->add_option("--competing-minutes", o.spec.competing_minutes, "Competing-speaker minutes per participant");
  sub->add_option("--gain-ratio", o.spec.gain_ratio, "Attended to ignored stream gain");
  sub->add_option("--topography-spread", o.spec.topography_spread, "Per-participant topography deviation");
  sub->add_flag("--raw", o.spec.raw, "Write raw EEG and audio for preprocessing");
  sub->callback([&o, &action] {
    action = [&o] {
      data::SynthSpec spec = o.spec;
      if (o.common.seed) spec.seed = *o.common.seed;
      spec.kinds.clear();
      std::stringstream ss(o.kinds);
      for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) spec.kinds.push_back(signal::parse_feature_kind(item));
      }
      const auto manifest = data::synth_generate(spec, o.common.out);
      log_info("synth: wrote " + std::to_string(manifest.trials.size()) + " trials to " + o.common.out);
      return kExitOk;
    };
  });
}

// ----------------------------------------------------------- preprocess

struct PreprocessOptions {
  Common common;
  std::string manifest;
  std::string layout = "biosemi64";
  std::string kinds = "envelope,modulations";
};

eeg::EegRecording to_recording(const data::Timeseries& ts, const eeg::ChannelLayout& cap, const std::string& source) {
  std::vector<std::string> names;
  std::vector<eeg::Position> positions;
  for (const auto& name : ts.names) {
    const auto idx = cap.index_of(name);
    if (!idx) throw DataError(source + ": channel '" + name + "' is not in the manifest layout");
    names.push_back(name);
    positions.push_back(cap.position(*idx));
  }
  eeg::EegRecording rec;
  rec.rate = ts.rate;
  rec.layout = eeg::ChannelLayout(std::move(names), std::move(positions));
  rec.data.resize(static_cast<Eigen::Index>(ts.channels()), static_cast<Eigen::Index>(ts.samples));
  for (std::size_t c = 0; c < ts.channels(); ++c) {
    const auto ch = ts.channel(c);
    for (std::size_t t = 0; t < ts.samples; ++t) rec.data(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(t)) = ch[t];
  }
  return rec;
}

data::Timeseries to_timeseries(const eeg::EegRecording& rec, std::size_t samples) {
  data::Timeseries ts{rec.rate, rec.layout.names(), samples, {}};
  ts.values.reserve(rec.channels() * samples);
  for (std::size_t c = 0; c < rec.channels(); ++c) {
    for (std::size_t t = 0; t < samples; ++t) {
      ts.values.push_back(static_cast<float>(rec.data(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(t))));
    }
  }
  return ts;
}

std::string rebase(const data::DatasetManifest& from, const std::string& path, const fs::path& to_dir) {
  if (path.empty()) return path;
  return fs::relative(fs::absolute(from.resolve(path)), fs::absolute(to_dir)).generic_string();
}

void preprocess_trial(const data::DatasetManifest& source, data::TrialRecord& trial, const fs::path& out_dir,
                      const eeg::ChannelLayout& cap, const eeg::PipelineOptions& options,
                      const std::vector<FeatureKind>& kinds) {
  if (trial.eeg.raw.empty()) return;
  const fs::path raw_path = source.resolve(trial.eeg.raw);
  const auto raw = to_recording(data::read_timeseries(raw_path), cap, raw_path.string());
  for (const FeatureKind kind : kinds) {
    const bool envelope = kind == FeatureKind::Envelope;
    const eeg::EegRecording clean =
        envelope ? eeg::preprocess_envelope_pipeline(raw, options) : eeg::preprocess_ffr_pipeline(raw, options);
    std::vector<signal::FeatureSeries> features;
    for (const auto& stream : trial.streams) {
      if (stream.audio.empty()) throw DataError(trial.trial_id + ": stream without audio cannot be preprocessed");
      const auto audio_ts = data::read_timeseries(source.resolve(stream.audio));
      if (audio_ts.channels() != 1) throw DataError(stream.audio + ": audio must have one channel");
      const auto ch = audio_ts.channel(0);
      const signal::AudioWaveform audio{{ch.begin(), ch.end()}, audio_ts.rate};
      features.push_back(envelope ? signal::extract_envelope(audio) : signal::extract_envelope_modulations(audio));
    }
    std::size_t samples = clean.samples();
    for (const auto& f : features) samples = std::min(samples, f.samples.size());
    const std::string tag = envelope ? "envelope" : "modulations";
    const std::string stem = trial.participant_id + "/" + trial.trial_id;
    trial.eeg.aligned(kind) = stem + "_eeg_" + tag + ".tsb";
    data::write_timeseries(out_dir / trial.eeg.aligned(kind), to_timeseries(clean, samples));
    for (std::size_t s = 0; s < features.size(); ++s) {
      std::vector<float> values(features[s].samples.begin(), features[s].samples.begin() + static_cast<long>(samples));
      trial.streams[s].feature(kind) = stem + "_stream" + std::to_string(s) + "_" + tag + ".tsb";
      data::write_timeseries(out_dir / trial.streams[s].feature(kind),
                             data::make_timeseries(std::move(values), features[s].rate, to_string(kind)));
    }
  }
}

void register_preprocess(CLI::App& app, PreprocessOptions& o, std::function<int()>& action) {
  auto* sub = app.add_subcommand("preprocess", "Run the EEG pipelines and feature extraction over a manifest");
  add_common(sub, o.common, true);
  sub->add_option("--manifest", o.manifest, "Input manifest")->required();
  sub->add_option("--layout", o.layout, "Target channel layout (name or file)");
  sub->add_option("--kinds", o.kinds, "Comma-separated feature kinds to produce");
  sub->callback([&o, &action] {
    action = [&o] {
      const RunConfig cfg = resolve_config(o.common);
      const auto source = data::read_manifest(o.manifest);
      const fs::path out_dir = o.common.out;
      fs::create_directories(out_dir);
      const auto cap = eeg::ChannelLayout::resolve(source.layout);
      eeg::PipelineOptions options;
      const auto target = eeg::ChannelLayout::resolve(o.layout);
      if (!(target == cap)) options.target_layout = target;
      std::vector<FeatureKind> kinds;
      std::stringstream ss(o.kinds);
      for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) kinds.push_back(signal::parse_feature_kind(item));
      }

      data::DatasetManifest result = source;
      result.base_dir = out_dir;
      result.layout = o.layout;
      for (auto& trial : result.trials) {
        trial.eeg.raw = rebase(source, trial.eeg.raw, out_dir);
        for (const FeatureKind kind : {FeatureKind::Envelope, FeatureKind::EnvelopeModulations}) {
          trial.eeg.aligned(kind) = rebase(source, trial.eeg.aligned(kind), out_dir);
        }
        for (auto& stream : trial.streams) {
          stream.audio = rebase(source, stream.audio, out_dir);
          for (const FeatureKind kind : {FeatureKind::Envelope, FeatureKind::EnvelopeModulations}) {
            stream.feature(kind) = rebase(source, stream.feature(kind), out_dir);
          }
        }
        fs::create_directories(out_dir / trial.participant_id);
      }
      // Paths of `result` are relative to out_dir; resolve through it.
      parallel_for(result.trials.size(), cfg.threads, [&](std::size_t i) {
        auto& trial = result.trials[i];
        if (!o.common.quiet) log_info("preprocess: " + trial.trial_id);
        preprocess_trial(result, trial, out_dir, cap, options, kinds);
      });
      result.validate();
      data::write_manifest(out_dir / "manifest.json", result);
      return kExitOk;
    };
  });
}

// ---------------------------------------------------------------- train

struct TrainOptions {
  Common common;
  std::string manifest;
  std::size_t seeds = 1;
  std::string feature;
};

void register_train(CLI::App& app, TrainOptions& o, std::function<int()>& action) {
  auto* sub = app.add_subcommand("train", "Train population decoders, one per seed");
  add_common(sub, o.common, true);
  sub->add_option("--manifest", o.manifest, "Dataset manifest")->required();
  sub->add_option("--seeds", o.seeds, "Number of instances (seeds base, base+1, ...)")->check(CLI::PositiveNumber);
  sub->add_option("--feature", o.feature, "Feature kind (envelope or ffr)");
  sub->callback([&o, &action] {
    action = [&o] {
      RunConfig cfg = resolve_config(o.common);
      if (!o.feature.empty()) cfg.feature = signal::parse_feature_kind(o.feature);
      const auto ds = data::load_dataset(data::read_manifest(o.manifest), cfg.feature);
      for (std::size_t i = 0; i < o.seeds; ++i) {
        RunConfig run = cfg;
        run.seed = cfg.seed + i;
        const fs::path dir = fs::path(o.common.out) / instance_name(i);
        run.output_dir = dir.generic_string();
        const auto settings = train::TrainSettings::from(run);
        const auto model = train::decoder_config(run);
        const auto fit = train::train_run_directory(dir, run, [&](const train::EpochCallback& cb) {
          return train::fit_population(ds, model, settings, cb);
        });
        if (!o.common.quiet) {
          log_info(instance_name(i) + ": best epoch " + std::to_string(fit.best_epoch) + " of " +
                   std::to_string(fit.history.size()));
        }
      }
      return kExitOk;
    };
  });
}

// ----------------------------------------------------------- checkpoints

struct LoadedDecoders {
  std::vector<train::Params> params;
  std::vector<std::string> ids;
  FeatureKind kind = FeatureKind::Envelope;
};

LoadedDecoders load_decoders(const std::vector<std::string>& paths) {
  std::vector<std::pair<std::string, fs::path>> found;
  for (const auto& arg : paths) {
    const fs::path p = arg;
    if (fs::is_regular_file(p)) {
      const auto parent = p.parent_path().filename().string();
      found.emplace_back(p.filename() == "best.ckpt" && !parent.empty() ? parent : p.stem().string(), p);
    } else if (fs::is_directory(p)) {
      std::vector<std::pair<std::string, fs::path>> inside;
      for (const auto& entry : fs::recursive_directory_iterator(p)) {
        if (!entry.is_regular_file() || entry.path().filename() != "best.ckpt") continue;
        std::string id = fs::relative(entry.path().parent_path(), p).generic_string();
        if (id == ".") id = p.filename().string();
        inside.emplace_back(id, entry.path());
      }
      if (inside.empty()) throw DataError("no best.ckpt below " + arg);
      std::sort(inside.begin(), inside.end());
      found.insert(found.end(), inside.begin(), inside.end());
    } else {
      throw DataError("checkpoint not found: " + arg);
    }
  }
  LoadedDecoders out;
  for (const auto& [id, path] : found) {
    out.params.push_back(model::load_checkpoint(path));
    out.ids.push_back(id);
  }
  out.kind = out.params.front().config.feature_kind;
  for (const auto& p : out.params) {
    if (p.config.feature_kind != out.kind) throw Error("checkpoints mix feature kinds");
  }
  return out;
}

data::Portion to_portion(data::EvalPortion p) { return p == data::EvalPortion::All ? data::Portion::All : data::Portion::Test; }

train::SamplingScheme scheme_for(const RunConfig& cfg, double segment_s) {
  train::SamplingScheme s = train::SamplingScheme::from(cfg);
  s.segment_seconds = segment_s;
  s.stride_seconds = std::min(s.stride_seconds, segment_s);
  return s;
}

// Appends the rows of b to a (same instances).
void append_table(analysis::ScoreTable& a, const analysis::ScoreTable& b) {
  if (a.instances.empty()) {
    a = b;
    return;
  }
  a.examples.insert(a.examples.end(), b.examples.begin(), b.examples.end());
  for (std::size_t i = 0; i < a.logits.size(); ++i) {
    a.logits[i].insert(a.logits[i].end(), b.logits[i].begin(), b.logits[i].end());
  }
}

std::string segment_title(const std::string& label, double segment_s) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s %g s", label.c_str(), segment_s);
  return buf;
}

std::string report_for_table(const analysis::ScoreTable& table, const std::string& label) {
  std::string text;
  std::vector<analysis::EvalReport> reports;
  for (const double seg : table.segments()) {
    const auto sel = table.select_segment(seg);
    reports.push_back(analysis::summarize(sel, sel.margins()));
    text += analysis::format_eval_report(reports.back(), segment_title(label, seg));
    text += "\n";
  }
  if (reports.size() > 1) text += analysis::format_segment_curve(reports);
  return text;
}

// ------------------------------------------------------------- finetune

struct FinetuneOptions {
  Common common;
  std::string manifest;
  std::string checkpoint;
  std::vector<std::string> participants;
};

void register_finetune(CLI::App& app, FinetuneOptions& o, std::function<int()>& action) {
  auto* sub = app.add_subcommand("finetune", "Fine-tune a population decoder per participant");
  add_common(sub, o.common, true);
  sub->add_option("--manifest", o.manifest, "Dataset manifest")->required();
  sub->add_option("--checkpoint", o.checkpoint, "Population checkpoint")->required();
  sub->add_option("--participant", o.participants, "Participant id (repeatable; default all)");
  sub->callback([&o, &action] {
    action = [&o] {
      RunConfig cfg = resolve_config(o.common);
      const auto population = model::load_checkpoint(o.checkpoint);
      cfg.feature = population.config.feature_kind;
      const auto ds = data::load_dataset(data::read_manifest(o.manifest), cfg.feature);
      const auto participants = o.participants.empty() ? ds.participants() : o.participants;
      for (const auto& pid : participants) {
        const fs::path dir = fs::path(o.common.out) / pid;
        RunConfig run = cfg;
        run.output_dir = dir.generic_string();
        const auto settings = train::TrainSettings::from(run);
        train::train_run_directory(dir, run, [&](const train::EpochCallback& cb) {
          return train::fine_tune(population, ds, pid, settings, cb);
        });
      }
      return kExitOk;
    };
  });
}

// ------------------------------------------------------------- evaluate

struct EvaluateOptions {
  Common common;
  std::string manifest;
  std::vector<std::string> checkpoints;
  std::string mode;
  std::string segments;
  std::string portion;
  bool swap = false;
};

void register_evaluate(CLI::App& app, EvaluateOptions& o, std::function<int()>& action) {
  auto* sub = app.add_subcommand("evaluate", "Score decoders (an ensemble when several) on a dataset");
  add_common(sub, o.common, true);
  sub->add_option("--manifest", o.manifest, "Dataset manifest")->required();
  sub->add_option("--checkpoint", o.checkpoints, "Checkpoint file or run directory (repeatable)")->required();
  sub->add_option("--mode", o.mode, "match_mismatch or attention");
  sub->add_option("--segments", o.segments, "Comma-separated segment lengths in seconds");
  sub->add_option("--portion", o.portion, "test or all");
  sub->add_flag("--swap-streams", o.swap, "Exchange attended and ignored streams");
  sub->callback([&o, &action] {
    action = [&o] {
      RunConfig cfg = resolve_config(o.common);
      if (!o.mode.empty()) cfg.set("eval_mode", o.mode);
      if (!o.segments.empty()) cfg.set("eval_segments", o.segments);
      if (!o.portion.empty()) cfg.set("eval_portion", o.portion);
      const auto decoders = load_decoders(o.checkpoints);
      cfg.feature = decoders.kind;
      auto ds = data::load_dataset(data::read_manifest(o.manifest), decoders.kind);
      if (o.swap) ds = analysis::swap_streams(ds);

      analysis::ScoreTable all;
      for (const double seg : cfg.eval_segments) {
        const auto refs =
            analysis::evaluation_examples({&ds}, cfg.eval_mode, to_portion(cfg.eval_portion), scheme_for(cfg, seg));
        if (refs.empty()) throw DataError("evaluate: no examples for " + segment_title("segment", seg));
        append_table(all, analysis::score_examples(decoders.params, decoders.ids, ds, refs, cfg.eval_mode, cfg.threads));
      }
      const fs::path out = o.common.out;
      fs::create_directories(out);
      analysis::write_scores(out / "scores.tsv", all);
      const std::string report = report_for_table(all, to_string(decoders.kind));
      write_text(out / "report.txt", report);
      cfg.save(out / "config.txt");
      if (!o.common.quiet) std::cout << report;
      return kExitOk;
    };
  });
}

// ------------------------------------------------------------- ensemble

struct EnsembleOptions {
  Common common;
  std::string scores;
  std::string sizes;
  std::optional<std::size_t> draws;
};

std::string ensemble_text(const analysis::ScoreTable& table, const RunConfig& cfg) {
  std::string text;
  for (const double seg : table.segments()) {
    const auto sel = table.select_segment(seg);
    const auto target = sel.target();
    const std::size_t k = sel.instances.size();
    text += "# " + segment_title("segment", seg) + "\n";
    text += "instance\taccuracy\n";
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double acc = analysis::participant_average_accuracy(sel.logits, {i}, target);
      sum += acc;
      text += sel.instances[i] + "\t" + analysis::percent(acc) + "\n";
    }
    std::vector<std::size_t> every(k);
    for (std::size_t i = 0; i < k; ++i) every[i] = i;
    text += "individual_mean\t" + analysis::percent(sum / static_cast<double>(k)) + "\n";
    text += "ensemble_" + std::to_string(k) + "\t" +
            analysis::percent(analysis::participant_average_accuracy(sel.logits, every, target)) + "\n";
    std::vector<std::size_t> sizes;
    for (const auto n : cfg.ensemble_sizes) {
      if (n <= k) {
        sizes.push_back(n);
      } else {
        log_warning("ensemble: skipping n = " + std::to_string(n) + " (only " + std::to_string(k) + " instances)");
      }
    }
    text += analysis::format_averaging_curve(
        analysis::bootstrap_averaging_curve(sel.logits, target, sizes, cfg.ensemble_draws, cfg.seed));
    text += "\n";
  }
  return text;
}

void register_ensemble(CLI::App& app, EnsembleOptions& o, std::function<int()>& action) {
  auto* sub = app.add_subcommand("ensemble", "Ensemble accuracy and bootstrap averaging curve from a score file");
  add_common(sub, o.common, true);
  sub->add_option("--scores", o.scores, "scores.tsv written by evaluate")->required();
  sub->add_option("--sizes", o.sizes, "Comma-separated ensemble sizes");
  sub->add_option("--draws", o.draws, "Random draws per size");
  sub->callback([&o, &action] {
    action = [&o] {
      RunConfig cfg = resolve_config(o.common);
      if (!o.sizes.empty()) cfg.set("ensemble_sizes", o.sizes);
      if (o.draws) cfg.ensemble_draws = *o.draws;
      cfg.validate();
      const auto table = analysis::read_scores(o.scores);
      const std::string text = ensemble_text(table, cfg);
      write_text(fs::path(o.common.out) / "ensemble.txt", text);
      if (!o.common.quiet) std::cout << text;
      return kExitOk;
    };
  });
}

// ------------------------------------------------------------ composite

struct CompositeOptions {
  Common common;
  std::string manifest;
  std::vector<std::string> ffr;
  std::vector<std::string> envelope;
};

void register_composite(CLI::App& app, CompositeOptions& o, std::function<int()>& action) {
  auto* sub = app.add_subcommand("composite", "Fit an LDA composite of FFR and envelope decoders");
  add_common(sub, o.common, true);
  sub->add_option("--manifest", o.manifest, "Manifest with both feature kinds")->required();
  sub->add_option("--ffr", o.ffr, "FFR checkpoints or run directories")->required();
  sub->add_option("--envelope", o.envelope, "Envelope checkpoints or run directories")->required();
  sub->callback([&o, &action] {
    action = [&o] {
      const RunConfig cfg = resolve_config(o.common);
      const auto ffr = load_decoders(o.ffr);
      const auto env = load_decoders(o.envelope);
      if (ffr.kind != FeatureKind::EnvelopeModulations || env.kind != FeatureKind::Envelope) {
        throw Error("composite: --ffr needs modulations decoders and --envelope envelope decoders");
      }
      const auto manifest = data::read_manifest(o.manifest);
      const auto ffr_ds = data::load_dataset(manifest, FeatureKind::EnvelopeModulations);
      const auto env_ds = data::load_dataset(manifest, FeatureKind::Envelope);
      const auto scheme = scheme_for(cfg, cfg.segment_seconds);
      const auto score = [&](data::Portion portion) {
        const auto refs = analysis::evaluation_examples({&ffr_ds, &env_ds}, data::EvalMode::MatchMismatch, portion, scheme);
        if (refs.empty()) throw DataError("composite: no " + data::to_string(portion) + " examples");
        return std::pair{analysis::score_examples(ffr.params, ffr.ids, ffr_ds, refs, data::EvalMode::MatchMismatch, cfg.threads),
                         analysis::score_examples(env.params, env.ids, env_ds, refs, data::EvalMode::MatchMismatch, cfg.threads)};
      };
      const auto [ffr_val, env_val] = score(data::Portion::Validation);
      const auto inputs = analysis::composite_inputs(ffr_val, env_val);
      const auto lda = analysis::lda_fit(inputs.points, inputs.labels);

      const auto [ffr_test, env_test] = score(data::Portion::Test);
      const auto comp = analysis::composite_table(lda, ffr_test, env_test);
      const fs::path out = o.common.out;
      fs::create_directories(out);
      char buf[256];
      std::snprintf(buf, sizeof buf, "weights\t%.17g\t%.17g\noffset\t%.17g\n", lda.weights[0], lda.weights[1], lda.offset);
      write_text(out / "lda.txt", lda.equation() + "\n" + buf);
      analysis::write_scores(out / "scores.tsv", comp);
      analysis::write_scores(out / "ffr_scores.tsv", ffr_test);
      analysis::write_scores(out / "envelope_scores.tsv", env_test);
      std::string report = report_for_table(ffr_test, "ffr") + "\n" + report_for_table(env_test, "envelope") + "\n" +
                           report_for_table(comp, "composite") + "\nlda\t" + lda.equation() + "\n";
      write_text(out / "report.txt", report);
      if (!o.common.quiet) std::cout << report;
      return kExitOk;
    };
  });
}

// --------------------------------------------------------------- report

struct ReportOptions {
  Common common;
  std::vector<std::string> runs;
};

std::vector<fs::path> files_named(const fs::path& root, const std::string& name) {
  std::vector<fs::path> found;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().filename() == name) found.push_back(fs::relative(entry.path(), root));
  }
  std::sort(found.begin(), found.end());
  return found;
}

std::string training_summary(const fs::path& metrics) {
  const std::string text = read_file(metrics);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::size_t epochs = 0, best_epoch = 0;
  double best = 0.0;
  std::string best_text;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::size_t epoch = 0;
    std::string train_loss, val_loss;
    row >> epoch >> train_loss >> val_loss;
    if (!row) throw DataError(metrics.string() + ": malformed row '" + line + "'");
    ++epochs;
    const double v = std::stod(val_loss);
    if (best_epoch == 0 || v < best) {
      best = v;
      best_epoch = epoch;
      best_text = val_loss;
    }
  }
  return "epochs " + std::to_string(epochs) + "\tbest_epoch " + std::to_string(best_epoch) + "\tbest_val_loss " +
         best_text;
}

std::string build_report(const std::vector<std::string>& runs) {
  std::string text;
  for (const auto& run : runs) {
    const fs::path root = run;
    if (!fs::is_directory(root)) throw DataError("report: not a directory: " + run);
    text += "## " + root.filename().generic_string() + "\n";
    for (const auto& rel : files_named(root, "metrics.tsv")) {
      text += "training\t" + rel.parent_path().generic_string() + "\t" + training_summary(root / rel) + "\n";
    }
    for (const auto& rel : files_named(root, "scores.tsv")) {
      const auto table = analysis::read_scores(root / rel);
      text += "\n# scores " + rel.generic_string() + " (" + std::to_string(table.instances.size()) + " instances, " +
              data::to_string(table.mode) + ")\n";
      text += report_for_table(table, rel.parent_path().empty() ? "scores" : rel.parent_path().generic_string());
    }
    for (const auto& rel : files_named(root, "lda.txt")) {
      text += "\n# composite " + rel.generic_string() + "\n" + read_file(root / rel);
    }
    text += "\n";
  }
  return text;
}

void register_report(CLI::App& app, ReportOptions& o, std::function<int()>& action) {
  auto* sub = app.add_subcommand("report", "Summarise run directories (training, scores, composites)");
  add_common(sub, o.common, false);
  sub->add_option("runs", o.runs, "Run directories")->required();
  sub->callback([&o, &action] {
    action = [&o] {
      const std::string text = build_report(o.runs);
      if (o.common.out.empty()) {
        std::cout << text;
      } else {
        write_text(o.common.out, text);
      }
      return kExitOk;
    };
  });
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Match-mismatch EEG decoder toolkit", "mmdec"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  std::function<int()> action;
  SynthOptions synth;
  PreprocessOptions preprocess;
  TrainOptions train_opts;
  FinetuneOptions finetune;
  EvaluateOptions evaluate;
  EnsembleOptions ensemble;
  CompositeOptions composite;
  ReportOptions report;
  register_synth(app, synth, action);
  register_preprocess(app, preprocess, action);
  register_train(app, train_opts, action);
  register_finetune(app, finetune, action);
  register_evaluate(app, evaluate, action);
  register_ensemble(app, ensemble, action);
  register_composite(app, composite, action);
  register_report(app, report, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (const auto* sub : app.get_subcommands()) {
    for (const auto* opt : sub->get_options()) {
      if (opt->get_name() == "--quiet" && opt->count() > 0) set_log_level(LogLevel::Warning);
    }
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("mmdec");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace mmdec::cli
