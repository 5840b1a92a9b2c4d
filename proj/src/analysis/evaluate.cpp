#include "mmdec/analysis/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mmdec/analysis/stats.hpp"
#include "mmdec/common/error.hpp"
#include "mmdec/common/parallel.hpp"

namespace mmdec::analysis {

std::vector<double> ScoreTable::margins() const {
  std::vector<std::size_t> all(instances.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return margins(all);
}

std::vector<double> ScoreTable::margins(const std::vector<std::size_t>& subset) const {
  if (subset.empty()) throw Error("ScoreTable: no instances to combine");
  std::vector<double> out(examples.size());
  std::vector<double> z(subset.size());
  for (std::size_t e = 0; e < examples.size(); ++e) {
    for (std::size_t k = 0; k < subset.size(); ++k) z[k] = logits.at(subset[k]).at(e);
    out[e] = subset.size() == 1 ? z[0] : ensemble_margin(z);
  }
  return out;
}

std::vector<double> ScoreTable::probabilities() const {
  std::vector<std::vector<double>> probs;
  for (const auto& inst : logits) {
    std::vector<double> p(inst.size());
    for (std::size_t e = 0; e < inst.size(); ++e) p[e] = autodiff::sigmoid_value(inst[e]);
    probs.push_back(std::move(p));
  }
  return average_sigmoids(probs, instances).averaged;
}

std::vector<std::string> ScoreTable::participants() const {
  std::vector<std::string> out;
  for (const auto& e : examples)
    if (std::find(out.begin(), out.end(), e.participant) == out.end()) out.push_back(e.participant);
  return out;
}

AccuracyTarget ScoreTable::target() const {
  const auto ps = participants();
  AccuracyTarget t;
  t.participants = ps.size();
  for (const auto& e : examples) {
    t.participant.push_back(static_cast<std::size_t>(std::find(ps.begin(), ps.end(), e.participant) - ps.begin()));
    t.labels.push_back(e.label);
  }
  return t;
}

std::vector<double> ScoreTable::segments() const {
  std::vector<double> out;
  for (const auto& e : examples)
    if (std::find(out.begin(), out.end(), e.segment_s) == out.end()) out.push_back(e.segment_s);
  return out;
}

ScoreTable ScoreTable::select_segment(double segment_s) const {
  ScoreTable out{mode, {}, instances, std::vector<std::vector<double>>(instances.size())};
  for (std::size_t e = 0; e < examples.size(); ++e) {
    if (examples[e].segment_s != segment_s) continue;
    out.examples.push_back(examples[e]);
    for (std::size_t i = 0; i < instances.size(); ++i) out.logits[i].push_back(logits[i][e]);
  }
  return out;
}

std::vector<ExampleRef> evaluation_examples(const std::vector<const data::Dataset*>& datasets, EvalMode mode,
                                            data::Portion portion, const train::SamplingScheme& scheme) {
  if (datasets.empty()) throw Error("evaluation_examples: no dataset");
  const auto& first = *datasets.front();
  for (const auto* ds : datasets) {
    if (ds->trials.size() != first.trials.size()) throw Error("evaluation_examples: datasets list different trials");
    for (std::size_t i = 0; i < first.trials.size(); ++i) {
      if (ds->trials[i].trial_id != first.trials[i].trial_id) {
        throw Error("evaluation_examples: trial order differs between datasets");
      }
    }
  }
  std::vector<ExampleRef> out;
  for (std::size_t i = 0; i < first.trials.size(); ++i) {
    const bool competing = first.trials[i].condition == data::Condition::Competing;
    if (competing != (mode == EvalMode::Attention)) continue;
    double start = 0.0, end = std::numeric_limits<double>::infinity();
    for (const auto* ds : datasets) {
      const auto [s, e] = train::portion_seconds(ds->trials[i], ds->splits, portion);
      start = std::max(start, s);
      end = std::min(end, e);
    }
    const auto ex = mode == EvalMode::Attention ? train::enumerate_attention_examples(i, start, end, scheme)
                                                : train::enumerate_examples(i, start, end, scheme);
    out.insert(out.end(), ex.begin(), ex.end());
  }
  return out;
}

data::Dataset swap_streams(const data::Dataset& ds) {
  data::Dataset out = ds;
  for (auto& t : out.trials) {
    if (t.condition == data::Condition::Competing) std::swap(t.stimulus, t.ignored);
  }
  return out;
}

ScoreTable score_examples(const std::vector<Params>& decoders, const std::vector<std::string>& ids,
                          const data::Dataset& ds, const std::vector<ExampleRef>& refs, EvalMode mode,
                          std::size_t threads) {
  if (decoders.empty()) throw Error("score_examples: no decoder");
  if (ids.size() != decoders.size()) throw Error("score_examples: id count differs from decoder count");
  ScoreTable table{mode, {}, ids, std::vector<std::vector<double>>(decoders.size(), std::vector<double>(refs.size()))};
  for (const auto& d : decoders) {
    if (d.config.rate != signal::feature_rate(ds.kind)) {
      throw Error("score_examples: decoder rate " + std::to_string(d.config.rate) + " Hz does not match the " +
                  signal::to_string(ds.kind) + " data");
    }
  }
  for (std::size_t k = 0; k < refs.size(); ++k) {
    const auto& r = refs[k];
    const auto& t = ds.trials.at(r.trial);
    const auto samples = static_cast<std::size_t>(std::llround(r.length_s * t.rate));
    for (const auto& d : decoders) {
      if (samples < d.config.receptive_field()) {
        throw Error("score_examples: " + std::to_string(r.length_s) + " s segments are shorter than the receptive field (" +
                    std::to_string(d.config.receptive_field()) + " samples)");
      }
    }
    table.examples.push_back({t.participant_id, t.trial_id, t.condition, r.length_s, r.onset_s, r.mismatch_onset_s,
                              k % 2 == 0 ? 1 : 0, r.use_ignored});
  }
  parallel_for(refs.size(), threads, [&](std::size_t k) {
    const auto ex = train::extract_example(ds, refs[k]);
    const bool matched_first = table.examples[k].label == 1;
    const auto& a = matched_first ? ex.matched : ex.mismatched;
    const auto& b = matched_first ? ex.mismatched : ex.matched;
    for (std::size_t i = 0; i < decoders.size(); ++i) table.logits[i][k] = model::predict(decoders[i], ex.eeg, a, b).logit;
  });
  return table;
}

EvalReport summarize(const ScoreTable& table, const std::vector<double>& margins) {
  if (margins.size() != table.examples.size()) throw Error("summarize: margin count differs from example count");
  if (table.examples.empty()) throw Error("summarize: no examples");
  EvalReport r;
  r.mode = table.mode;
  r.segment_s = table.examples.front().segment_s;
  r.participants = table.participants();
  std::map<std::pair<std::size_t, int>, AccuracyRow> rows;
  std::vector<std::size_t> correct(r.participants.size(), 0), total(r.participants.size(), 0);
  for (std::size_t e = 0; e < margins.size(); ++e) {
    const auto& ex = table.examples[e];
    const auto p = static_cast<std::size_t>(std::find(r.participants.begin(), r.participants.end(), ex.participant) -
                                            r.participants.begin());
    const bool ok = (margins[e] > 0.0 ? 1 : 0) == ex.label;
    auto& row = rows[{p, static_cast<int>(ex.condition)}];
    row.participant = ex.participant;
    row.condition = ex.condition;
    ++row.total;
    row.correct += ok;
    ++total[p];
    correct[p] += ok;
    ++r.examples;
    r.correct += ok;
  }
  for (const auto& [key, row] : rows) r.rows.push_back(row);
  for (std::size_t p = 0; p < r.participants.size(); ++p) {
    r.participant_accuracy.push_back(static_cast<double>(correct[p]) / static_cast<double>(total[p]));
  }
  r.mean = mean(r.participant_accuracy);
  r.margin = t_interval_margin(r.participant_accuracy);
  return r;
}

CompositeInputs composite_inputs(const ScoreTable& ffr, const ScoreTable& envelope) {
  if (ffr.examples != envelope.examples) throw Error("composite: the two tables list different examples");
  const auto pf = ffr.probabilities();
  const auto pe = envelope.probabilities();
  CompositeInputs in;
  for (std::size_t e = 0; e < pf.size(); ++e) {
    in.points.emplace_back(pf[e], pe[e]);
    in.labels.push_back(ffr.examples[e].label);
  }
  return in;
}

ScoreTable composite_table(const LdaModel& model, const ScoreTable& ffr, const ScoreTable& envelope) {
  const auto in = composite_inputs(ffr, envelope);
  ScoreTable out{ffr.mode, ffr.examples, {"composite"}, {std::vector<double>(in.points.size())}};
  for (std::size_t e = 0; e < in.points.size(); ++e) out.logits[0][e] = model.score(in.points[e][0], in.points[e][1]);
  return out;
}

}  // namespace mmdec::analysis
