#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mmdec/analysis/ensemble.hpp"
#include "mmdec/analysis/evaluate.hpp"

namespace mmdec::analysis {

// Per-example score file: a "# mode <name>" line, then a tab-separated table
// with columns participant, trial, condition, segment_s, onset_s,
// mismatch_onset_s, label, attention and one logit column per instance.
// Numbers are written with 17 significant digits and read back exactly.
std::string encode_scores(const ScoreTable& table);
ScoreTable decode_scores(const std::string& text, const std::string& source = "scores");
void write_scores(const std::filesystem::path& path, const ScoreTable& table);
ScoreTable read_scores(const std::filesystem::path& path);

// Two decimals, e.g. 0.93125 -> "93.13" when given as a percentage.
std::string percent(double fraction);

// Rows (participant, condition, segment, correct, total, accuracy) followed by
// a summary block: participant-average accuracy +- 95% margin.
std::string format_eval_report(const EvalReport& report, const std::string& title);

// n, mean, min, max of the participant-average accuracy across draws.
std::string format_averaging_curve(const std::vector<CurvePoint>& curve);

// segment_s, mean, margin.
std::string format_segment_curve(const std::vector<EvalReport>& reports);

}  // namespace mmdec::analysis
