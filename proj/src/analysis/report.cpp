#include "mmdec/analysis/report.hpp"

#include <cstdio>
#include <sstream>

#include "mmdec/common/binary_io.hpp"
#include "mmdec/common/error.hpp"

namespace mmdec::analysis {

namespace {

std::string exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

constexpr std::size_t kFixedColumns = 8;

}  // namespace

std::string percent(double fraction) { return fixed(100.0 * fraction, 2); }

std::string encode_scores(const ScoreTable& t) {
  std::string out = "# mode " + data::to_string(t.mode) + "\n";
  out += "participant\ttrial\tcondition\tsegment_s\tonset_s\tmismatch_onset_s\tlabel\tattention";
  for (const auto& id : t.instances) out += "\t" + id;
  out += "\n";
  for (std::size_t e = 0; e < t.examples.size(); ++e) {
    const auto& x = t.examples[e];
    out += x.participant + "\t" + x.trial + "\t" + data::to_string(x.condition) + "\t" + exact(x.segment_s) + "\t" +
           exact(x.onset_s) + "\t" + exact(x.mismatch_onset_s) + "\t" + std::to_string(x.label) + "\t" +
           (x.attention ? "1" : "0");
    for (const auto& inst : t.logits) out += "\t" + exact(inst[e]);
    out += "\n";
  }
  return out;
}

ScoreTable decode_scores(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  ScoreTable t;
  const auto fail = [&](std::size_t n, const std::string& why) {
    throw DataError(source + ":" + std::to_string(n) + ": " + why);
  };
  if (!std::getline(in, line) || line.rfind("# mode ", 0) != 0) fail(1, "missing '# mode' line");
  try {
    t.mode = data::parse_eval_mode(line.substr(7));
  } catch (const Error& e) {
    fail(1, e.what());
  }
  if (!std::getline(in, line)) fail(2, "missing column header");
  const auto header = split_tabs(line);
  if (header.size() <= kFixedColumns || header[0] != "participant") fail(2, "unexpected column header");
  t.instances.assign(header.begin() + kFixedColumns, header.end());
  t.logits.resize(t.instances.size());
  std::size_t n = 2;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    if (f.size() != header.size()) {
      fail(n, "expected " + std::to_string(header.size()) + " columns, found " + std::to_string(f.size()));
    }
    try {
      ExampleRecord r;
      r.participant = f[0];
      r.trial = f[1];
      r.condition = data::parse_condition(f[2]);
      r.segment_s = std::stod(f[3]);
      r.onset_s = std::stod(f[4]);
      r.mismatch_onset_s = std::stod(f[5]);
      r.label = std::stoi(f[6]);
      r.attention = f[7] == "1";
      if (r.label != 0 && r.label != 1) fail(n, "label must be 0 or 1");
      t.examples.push_back(r);
      for (std::size_t i = 0; i < t.instances.size(); ++i) t.logits[i].push_back(std::stod(f[kFixedColumns + i]));
    } catch (const std::logic_error&) {
      fail(n, "malformed number");
    }
  }
  return t;
}

void write_scores(const std::filesystem::path& path, const ScoreTable& table) {
  write_file_atomic(path, encode_scores(table));
}

ScoreTable read_scores(const std::filesystem::path& path) { return decode_scores(read_file(path), path.string()); }

std::string format_eval_report(const EvalReport& r, const std::string& title) {
  std::string out = "# " + title + "\n";
  out += "participant\tcondition\tsegment_s\tcorrect\ttotal\taccuracy\n";
  for (const auto& row : r.rows) {
    out += row.participant + "\t" + data::to_string(row.condition) + "\t" + fixed(r.segment_s, 1) + "\t" +
           std::to_string(row.correct) + "\t" + std::to_string(row.total) + "\t" + percent(row.accuracy()) + "\n";
  }
  out += "# summary\n";
  out += "mode\t" + data::to_string(r.mode) + "\n";
  out += "segment_s\t" + fixed(r.segment_s, 1) + "\n";
  out += "participants\t" + std::to_string(r.participants.size()) + "\n";
  out += "examples\t" + std::to_string(r.examples) + "\n";
  out += "accuracy\t" + percent(r.mean) + " +- " + percent(r.margin) + "\n";
  return out;
}

std::string format_averaging_curve(const std::vector<CurvePoint>& curve) {
  std::string out = "n\tmean\tmin\tmax\n";
  for (const auto& p : curve) {
    out += std::to_string(p.n) + "\t" + percent(p.mean) + "\t" + percent(p.min) + "\t" + percent(p.max) + "\n";
  }
  return out;
}

std::string format_segment_curve(const std::vector<EvalReport>& reports) {
  std::string out = "segment_s\tmean\tmargin\n";
  for (const auto& r : reports) out += fixed(r.segment_s, 1) + "\t" + percent(r.mean) + "\t" + percent(r.margin) + "\n";
  return out;
}

}  // namespace mmdec::analysis
