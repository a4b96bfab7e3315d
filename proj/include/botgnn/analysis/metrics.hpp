#pragma once

#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "botgnn/errors.hpp"

namespace botgnn::analysis {

// Confusion counts plus the rates reported for detection. Rates are
// percentages; f1 is a ratio in [0, 1]. A rate whose denominator is empty
// is reported as 0 and flagged.
struct MetricsReport {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double fp_rate = 0.0;
  double fn_rate = 0.0;
  double det_rate = 0.0;
  double f1 = 0.0;
  bool no_positives = false;  // tp + fn == 0
  bool no_negatives = false;  // fp + tn == 0

  std::size_t total() const { return tp + fp + tn + fn; }
};

inline MetricsReport metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t tn,
                                         std::size_t fn) {
  MetricsReport r{tp, fp, tn, fn};
  const auto d = [](std::size_t x) { return static_cast<double>(x); };
  r.no_positives = tp + fn == 0;
  r.no_negatives = fp + tn == 0;
  if (!r.no_negatives) r.fp_rate = d(fp) / d(fp + tn) * 100.0;
  if (!r.no_positives) {
    r.fn_rate = d(fn) / d(fn + tp) * 100.0;
    r.det_rate = 100.0 - r.fn_rate;
  }
  if (const auto denom = 2 * tp + fp + fn; denom > 0) r.f1 = d(2 * tp) / d(denom);
  return r;
}

inline MetricsReport compute_metrics(std::span<const std::uint8_t> predicted,
                                     std::span<const std::uint8_t> truth) {
  if (predicted.size() != truth.size()) {
    throw InputError("compute_metrics: " + std::to_string(predicted.size()) +
                     " predictions vs " + std::to_string(truth.size()) + " labels");
  }
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] != 0, t = truth[i] != 0;
    if (p && t) ++tp;
    else if (p) ++fp;
    else if (t) ++fn;
    else ++tn;
  }
  return metrics_from_counts(tp, fp, tn, fn);
}

// Per-graph macro average: rates and F1 are unweighted means across
// reports; counts are summed; flags are OR-ed.
inline MetricsReport aggregate_metrics(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw InputError("aggregate_metrics: no reports");
  MetricsReport out;
  for (const auto& r : reports) {
    out.tp += r.tp;
    out.fp += r.fp;
    out.tn += r.tn;
    out.fn += r.fn;
    out.fp_rate += r.fp_rate;
    out.fn_rate += r.fn_rate;
    out.det_rate += r.det_rate;
    out.f1 += r.f1;
    out.no_positives = out.no_positives || r.no_positives;
    out.no_negatives = out.no_negatives || r.no_negatives;
  }
  const auto k = static_cast<double>(reports.size());
  out.fp_rate /= k;
  out.fn_rate /= k;
  out.det_rate /= k;
  out.f1 /= k;
  return out;
}

// Flat key=value block, one pair per line.
inline std::string to_key_value(const MetricsReport& r, const std::string& prefix = "") {
  auto num = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  std::string s;
  s += prefix + "tp=" + std::to_string(r.tp) + "\n";
  s += prefix + "fp=" + std::to_string(r.fp) + "\n";
  s += prefix + "tn=" + std::to_string(r.tn) + "\n";
  s += prefix + "fn=" + std::to_string(r.fn) + "\n";
  s += prefix + "fp_rate=" + num(r.fp_rate) + "\n";
  s += prefix + "fn_rate=" + num(r.fn_rate) + "\n";
  s += prefix + "det_rate=" + num(r.det_rate) + "\n";
  s += prefix + "f1=" + num(r.f1) + "\n";
  s += prefix + "no_positives=" + (r.no_positives ? "1" : "0") + "\n";
  s += prefix + "no_negatives=" + (r.no_negatives ? "1" : "0") + "\n";
  return s;
}

}  // namespace botgnn::analysis
