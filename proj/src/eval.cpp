#include "decepshap/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>

#include "decepshap/error.hpp"
#include "decepshap/io.hpp"
#include "json.hpp"

namespace decepshap {

using json = nlohmann::ordered_json;

namespace {

struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
};

Fraction fraction(std::size_t num, std::size_t den) { return den ? Fraction{num, den} : Fraction{}; }

double to_double(Fraction f) { return static_cast<double>(f.num) / static_cast<double>(f.den); }

using u128 = unsigned __int128;

u128 gcd128(u128 a, u128 b) {
  while (b) {
    const u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// (w0 * a + w1 * b) / total evaluated as one reduced rational, so the result
// is the correctly rounded value whenever the reduced terms fit in a double
// mantissa.
double weighted_mean(Fraction a, std::uint64_t w0, Fraction b, std::uint64_t w1,
                     std::uint64_t total) {
  u128 num = u128(w0) * a.num * b.den + u128(w1) * b.num * a.den;
  u128 den = u128(total) * a.den * b.den;
  const u128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  constexpr u128 kExact = u128(1) << 53;
  if (num <= kExact && den <= kExact) return static_cast<double>(num) / static_cast<double>(den);
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

struct ClassFractions {
  Fraction precision, recall, f1;
};

ClassFractions class_fractions(std::size_t tp, std::size_t fp, std::size_t fn) {
  return {fraction(tp, tp + fp), fraction(tp, tp + fn), fraction(2 * tp, 2 * tp + fp + fn)};
}

ClassMetrics class_metrics(const ClassFractions& f, std::size_t support) {
  ClassMetrics m;
  m.support = support;
  m.precision = to_double(f.precision);
  m.recall = to_double(f.recall);
  m.f1 = to_double(f.f1);
  return m;
}

void build_roc(std::span<const double> margins, std::span<const int> labels, MetricsReport& r) {
  const std::size_t positives = r.tp + r.fn;
  const std::size_t negatives = r.tn + r.fp;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  r.roc.push_back({0.0, 0.0, kInf});
  if (positives == 0 || negatives == 0) {
    const double lowest = *std::min_element(margins.begin(), margins.end());
    r.roc.push_back({1.0, 1.0, lowest});
    r.auc = 0.5;
    return;
  }

  std::vector<std::size_t> order(margins.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return margins[a] > margins[b]; });

  // Area is accumulated in (false positive, true positive) count units, which
  // are exact in double precision, and normalized once at the end.
  std::size_t tp = 0, fp = 0;
  double area = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    const double m = margins[order[k]];
    const std::size_t prev_tp = tp, prev_fp = fp;
    for (; k < order.size() && margins[order[k]] == m; ++k) {
      (labels[order[k]] == 1 ? tp : fp) += 1;
    }
    area += static_cast<double>(fp - prev_fp) * static_cast<double>(tp + prev_tp) / 2.0;
    r.roc.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                     static_cast<double>(tp) / static_cast<double>(positives), m});
  }
  r.auc = area / (static_cast<double>(positives) * static_cast<double>(negatives));
}

json averaged_json(const AveragedMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

}  // namespace

MetricsReport evaluate_margins(std::span<const double> margins, std::span<const int> labels) {
  if (margins.empty()) throw DataError("test set is empty");
  if (margins.size() != labels.size()) throw DataError("margins and labels differ in length");

  MetricsReport r;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw DataError("labels must be 0 or 1");
    const bool predicted = margins[i] >= 0.0;
    const bool actual = labels[i] == 1;
    if (predicted && actual) ++r.tp;
    else if (predicted) ++r.fp;
    else if (actual) ++r.fn;
    else ++r.tn;
  }
  const std::size_t n = margins.size();
  r.accuracy = static_cast<double>(r.tp + r.tn) / static_cast<double>(n);
  const auto pos = class_fractions(r.tp, r.fp, r.fn);
  const auto neg = class_fractions(r.tn, r.fn, r.fp);
  r.per_class[1] = class_metrics(pos, r.tp + r.fn);
  r.per_class[0] = class_metrics(neg, r.tn + r.fp);

  const std::uint64_t s0 = r.per_class[0].support, s1 = r.per_class[1].support;
  r.weighted.precision = weighted_mean(neg.precision, s0, pos.precision, s1, n);
  r.weighted.recall = weighted_mean(neg.recall, s0, pos.recall, s1, n);
  r.weighted.f1 = weighted_mean(neg.f1, s0, pos.f1, s1, n);
  r.macro.precision = weighted_mean(neg.precision, 1, pos.precision, 1, 2);
  r.macro.recall = weighted_mean(neg.recall, 1, pos.recall, 1, 2);
  r.macro.f1 = weighted_mean(neg.f1, 1, pos.f1, 1, 2);
  build_roc(margins, labels, r);
  return r;
}

MetricsReport evaluate(const TreeEnsemble& model, const FeatureMatrix& X,
                       std::span<const int> labels) {
  if (X.rows() != labels.size()) throw DataError("test rows and labels differ in length");
  std::vector<double> margins;
  margins.reserve(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) margins.push_back(predict_margin(model, X.row(i)));
  return evaluate_margins(margins, labels);
}

std::string report_table(std::span<const NamedReport> reports) {
  if (reports.empty()) throw DataError("report table needs at least one model");
  std::size_t width = 5;  // "Model"
  for (const auto& [name, _] : reports) width = std::max(width, name.size());

  auto pad = [width](const std::string& s) { return s + std::string(width - s.size(), ' '); };
  std::string out = pad("Model") + " Accuracy Precision Recall F1\n";
  char buf[128];
  for (const auto& [name, r] : reports) {
    std::snprintf(buf, sizeof(buf), " %.0f%% %.2f %.2f %.2f\n", r.accuracy * 100.0,
                  r.weighted.precision, r.weighted.recall, r.weighted.f1);
    out += pad(name) + buf;
  }
  return out;
}

std::string metrics_to_json(const MetricsReport& r) {
  json out;
  out["accuracy"] = r.accuracy;
  out["confusion"] = {{"tp", r.tp}, {"fp", r.fp}, {"tn", r.tn}, {"fn", r.fn}};
  json per_class;
  for (std::size_t c = 0; c < 2; ++c) {
    const auto& m = r.per_class[c];
    per_class[std::to_string(c)] = {{"precision", m.precision},
                                    {"recall", m.recall},
                                    {"f1", m.f1},
                                    {"support", m.support}};
  }
  out["per_class"] = std::move(per_class);
  out["weighted"] = averaged_json(r.weighted);
  out["macro"] = averaged_json(r.macro);
  out["auc"] = r.auc;
  json roc = json::array();
  for (const auto& p : r.roc) {
    json point{{"fpr", p.fpr}, {"tpr", p.tpr}};
    point["threshold"] = std::isinf(p.threshold) ? json(nullptr) : json(p.threshold);
    roc.push_back(std::move(point));
  }
  out["roc"] = std::move(roc);
  return out.dump(1) + "\n";
}

std::string roc_to_csv(const MetricsReport& r) {
  std::string out = "fpr,tpr,threshold\n";
  for (const auto& p : r.roc) {
    out += format_double(p.fpr) + "," + format_double(p.tpr) + "," + format_double(p.threshold) + "\n";
  }
  return out;
}

}  // namespace decepshap
