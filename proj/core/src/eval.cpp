#include "sitewatch/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>

namespace sitewatch::eval {

namespace {

// Deterministic prediction ordering: confidence descending, then category and
// box fields ascending. Makes matching invariant under input permutation.
bool prediction_before(const Detection& a, const Detection& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  return std::tuple(index_of(a.category), a.box.cx, a.box.cy, a.box.w, a.box.h) <
         std::tuple(index_of(b.category), b.box.cx, b.box.cy, b.box.w, b.box.h);
}

Prf prf_from_counts(int tp, int fp, int gt_total) {
  Prf out;
  const int kept = tp + fp;
  out.precision = kept == 0 ? 1.0 : static_cast<double>(tp) / kept;
  out.recall = gt_total == 0 ? 0.0 : static_cast<double>(tp) / gt_total;
  const double pr = out.precision + out.recall;
  out.f1 = pr == 0.0 ? 0.0 : 2.0 * out.precision * out.recall / pr;
  return out;
}

Prf prf_filtered(const Pooled& pooled, std::optional<Category> category, double conf_threshold) {
  int tp = 0;
  int fp = 0;
  for (const auto& e : pooled.entries) {
    if (category && e.category != *category) continue;
    if (e.confidence < conf_threshold) continue;
    if (e.true_positive) {
      ++tp;
    } else {
      ++fp;
    }
  }
  const int gt_total =
      category ? pooled.gt_count[static_cast<std::size_t>(index_of(*category))] : pooled.total_gt();
  return prf_from_counts(tp, fp, gt_total);
}

// x-axis shared by all confidence sweeps: every distinct confidence plus 0, 1.
std::vector<double> confidence_grid(const Pooled& pooled) {
  std::set<double> xs{0.0, 1.0};
  for (const auto& e : pooled.entries) xs.insert(e.confidence);
  return {xs.begin(), xs.end()};
}

std::vector<Category> categories_with_gt(const Pooled& pooled) {
  std::vector<Category> out;
  for (Category c : all_categories()) {
    if (pooled.gt_count[static_cast<std::size_t>(index_of(c))] > 0) out.push_back(c);
  }
  return out;
}

// PR staircase for one category: one point per distinct confidence threshold,
// recall ascending. Returns cumulative (recall, precision) pairs.
std::vector<CurvePoint> pr_staircase(const Pooled& pooled, Category category) {
  std::vector<Pooled::Entry> entries;
  for (const auto& e : pooled.entries) {
    if (e.category == category) entries.push_back(e);
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.confidence > b.confidence;
  });
  const int gt_total = pooled.gt_count[static_cast<std::size_t>(index_of(category))];

  std::vector<CurvePoint> points;  // x = recall, y = precision
  int tp = 0;
  int fp = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].true_positive) {
      ++tp;
    } else {
      ++fp;
    }
    const bool group_end = i + 1 == entries.size() ||
                           entries[i + 1].confidence != entries[i].confidence;
    if (!group_end) continue;
    const double recall = gt_total == 0 ? 0.0 : static_cast<double>(tp) / gt_total;
    const double precision = static_cast<double>(tp) / (tp + fp);
    points.push_back({recall, precision});
  }
  return points;
}

// Monotone (non-increasing) envelope over the staircase, in place.
void apply_envelope(std::vector<CurvePoint>& staircase) {
  double best = 0.0;
  for (auto it = staircase.rbegin(); it != staircase.rend(); ++it) {
    best = std::max(best, it->y);
    it->y = best;
  }
}

}  // namespace

int MatchOutcome::true_positive_count() const {
  return static_cast<int>(std::count_if(predictions.begin(), predictions.end(),
                                        [](const auto& p) { return p.true_positive; }));
}

MatchOutcome match_image(std::span<const Detection> predictions,
                         std::span<const GroundTruthBox> ground_truth, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw std::invalid_argument("match_image: iou_threshold must lie in (0,1)");
  }

  std::vector<std::size_t> order(predictions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return prediction_before(predictions[a], predictions[b]);
  });

  MatchOutcome out;
  out.predictions.resize(predictions.size());
  out.gt_matched.assign(ground_truth.size(), false);

  for (std::size_t pi : order) {
    const Detection& pred = predictions[pi];
    double best_iou = 0.0;
    int best_gt = -1;
    for (std::size_t gi = 0; gi < ground_truth.size(); ++gi) {
      if (out.gt_matched[gi]) continue;
      if (ground_truth[gi].category != pred.category) continue;
      const double overlap = iou(pred.box, ground_truth[gi].box);
      if (overlap < iou_threshold) continue;
      if (overlap > best_iou) {
        best_iou = overlap;
        best_gt = static_cast<int>(gi);
      }
    }
    if (best_gt >= 0) {
      out.predictions[pi] = {true, best_gt};
      out.gt_matched[static_cast<std::size_t>(best_gt)] = true;
    } else {
      out.predictions[pi] = {false, -1};
    }
  }
  return out;
}

void Pooled::add_image(std::span<const Detection> predictions,
                       std::span<const GroundTruthBox> ground_truth, double iou_threshold) {
  const MatchOutcome outcome = match_image(predictions, ground_truth, iou_threshold);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    entries.push_back(
        {predictions[i].confidence, predictions[i].category, outcome.predictions[i].true_positive});
  }
  for (const auto& gt : ground_truth) {
    ++gt_count[static_cast<std::size_t>(index_of(gt.category))];
  }
  ++images;
}

int Pooled::total_gt() const { return std::accumulate(gt_count.begin(), gt_count.end(), 0); }

Prf precision_recall_f1_at(const Pooled& pooled, double conf_threshold) {
  return prf_filtered(pooled, std::nullopt, conf_threshold);
}

Prf precision_recall_f1_at(const Pooled& pooled, Category category, double conf_threshold) {
  return prf_filtered(pooled, category, conf_threshold);
}

SweepResult confidence_sweep(const Pooled& pooled) {
  SweepResult out;
  if (pooled.entries.empty()) return out;  // empty-series marker

  const std::vector<double> grid = confidence_grid(pooled);
  const std::vector<Category> categories = categories_with_gt(pooled);

  std::vector<CurveSeries> precision(categories.size() + 1);
  std::vector<CurveSeries> recall(categories.size() + 1);
  std::vector<CurveSeries> f1(categories.size() + 1);
  for (std::size_t ci = 0; ci < categories.size(); ++ci) {
    const std::string label{to_string(categories[ci])};
    precision[ci].label = recall[ci].label = f1[ci].label = label;
  }
  precision.back().label = recall.back().label = f1.back().label = "all";

  for (double x : grid) {
    double psum = 0.0;
    double rsum = 0.0;
    double fsum = 0.0;
    for (std::size_t ci = 0; ci < categories.size(); ++ci) {
      const Prf v = prf_filtered(pooled, categories[ci], x);
      precision[ci].points.push_back({x, v.precision});
      recall[ci].points.push_back({x, v.recall});
      f1[ci].points.push_back({x, v.f1});
      psum += v.precision;
      rsum += v.recall;
      fsum += v.f1;
    }
    const double n = categories.empty() ? 1.0 : static_cast<double>(categories.size());
    precision.back().points.push_back({x, psum / n});
    recall.back().points.push_back({x, rsum / n});
    f1.back().points.push_back({x, fsum / n});
  }

  out.precision_conf = std::move(precision);
  out.recall_conf = std::move(recall);
  out.f1_conf = std::move(f1);
  return out;
}

std::vector<CurveSeries> precision_recall_curves(const Pooled& pooled) {
  const std::vector<Category> categories = categories_with_gt(pooled);

  // Per-category envelopes, then the macro mean on the union recall grid.
  std::vector<std::vector<CurvePoint>> envelopes(categories.size());
  std::set<double> recall_grid{0.0, 1.0};
  for (std::size_t ci = 0; ci < categories.size(); ++ci) {
    envelopes[ci] = pr_staircase(pooled, categories[ci]);
    apply_envelope(envelopes[ci]);
    for (const auto& p : envelopes[ci]) recall_grid.insert(p.x);
  }

  // Envelope as a function: value at r = envelope of the first point with
  // recall >= r, 0 past the last achieved recall.
  auto envelope_at = [](const std::vector<CurvePoint>& env, double r) {
    for (const auto& p : env) {
      if (p.x >= r) return p.y;
    }
    return 0.0;
  };

  std::vector<CurveSeries> out(categories.size() + 1);
  for (std::size_t ci = 0; ci < categories.size(); ++ci) {
    out[ci].label = std::string(to_string(categories[ci]));
    for (double r : recall_grid) out[ci].points.push_back({r, envelope_at(envelopes[ci], r)});
  }
  out.back().label = "all";
  for (double r : recall_grid) {
    double sum = 0.0;
    for (const auto& env : envelopes) sum += envelope_at(env, r);
    const double n = categories.empty() ? 1.0 : static_cast<double>(categories.size());
    out.back().points.push_back({r, sum / n});
  }
  return out;
}

std::optional<double> ap50(const Pooled& pooled, Category category) {
  if (pooled.gt_count[static_cast<std::size_t>(index_of(category))] == 0) return std::nullopt;

  std::vector<CurvePoint> staircase = pr_staircase(pooled, category);
  if (staircase.empty()) return 0.0;
  apply_envelope(staircase);

  double ap = 0.0;
  double prev_recall = 0.0;
  for (const auto& p : staircase) {
    ap += (p.x - prev_recall) * p.y;
    prev_recall = p.x;
  }
  return ap;
}

BestF1 best_f1_threshold(const CurveSeries& f1_series) {
  if (f1_series.points.empty()) {
    throw std::invalid_argument("best_f1_threshold: empty series");
  }
  BestF1 best{f1_series.points.front().x, f1_series.points.front().y};
  for (const auto& p : f1_series.points) {
    if (p.y >= best.f1) best = {p.x, p.y};  // >= : ties go to higher confidence
  }
  return best;
}

EvalReport make_report(const Pooled& pooled, double iou_threshold) {
  if (pooled.total_gt() == 0) {
    throw std::invalid_argument("make_report: no ground truth in the pool");
  }
  EvalReport report;
  report.iou_threshold = iou_threshold;
  report.images = pooled.images;
  report.gt_count = pooled.gt_count;

  double sum = 0.0;
  int defined = 0;
  for (Category c : all_categories()) {
    const auto ap = ap50(pooled, c);
    report.ap50[static_cast<std::size_t>(index_of(c))] = ap;
    if (ap) {
      sum += *ap;
      ++defined;
    }
  }
  report.map50 = sum / defined;

  const SweepResult sweep = confidence_sweep(pooled);
  if (!sweep.f1_conf.empty() && !sweep.f1_conf.back().empty()) {
    report.best_f1 = best_f1_threshold(sweep.f1_conf.back());
  }
  return report;
}

}  // namespace sitewatch::eval
