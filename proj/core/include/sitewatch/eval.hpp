#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sitewatch/types.hpp"

namespace sitewatch::eval {

/// Per-image greedy matching result. Prediction flags are in input order.
struct MatchOutcome {
  struct PredictionMatch {
    bool true_positive = false;
    int gt_index = -1;  // matched ground-truth index, -1 for false positives
  };
  std::vector<PredictionMatch> predictions;
  std::vector<bool> gt_matched;

  int true_positive_count() const;
};

/// Greedy matcher: predictions in descending confidence, each taking the
/// unmatched same-category ground truth of highest IoU >= iou_threshold.
/// Ties on confidence break by (category, box) so results are independent of
/// input order. Throws std::invalid_argument unless iou_threshold is in (0,1).
MatchOutcome match_image(std::span<const Detection> predictions,
                         std::span<const GroundTruthBox> ground_truth,
                         double iou_threshold);

/// Dataset-level pool of matched predictions plus ground-truth counts.
struct Pooled {
  struct Entry {
    double confidence;
    Category category;
    bool true_positive;
  };
  std::vector<Entry> entries;
  std::array<int, kCategoryCount> gt_count{};
  int images = 0;

  void add_image(std::span<const Detection> predictions,
                 std::span<const GroundTruthBox> ground_truth, double iou_threshold);
  int total_gt() const;
  int total_predictions() const { return static_cast<int>(entries.size()); }
};

struct Prf {
  double precision = 1.0;  // convention: 1 when no prediction survives
  double recall = 0.0;
  double f1 = 0.0;
};

/// Micro-pooled precision/recall/F1 over predictions with confidence >=
/// conf_threshold. recall is TP / total ground truth.
Prf precision_recall_f1_at(const Pooled& pooled, double conf_threshold);

/// Same, restricted to one category (that category's predictions and GT).
Prf precision_recall_f1_at(const Pooled& pooled, Category category, double conf_threshold);

struct CurvePoint {
  double x;
  double y;
};

/// One metric trace; x strictly increasing, y in [0,1].
struct CurveSeries {
  std::string label;  // category name, or "all" for the macro aggregate
  std::vector<CurvePoint> points;
  bool empty() const { return points.empty(); }
};

/// Confidence sweeps sampled at every distinct confidence plus the endpoints
/// 0 and 1. Each family holds one series per category with ground truth,
/// followed by the "all" macro-average. Empty prediction pools yield series
/// with no points.
struct SweepResult {
  std::vector<CurveSeries> precision_conf;
  std::vector<CurveSeries> recall_conf;
  std::vector<CurveSeries> f1_conf;
};
SweepResult confidence_sweep(const Pooled& pooled);

/// Precision-recall traces: the monotone precision envelope evaluated at each
/// achieved recall level plus the endpoints, per category and macro "all".
std::vector<CurveSeries> precision_recall_curves(const Pooled& pooled);

/// Average precision for one category: exact area under the monotone
/// (interpolated) precision envelope of the PR staircase, accumulating one
/// point per distinct confidence threshold. nullopt when the category has no
/// ground truth (undefined AP, excluded from the mean).
std::optional<double> ap50(const Pooled& pooled, Category category);

struct BestF1 {
  double confidence = 0.0;
  double f1 = 0.0;
};

/// Argmax of F1 over the sampled confidences; ties break toward higher
/// confidence. Throws std::invalid_argument on an empty series.
BestF1 best_f1_threshold(const CurveSeries& f1_series);

struct EvalReport {
  double iou_threshold = 0.5;
  int images = 0;
  std::array<int, kCategoryCount> gt_count{};
  std::array<std::optional<double>, kCategoryCount> ap50{};  // taxonomy order
  double map50 = 0.0;  // mean of the defined per-category values
  std::optional<BestF1> best_f1;  // from the macro "all" F1 curve
  std::string averaging = "macro";  // how the "all" traces pool categories
};

/// Assembles the report. Throws std::invalid_argument when the pool carries
/// no ground truth at all.
EvalReport make_report(const Pooled& pooled, double iou_threshold);

}  // namespace sitewatch::eval
