// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "skelgen/detect.hpp"

namespace skelgen::eval {

struct GroundTruth {
    detect::UiClass cls;
    detect::Box box;
};

struct ImageEval {
    std::string image_id;
    std::vector<detect::UiDetection> detections;
    std::vector<GroundTruth> ground_truth;
};

struct MatchResult {
    std::vector<bool> det_tp;      // indexed like the input detections
    std::vector<bool> gt_matched;  // indexed like the input ground truth
};

/// Greedy one-to-one matching: detections in descending score order (input
/// order on ties) take the unmatched same-class ground truth of highest IoU,
/// provided that IoU reaches `iou_thresh`.
MatchResult match_detections(const std::vector<detect::UiDetection>& dets, const std::vector<GroundTruth>& gts,
                             double iou_thresh);

struct PrPoint {
    double recall;
    double precision;
};

struct PrCurve {
    std::vector<PrPoint> points;
    // Absent when there is no ground truth; such classes are left out of mAP.
    std::optional<double> ap;
};

/// `flags` are TP/FP outcomes in descending score order. AP is the area under
/// the all-points interpolated precision envelope.
PrCurve average_precision(const std::vector<bool>& flags, std::size_t total_gt);

struct ClassAp {
    std::size_t num_gt = 0;
    std::optional<double> ap;
};

struct MapResult {
    double map = 0.0;
    std::map<detect::UiClass, ClassAp> per_class;
};

/// Unweighted mean of per-class AP over classes with at least one ground
/// truth box.
MapResult mean_ap(const std::vector<ImageEval>& images, double iou_thresh);

inline constexpr std::size_t kMaxDetectionsPerImage = 100;

/// Recall per image (top-100 detections by score), averaged over images with
/// ground truth and over IoU thresholds 0.50, 0.55, ..., 0.95.
double average_recall(const std::vector<ImageEval>& images, std::size_t max_dets = kMaxDetectionsPerImage);

struct Report {
    double map_50 = 0.0;
    double map_75 = 0.0;
    double ar_100 = 0.0;
    std::map<detect::UiClass, ClassAp> per_class_50;
    std::map<detect::UiClass, ClassAp> per_class_75;
};

Report evaluate(const std::vector<ImageEval>& images);
/// {"map_50":…, "map_75":…, "ar_100":…, "per_class":{…}}
std::string report_to_json(const Report& report);

// ---- RPN training loss -----------------------------------------------------

inline constexpr double kProbabilityEpsilon = 1e-12;

/// As printed: 0.5 x^2 / sigma^2 when |x| < 1 / sigma^2, |x| - 0.5 otherwise.
double smooth_l1(double x, double sigma = 1.0);

/// -log[p* p + (1 - p*)(1 - p)] with p clamped to [eps, 1 - eps].
double cls_loss(double p, int p_star);

using BoxParams = std::array<double, 4>;

double reg_loss(const BoxParams& t, const BoxParams& t_star, double sigma = 1.0);

struct RpnLossParams {
    double lambda;
    double n_cls;
    double n_reg;
    double sigma = 1.0;
};

struct AnchorSample {
    double p;
    int p_star;  // 0 or 1
    BoxParams t;
    BoxParams t_star;
};

/// (1/N_cls) sum L_cls + lambda (1/N_reg) sum p* L_reg.
double rpn_loss(const std::vector<AnchorSample>& samples, const RpnLossParams& params);

}  // namespace skelgen::eval
