// SPDX-License-Identifier: Apache-2.0

#include "skelgen/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace skelgen::eval {

using detect::UiClass;
using detect::UiDetection;

namespace {

std::vector<std::size_t> score_order(const std::vector<UiDetection>& dets) {
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
    return order;
}

}  // namespace

MatchResult match_detections(const std::vector<UiDetection>& dets, const std::vector<GroundTruth>& gts,
                             double iou_thresh) {
    MatchResult r;
    r.det_tp.assign(dets.size(), false);
    r.gt_matched.assign(gts.size(), false);
    for (auto d : score_order(dets)) {
        std::size_t best = gts.size();
        double best_iou = -1.0;
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (r.gt_matched[g] || gts[g].cls != dets[d].cls) continue;
            const double v = detect::iou(dets[d].box, gts[g].box);
            if (v > best_iou) {
                best_iou = v;
                best = g;
            }
        }
        if (best < gts.size() && best_iou >= iou_thresh) {
            r.det_tp[d] = true;
            r.gt_matched[best] = true;
        }
    }
    return r;
}

PrCurve average_precision(const std::vector<bool>& flags, std::size_t total_gt) {
    PrCurve curve;
    if (total_gt == 0) return curve;

    const auto g = static_cast<double>(total_gt);
    std::size_t tp = 0;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (flags[i]) ++tp;
        curve.points.push_back({static_cast<double>(tp) / g, static_cast<double>(tp) / static_cast<double>(i + 1)});
    }

    // precision envelope, right to left
    std::vector<double> envelope(curve.points.size());
    double running = 0.0;
    for (std::size_t i = curve.points.size(); i-- > 0;) {
        running = std::max(running, curve.points[i].precision);
        envelope[i] = running;
    }

    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        if (!flags[i]) continue;
        ap += (curve.points[i].recall - prev_recall) * envelope[i];
        prev_recall = curve.points[i].recall;
    }
    curve.ap = ap;
    return curve;
}

MapResult mean_ap(const std::vector<ImageEval>& images, double iou_thresh) {
    struct Scored {
        double score;
        bool tp;
    };
    std::map<UiClass, std::vector<Scored>> per_class_dets;
    std::map<UiClass, std::size_t> per_class_gt;

    for (const auto& img : images) {
        for (const auto& gt : img.ground_truth) ++per_class_gt[gt.cls];
        const auto m = match_detections(img.detections, img.ground_truth, iou_thresh);
        for (auto d : score_order(img.detections)) {
            per_class_dets[img.detections[d].cls].push_back({img.detections[d].score, m.det_tp[d]});
        }
    }

    MapResult result;
    double sum = 0.0;
    std::size_t counted = 0;
    for (auto cls : detect::kAllUiClasses) {
        auto& dets = per_class_dets[cls];
        const auto num_gt = per_class_gt[cls];
        if (dets.empty() && num_gt == 0) continue;
        std::stable_sort(dets.begin(), dets.end(), [](const Scored& a, const Scored& b) { return a.score > b.score; });
        std::vector<bool> flags;
        flags.reserve(dets.size());
        for (const auto& s : dets) flags.push_back(s.tp);
        ClassAp entry{num_gt, average_precision(flags, num_gt).ap};
        if (entry.ap) {
            sum += *entry.ap;
            ++counted;
        }
        result.per_class[cls] = entry;
    }
    result.map = counted == 0 ? 0.0 : sum / static_cast<double>(counted);
    return result;
}

double average_recall(const std::vector<ImageEval>& images, std::size_t max_dets) {
    double total = 0.0;
    int thresholds = 0;
    for (int step = 0; step < 10; ++step) {
        const double thresh = (50.0 + 5.0 * step) / 100.0;
        double recall_sum = 0.0;
        std::size_t counted = 0;
        for (const auto& img : images) {
            if (img.ground_truth.empty()) continue;
            const auto order = score_order(img.detections);
            std::vector<UiDetection> top;
            for (std::size_t i = 0; i < order.size() && i < max_dets; ++i) top.push_back(img.detections[order[i]]);
            const auto m = match_detections(top, img.ground_truth, thresh);
            const auto matched = static_cast<double>(std::count(m.gt_matched.begin(), m.gt_matched.end(), true));
            recall_sum += matched / static_cast<double>(img.ground_truth.size());
            ++counted;
        }
        total += counted == 0 ? 0.0 : recall_sum / static_cast<double>(counted);
        ++thresholds;
    }
    return total / thresholds;
}

Report evaluate(const std::vector<ImageEval>& images) {
    Report r;
    auto m50 = mean_ap(images, 0.5);
    auto m75 = mean_ap(images, 0.75);
    r.map_50 = m50.map;
    r.map_75 = m75.map;
    r.per_class_50 = std::move(m50.per_class);
    r.per_class_75 = std::move(m75.per_class);
    r.ar_100 = average_recall(images);
    return r;
}

std::string report_to_json(const Report& report) {
    nlohmann::ordered_json doc;
    doc["map_50"] = report.map_50;
    doc["map_75"] = report.map_75;
    doc["ar_100"] = report.ar_100;
    doc["per_class"] = nlohmann::ordered_json::object();
    for (auto cls : detect::kAllUiClasses) {
        auto a = report.per_class_50.find(cls);
        auto b = report.per_class_75.find(cls);
        if (a == report.per_class_50.end() && b == report.per_class_75.end()) continue;
        nlohmann::ordered_json e;
        const auto& any = a != report.per_class_50.end() ? a->second : b->second;
        e["num_gt"] = any.num_gt;
        auto ap = [](const std::map<UiClass, ClassAp>& m, UiClass c) {
            auto it = m.find(c);
            return it != m.end() && it->second.ap ? nlohmann::ordered_json(*it->second.ap) : nlohmann::ordered_json(nullptr);
        };
        e["ap_50"] = ap(report.per_class_50, cls);
        e["ap_75"] = ap(report.per_class_75, cls);
        doc["per_class"][std::string(detect::to_string(cls))] = std::move(e);
    }
    return doc.dump(2) + "\n";
}

// ---- losses ----------------------------------------------------------------

double smooth_l1(double x, double sigma) {
    if (!(sigma > 0)) throw std::invalid_argument("smooth_l1: sigma must be > 0");
    const double inv_s2 = 1.0 / (sigma * sigma);
    const double ax = std::fabs(x);
    if (ax < inv_s2) return 0.5 * x * x * inv_s2;
    return ax - 0.5;
}

double cls_loss(double p, int p_star) {
    if (p_star != 0 && p_star != 1) throw std::invalid_argument("cls_loss: p_star must be 0 or 1");
    const double q = std::clamp(p, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
    return -std::log(p_star * q + (1 - p_star) * (1.0 - q));
}

double reg_loss(const BoxParams& t, const BoxParams& t_star, double sigma) {
    double sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i) sum += smooth_l1(t[i] - t_star[i], sigma);
    return sum;
}

double rpn_loss(const std::vector<AnchorSample>& samples, const RpnLossParams& params) {
    if (!(params.n_cls > 0) || !(params.n_reg > 0)) throw std::invalid_argument("rpn_loss: normalizers must be > 0");
    if (!(params.sigma > 0)) throw std::invalid_argument("rpn_loss: sigma must be > 0");
    double cls = 0.0;
    double reg = 0.0;
    for (const auto& s : samples) {
        cls += cls_loss(s.p, s.p_star);
        if (s.p_star == 1) reg += reg_loss(s.t, s.t_star, params.sigma);
    }
    return cls / params.n_cls + params.lambda * (reg / params.n_reg);
}

}  // namespace skelgen::eval
