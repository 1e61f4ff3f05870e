#include "handloc/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "handloc/errors.hpp"

namespace handloc {

MatchResult match_sets(const BoxSet& pred, const BoxSet& gt, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw ConfigError("match threshold must lie in (0,1), got " + std::to_string(threshold));

    MatchResult r;
    r.threshold = threshold;
    for (std::size_t gi = 0; gi < gt.size(); ++gi) {
        for (const BBox& p : pred) {
            if (iou(p, gt[gi]) > threshold) {
                r.matched_gt.push_back(gi);
                break;
            }
        }
    }
    for (std::size_t pi = 0; pi < pred.size(); ++pi) {
        for (const BBox& g : gt) {
            if (iou(pred[pi], g) > threshold) {
                r.matched_pred.push_back(pi);
                break;
            }
        }
    }
    return r;
}

double ap_fp(const BoxSet& pred, const BoxSet& gt, double threshold) {
    const MatchResult m = match_sets(pred, gt, threshold);
    double penalty = 1.0; // 0.75^k by iterated product, exact for small k
    for (std::size_t k = 0; k < pred.size() - m.matched_pred.size(); ++k)
        penalty *= 0.75;
    if (gt.empty())
        return penalty;
    return (static_cast<double>(m.matched_gt.size()) / static_cast<double>(gt.size())) * penalty;
}

ImageScore evaluate_image(const std::string& image_id, const BoxSet& pred, const BoxSet& gt) {
    ImageScore s;
    s.image_id = image_id;
    s.ap_fp_80 = ap_fp(pred, gt, 0.8);
    s.ap_fp_50 = ap_fp(pred, gt, 0.5);
    s.giou = region_iou(pred, gt);
    s.n_pred = static_cast<int>(pred.size());
    s.n_gt = static_cast<int>(gt.size());
    s.bad_quality = false;
    return s;
}

std::vector<ImageScore> mark_bad_quality(std::vector<ImageScore> scores,
                                         int max_boxes, double cap) {
    if (!(cap > 0.0 && cap <= 1.0))
        throw ConfigError("bad-quality cap must lie in (0,1], got " + std::to_string(cap));

    std::vector<std::size_t> flagged;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        scores[i].bad_quality = scores[i].n_pred > max_boxes;
        if (scores[i].bad_quality)
            flagged.push_back(i);
    }

    const auto allowed = static_cast<std::size_t>(
        std::floor(cap * static_cast<double>(scores.size()) + 1e-9));
    if (flagged.size() > allowed) {
        std::sort(flagged.begin(), flagged.end(), [&](std::size_t a, std::size_t b) {
            if (scores[a].n_pred != scores[b].n_pred)
                return scores[a].n_pred > scores[b].n_pred;
            return scores[a].image_id < scores[b].image_id;
        });
        for (std::size_t k = allowed; k < flagged.size(); ++k)
            scores[flagged[k]].bad_quality = false;
    }
    return scores;
}

AggregateReport aggregate(const std::vector<ImageScore>& scores) {
    if (scores.empty())
        throw ValidationError("aggregate: empty score list");

    AggregateReport rep;
    rep.n_images = static_cast<int>(scores.size());

    double sum80 = 0.0, sum80_star = 0.0, sum80_plus = 0.0;
    double sum50 = 0.0, sum_giou = 0.0;
    int n_ok = 0;
    for (const ImageScore& s : scores) {
        sum80 += s.ap_fp_80;
        sum50 += s.ap_fp_50;
        sum_giou += s.giou;
        if (s.bad_quality) {
            ++rep.n_bad_quality;
            sum80_star += 0.35;
        } else {
            sum80_star += s.ap_fp_80;
            sum80_plus += s.ap_fp_80;
            ++n_ok;
        }
    }

    const auto n = static_cast<double>(scores.size());
    rep.ap_fp_80 = sum80 / n;
    rep.ap_fp_80_star = sum80_star / n;
    if (n_ok > 0)
        rep.ap_fp_80_plus = sum80_plus / static_cast<double>(n_ok);
    rep.ap_fp_50 = sum50 / n;
    rep.giou = sum_giou / n;
    return rep;
}

} // namespace handloc
