#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "topgn/grid.hpp"

namespace topgn {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fp + fn + tn; }
};

struct Scores {
    double miou = 0.0;
    double pa = 0.0;
    double f1 = 0.0;
    double mae = 0.0;
};

enum class RunOutcome { success, collision, frozen, timeout };

inline const char* to_string(RunOutcome o)
{
    switch (o) {
    case RunOutcome::success: return "success";
    case RunOutcome::collision: return "collision";
    case RunOutcome::frozen: return "frozen";
    default: return "timeout";
    }
}

struct RunRecord {
    RunOutcome outcome = RunOutcome::timeout;
    double time_to_goal = 0.0;
    double min_clearance = 0.0;
    double freeze_duration = 0.0;
};

inline ConfusionCounts confusion(const BinaryGrid& pred, const BinaryGrid& gt)
{
    if (pred.side() != gt.side())
        throw std::invalid_argument("confusion: grid dimensions differ");
    ConfusionCounts c;
    for (std::size_t i = 0; i < pred.values().size(); ++i) {
        const bool p = pred.values()[i] != 0;
        const bool g = gt.values()[i] != 0;
        if (p && g)
            ++c.tp;
        else if (p && !g)
            ++c.fp;
        else if (!p && g)
            ++c.fn;
        else
            ++c.tn;
    }
    return c;
}

/// Binary segmentation scores. Empty classes score as perfectly predicted:
/// a class IoU with empty denominator is 1, and precision/recall with empty
/// denominators are 1, so identical masks always yield (1, 1, 1, 0).
inline Scores scores(const ConfusionCounts& c)
{
    if (c.total() == 0) throw std::invalid_argument("scores: empty confusion counts");
    const double tp = static_cast<double>(c.tp);
    const double fp = static_cast<double>(c.fp);
    const double fn = static_cast<double>(c.fn);
    const double tn = static_cast<double>(c.tn);
    const double total = tp + fp + fn + tn;

    const double iou_fg = (tp + fp + fn) == 0.0 ? 1.0 : tp / (tp + fp + fn);
    const double iou_bg = (tn + fp + fn) == 0.0 ? 1.0 : tn / (tn + fp + fn);
    const double precision = (tp + fp) == 0.0 ? 1.0 : tp / (tp + fp);
    const double recall = (tp + fn) == 0.0 ? 1.0 : tp / (tp + fn);

    Scores s;
    s.miou = 0.5 * (iou_fg + iou_bg);
    s.pa = (tp + tn) / total;
    s.f1 = (precision + recall) == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
    s.mae = (fp + fn) / total;
    return s;
}

/// Percentage of successful runs.
inline double aggregate_runs(const std::vector<RunRecord>& records)
{
    if (records.empty()) throw std::invalid_argument("aggregate_runs: no records");
    std::size_t ok = 0;
    for (const RunRecord& r : records)
        if (r.outcome == RunOutcome::success) ++ok;
    return 100.0 * static_cast<double>(ok) / static_cast<double>(records.size());
}

} // namespace topgn
