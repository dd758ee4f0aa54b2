#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "hcap/errors.hpp"

namespace hcap {

struct EnvelopeSupport {
    double r = 0.0;
    double g = 0.0;
    double weight = 1.0;
    int point_index = -1;  // index into the input point list
};

/// Upper concave envelope of sampled (r, g) points evaluated at one query.
struct Envelope {
    std::vector<EnvelopeSupport> support;  // at most 2 active points
    double value_at = 0.0;
};

/// Evaluates the upper concave envelope of `points` (sorted by r) at `query`
/// by monotone-chain hull construction and chord interpolation.
inline Envelope concave_envelope(const std::vector<std::pair<double, double>>& points,
                                 double query) {
    if (points.empty()) fail(ErrorCode::InvalidArgument, "no points");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (points[i].first < points[i - 1].first)
            fail(ErrorCode::InvalidArgument, "points must be sorted by r");

    // Collapse duplicate r values, keeping the larger g.
    struct Pt {
        double r, g;
        int idx;
    };
    std::vector<Pt> pts;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!pts.empty() && points[i].first == pts.back().r) {
            if (points[i].second > pts.back().g)
                pts.back() = {points[i].first, points[i].second, static_cast<int>(i)};
        } else {
            pts.push_back({points[i].first, points[i].second, static_cast<int>(i)});
        }
    }

    const double lo = pts.front().r, hi = pts.back().r;
    if (query < lo - 1e-12 || query > hi + 1e-12)
        fail(ErrorCode::QueryOutOfRange, "query outside the sampled budget range");
    query = std::clamp(query, lo, hi);

    // Upper hull, left to right: keep slopes strictly decreasing.
    std::vector<Pt> hull;
    for (const Pt& c : pts) {
        while (hull.size() >= 2) {
            const Pt& a = hull[hull.size() - 2];
            const Pt& b = hull[hull.size() - 1];
            const double cross = (b.r - a.r) * (c.g - a.g) - (b.g - a.g) * (c.r - a.r);
            if (cross >= 0.0)
                hull.pop_back();  // b is on or below chord a-c
            else
                break;
        }
        hull.push_back(c);
    }

    Envelope env;
    // Locate the hull segment containing the query.
    std::size_t seg = 0;
    while (seg + 1 < hull.size() && hull[seg + 1].r < query) ++seg;
    if (hull.size() == 1 || query == hull[seg].r) {
        env.value_at = hull[seg].g;
        env.support.push_back({hull[seg].r, hull[seg].g, 1.0, hull[seg].idx});
        return env;
    }
    const Pt& a = hull[seg];
    const Pt& b = hull[seg + 1];
    if (query == b.r) {
        env.value_at = b.g;
        env.support.push_back({b.r, b.g, 1.0, b.idx});
        return env;
    }
    const double wa = (b.r - query) / (b.r - a.r);
    const double wb = 1.0 - wa;
    env.value_at = wa * a.g + wb * b.g;
    if (wb <= 1e-14) {
        env.support.push_back({a.r, a.g, 1.0, a.idx});
    } else if (wa <= 1e-14) {
        env.support.push_back({b.r, b.g, 1.0, b.idx});
    } else {
        env.support.push_back({a.r, a.g, wa, a.idx});
        env.support.push_back({b.r, b.g, wb, b.idx});
    }
    return env;
}

}  // namespace hcap
