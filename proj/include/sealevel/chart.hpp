#pragma once

#include <span>
#include <string>
#include <vector>

#include "sealevel/domain.hpp"
#include "sealevel/store.hpp"

namespace sealevel {

/// One plotted observation. Horizontal bars span [x - x_minus, x + x_plus],
/// vertical bars [y - y_err, y + y_err].
struct ChartPoint {
    CalendarYear x;
    YearSpan x_minus;
    YearSpan x_plus;
    double y = 0.0;
    double y_err = 0.0;
    ObservationId observation_id;
    bool operator==(const ChartPoint&) const = default;
};

/// Points are sorted by x, ties by observation id.
struct ChartSeries {
    AreaId area_id;
    std::string area_name;  // empty for an unknown area id
    std::vector<ChartPoint> points;
    bool operator==(const ChartSeries&) const = default;
};

ChartPoint to_chart_point(const Observation& observation);

/// One series per requested id, in request order.
std::vector<ChartSeries> build_chart(const StoreSnapshot& data, std::span<const AreaId> area_ids);

/// build_chart over every stored area in ascending id order.
std::vector<ChartSeries> all_areas_chart(const StoreSnapshot& data);

}  // namespace sealevel
