#include "sealevel/chart.hpp"

#include <algorithm>

namespace sealevel {

ChartPoint to_chart_point(const Observation& observation) {
    const auto geom = age_plot_geometry(observation.age);
    return ChartPoint{geom.center,        geom.minus,       geom.plus,
                      observation.height, observation.error, observation.id};
}

std::vector<ChartSeries> build_chart(const StoreSnapshot& data, std::span<const AreaId> area_ids) {
    std::vector<ChartSeries> out;
    out.reserve(area_ids.size());
    for (const auto id : area_ids) {
        ChartSeries series;
        series.area_id = id;
        const auto* area = data.find(id);
        if (area) {
            series.area_name = area->name;
            const auto rows = data.observations_by(ObservationFilter::Area, id.value);
            series.points.reserve(rows.size());
            std::transform(rows.begin(), rows.end(), std::back_inserter(series.points),
                           to_chart_point);
            std::sort(series.points.begin(), series.points.end(),
                      [](const ChartPoint& a, const ChartPoint& b) {
                          if (a.x != b.x) return a.x < b.x;
                          return a.observation_id < b.observation_id;
                      });
        }
        out.push_back(std::move(series));
    }
    return out;
}

std::vector<ChartSeries> all_areas_chart(const StoreSnapshot& data) {
    std::vector<AreaId> ids;
    ids.reserve(data.areas().size());
    for (const auto& a : data.areas()) ids.push_back(a.id);
    return build_chart(data, ids);
}

}  // namespace sealevel
