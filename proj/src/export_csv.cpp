#include "sealevel/export_csv.hpp"

#include <charconv>
#include <cstdio>
#include <system_error>

namespace sealevel {

std::string CsvDocument::to_string() const {
    std::string out;
    auto write_row = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i != 0) out += ',';
            out += escape_csv_cell(cells[i]);
        }
        out += "\r\n";
    };
    write_row(header);
    for (const auto& row : rows) write_row(row);
    return out;
}

std::string escape_csv_cell(std::string_view cell) {
    if (cell.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(cell);
    std::string out;
    out.reserve(cell.size() + 2);
    out += '"';
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_number(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, end);
}

std::string format_coordinates(const GeoPoint& p) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f,%.6f", p.latitude, p.longitude);
    return buf;
}

std::string format_age(const Age& age) {
    if (const auto* a = std::get_if<AbsoluteAge>(&age)) return a->value.to_string();
    const auto& r = std::get<RelativeAge>(age);
    return r.lower().to_string() + "/" + r.upper().to_string();
}

CsvDocument observations_to_csv(std::span<const Observation> observations,
                                const IndicatorNameLookup& lookup) {
    CsvDocument doc;
    doc.header = {"ID", "Coordinates", "Height", "Age", "Indicator", "Error"};
    doc.rows.reserve(observations.size());
    for (const auto& o : observations) {
        auto name = lookup(o.indicator_id);
        if (!name) {
            throw DataError(Errc::UnknownIndicator, "indicator_id",
                            "no indicator with id " + std::to_string(o.indicator_id.value));
        }
        doc.rows.push_back({std::to_string(o.id.value), format_coordinates(o.location),
                            format_number(o.height), format_age(o.age), std::move(*name),
                            format_number(o.error)});
    }
    return doc;
}

CsvDocument entities_to_csv(std::span<const Area> areas) {
    CsvDocument doc{{"ID", "Name"}, {}};
    for (const auto& a : areas) doc.rows.push_back({std::to_string(a.id.value), a.name});
    return doc;
}

CsvDocument entities_to_csv(std::span<const Publication> publications) {
    CsvDocument doc{{"ID", "Title", "Authors", "Year"}, {}};
    for (const auto& p : publications) {
        doc.rows.push_back({std::to_string(p.id.value), p.title, p.authors, std::to_string(p.year)});
    }
    return doc;
}

CsvDocument entities_to_csv(std::span<const Indicator> indicators) {
    CsvDocument doc{{"ID", "Name"}, {}};
    for (const auto& i : indicators) doc.rows.push_back({std::to_string(i.id.value), i.name});
    return doc;
}

CsvDocument entities_to_csv(std::span<const VerticalLandMovement> vlms) {
    CsvDocument doc{{"ID", "Coordinates", "AgeStart", "AgeEnd", "Velocity", "AreaID"}, {}};
    for (const auto& v : vlms) {
        doc.rows.push_back({std::to_string(v.id.value), format_coordinates(v.location),
                            v.age_start.to_string(), v.age_end.to_string(),
                            format_number(v.velocity), std::to_string(v.area_id.value)});
    }
    return doc;
}

}  // namespace sealevel
