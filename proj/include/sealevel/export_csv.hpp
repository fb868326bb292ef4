#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sealevel/domain.hpp"

namespace sealevel {

/// A table of text cells. to_string() writes RFC 4180 style: cells holding a
/// comma, quote, CR or LF are quoted with embedded quotes doubled, every
/// record (the last one too) ends in CRLF, UTF-8 without BOM.
struct CsvDocument {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_string() const;
    bool operator==(const CsvDocument&) const = default;
};

std::string escape_csv_cell(std::string_view cell);

/// Shortest text that parses back to the same double ("1.2", "1850").
std::string format_number(double value);
/// "lat,lon" with six decimals each.
std::string format_coordinates(const GeoPoint& p);
/// Absolute ages as a plain year, relative ages as "lower/upper".
std::string format_age(const Age& age);

using IndicatorNameLookup = std::function<std::optional<std::string>(IndicatorId)>;

/// Header `ID,Coordinates,Height,Age,Indicator,Error`, one row per
/// observation in input order. Throws UnknownIndicator when `lookup` misses.
CsvDocument observations_to_csv(std::span<const Observation> observations,
                                const IndicatorNameLookup& lookup);

CsvDocument entities_to_csv(std::span<const Area> areas);
CsvDocument entities_to_csv(std::span<const Publication> publications);
CsvDocument entities_to_csv(std::span<const Indicator> indicators);
CsvDocument entities_to_csv(std::span<const VerticalLandMovement> vlms);

}  // namespace sealevel
