#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace sealevel {

// Closed error vocabulary shared by validation, the store and the HTTP layer.
enum class Errc {
    LatitudeOutOfRange,
    LongitudeOutOfRange,
    NonFiniteCoordinate,
    NonFiniteInput,
    NonFiniteField,
    ValueOutOfRange,
    NegativeError,
    InvertedLimits,
    InvertedInterval,
    EmptyName,
    DuplicateName,
    YearOutOfRange,
    UnknownArea,
    UnknownPublication,
    UnknownIndicator,
    UnknownId,
};

std::string_view to_string(Errc code);

class DataError : public std::runtime_error {
public:
    DataError(Errc code, std::string field, const std::string& message)
        : std::runtime_error(message), code_(code), field_(std::move(field)) {}

    Errc code() const noexcept { return code_; }
    const std::string& field() const noexcept { return field_; }

private:
    Errc code_;
    std::string field_;
};

template <typename Tag>
struct Id {
    std::int64_t value = 0;
    auto operator<=>(const Id&) const = default;
};

using AreaId = Id<struct AreaTag>;
using PublicationId = Id<struct PublicationTag>;
using IndicatorId = Id<struct IndicatorTag>;
using ObservationId = Id<struct ObservationTag>;
using VlmId = Id<struct VlmTag>;

struct GeoPoint {
    double latitude = 0.0;
    double longitude = 0.0;
    bool operator==(const GeoPoint&) const = default;
};

/// A span of years on the micro-year grid. Always produced by subtracting
/// two CalendarYears, so arithmetic on it is exact.
class YearSpan {
public:
    constexpr YearSpan() = default;
    static constexpr YearSpan from_ticks(std::int64_t ticks) { return YearSpan(ticks); }

    constexpr std::int64_t ticks() const { return ticks_; }
    double years() const;

    auto operator<=>(const YearSpan&) const = default;

private:
    constexpr explicit YearSpan(std::int64_t ticks) : ticks_(ticks) {}
    std::int64_t ticks_ = 0;
};

/// A year on the astronomical scale (0 = 1 BC, negative = earlier), held as
/// a whole number of micro-years so that scale conversion, midpoints and
/// error-bar reconstruction are exact.
class CalendarYear {
public:
    static constexpr std::int64_t kTicksPerYear = 1'000'000;
    // 1e9 years keeps every tick count below 2^53, so ticks <-> double is exact.
    static constexpr double kMaxAbsYears = 1e9;
    static constexpr std::int64_t kMaxAbsTicks = 1'000'000'000LL * kTicksPerYear;

    constexpr CalendarYear() = default;

    /// Rounds to the nearest micro-year. Throws NonFiniteInput or
    /// ValueOutOfRange, tagging the error with `field`.
    static CalendarYear from_years(double years, std::string_view field = "age");
    static CalendarYear from_ticks(std::int64_t ticks, std::string_view field = "age");

    constexpr std::int64_t ticks() const { return ticks_; }
    double years() const;

    /// Exact decimal rendering: "1850", "-550", "1234.5".
    std::string to_string() const;

    auto operator<=>(const CalendarYear&) const = default;

    friend YearSpan operator-(CalendarYear a, CalendarYear b) {
        return YearSpan::from_ticks(a.ticks_ - b.ticks_);
    }
    friend CalendarYear operator+(CalendarYear a, YearSpan s) {
        return CalendarYear(a.ticks_ + s.ticks());
    }
    friend CalendarYear operator-(CalendarYear a, YearSpan s) {
        return CalendarYear(a.ticks_ - s.ticks());
    }

private:
    constexpr explicit CalendarYear(std::int64_t ticks) : ticks_(ticks) {}
    std::int64_t ticks_ = 0;
};

struct AbsoluteAge {
    CalendarYear value;
    bool operator==(const AbsoluteAge&) const = default;
};

/// An age interval, always ordered so that lower() <= upper().
class RelativeAge {
public:
    /// Throws InvertedLimits when lower > upper.
    static RelativeAge make(CalendarYear lower, CalendarYear upper);

    CalendarYear lower() const { return lower_; }
    CalendarYear upper() const { return upper_; }

    bool operator==(const RelativeAge&) const = default;

private:
    RelativeAge(CalendarYear lower, CalendarYear upper) : lower_(lower), upper_(upper) {}
    CalendarYear lower_;
    CalendarYear upper_;
};

using Age = std::variant<AbsoluteAge, RelativeAge>;

enum class AgeKind { Absolute, Relative };
enum class AgeScale { BP, ADBC };

inline AgeKind kind_of(const Age& age) {
    return std::holds_alternative<AbsoluteAge>(age) ? AgeKind::Absolute : AgeKind::Relative;
}

struct Area {
    AreaId id;
    std::string name;
    bool operator==(const Area&) const = default;
};

struct Indicator {
    IndicatorId id;
    std::string name;
    bool operator==(const Indicator&) const = default;
};

struct Publication {
    PublicationId id;
    std::string title;
    std::string authors;
    int year = 0;
    bool operator==(const Publication&) const = default;
};

struct Observation {
    ObservationId id;
    GeoPoint location;
    double height = 0.0;  // metres above present local mean sea level
    double error = 0.0;   // metres, height uncertainty from the indicator
    AreaId area_id;
    PublicationId publication_id;
    IndicatorId indicator_id;
    Age age;
    bool operator==(const Observation&) const = default;
};

struct VerticalLandMovement {
    VlmId id;
    GeoPoint location;
    CalendarYear age_start;
    CalendarYear age_end;
    double velocity = 0.0;  // mm/yr, positive = uplift
    AreaId area_id;
    bool operator==(const VerticalLandMovement&) const = default;
};

inline constexpr int kMinPublicationYear = 1500;
inline constexpr int kMaxPublicationYear = 2200;

// Raw age inputs as typed into the observation form. `value` is read for
// absolute ages, `lower`/`upper` for relative ones.
struct AgeInput {
    AgeKind kind = AgeKind::Absolute;
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

struct ObservationDraft {
    double latitude = 0.0;
    double longitude = 0.0;
    double height = 0.0;
    double error = 0.0;
    AreaId area_id;
    PublicationId publication_id;
    IndicatorId indicator_id;
    AgeScale scale = AgeScale::ADBC;
    AgeInput age;
};

/// Everything an Observation holds except its id.
struct ObservationPayload {
    GeoPoint location;
    double height = 0.0;
    double error = 0.0;
    AreaId area_id;
    PublicationId publication_id;
    IndicatorId indicator_id;
    Age age;
    bool operator==(const ObservationPayload&) const = default;
};

struct VlmDraft {
    double latitude = 0.0;
    double longitude = 0.0;
    double age_start = 0.0;
    double age_end = 0.0;
    double velocity = 0.0;
    AreaId area_id;
};

struct VlmPayload {
    GeoPoint location;
    CalendarYear age_start;
    CalendarYear age_end;
    double velocity = 0.0;
    AreaId area_id;
    bool operator==(const VlmPayload&) const = default;
};

GeoPoint validate_geopoint(double latitude, double longitude);

/// Before Present (datum 1950) to the astronomical calendar scale.
CalendarYear bp_to_calendar(double age_bp);

/// Inverse of bp_to_calendar, for display and previews.
double calendar_to_bp(CalendarYear year);

/// Converts BP inputs to calendar years when `draft.scale` is BP, then orders
/// relative limits ascending. Entity references are not checked here.
ObservationPayload validate_observation(const ObservationDraft& draft);

VlmPayload validate_vlm(const VlmDraft& draft);

/// Trims ASCII whitespace; throws EmptyName (tagged with `field`) if nothing is left.
std::string normalize_name(std::string_view raw, std::string_view field = "name");

void validate_publication_year(int year);

struct AgeGeometry {
    CalendarYear center;
    YearSpan minus;
    YearSpan plus;
    bool operator==(const AgeGeometry&) const = default;
};

/// Horizontal error-bar geometry for an age. Relative ages are centred at the
/// interval midpoint, rounded down to the micro-year grid, so that
/// center - minus and center + plus reproduce the limits exactly.
AgeGeometry age_plot_geometry(const Age& age);

}  // namespace sealevel
