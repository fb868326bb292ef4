#include "sealevel/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace sealevel {

namespace {

constexpr std::int64_t kBpDatumTicks = 1950 * CalendarYear::kTicksPerYear;

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

void require_finite(double v, std::string_view field) {
    if (!std::isfinite(v)) {
        throw DataError(Errc::NonFiniteField, std::string(field),
                        std::string(field) + " must be a finite number");
    }
}

CalendarYear to_calendar(double raw, AgeScale scale, std::string_view field) {
    require_finite(raw, field);
    if (scale == AgeScale::BP) {
        try {
            return bp_to_calendar(raw);
        } catch (const DataError& e) {
            throw DataError(e.code(), std::string(field), e.what());
        }
    }
    return CalendarYear::from_years(raw, field);
}

}  // namespace

std::string_view to_string(Errc code) {
    switch (code) {
        case Errc::LatitudeOutOfRange: return "LatitudeOutOfRange";
        case Errc::LongitudeOutOfRange: return "LongitudeOutOfRange";
        case Errc::NonFiniteCoordinate: return "NonFiniteCoordinate";
        case Errc::NonFiniteInput: return "NonFiniteInput";
        case Errc::NonFiniteField: return "NonFiniteField";
        case Errc::ValueOutOfRange: return "ValueOutOfRange";
        case Errc::NegativeError: return "NegativeError";
        case Errc::InvertedLimits: return "InvertedLimits";
        case Errc::InvertedInterval: return "InvertedInterval";
        case Errc::EmptyName: return "EmptyName";
        case Errc::DuplicateName: return "DuplicateName";
        case Errc::YearOutOfRange: return "YearOutOfRange";
        case Errc::UnknownArea: return "UnknownArea";
        case Errc::UnknownPublication: return "UnknownPublication";
        case Errc::UnknownIndicator: return "UnknownIndicator";
        case Errc::UnknownId: return "UnknownId";
    }
    return "Unknown";
}

double YearSpan::years() const {
    return static_cast<double>(ticks_) / static_cast<double>(CalendarYear::kTicksPerYear);
}

CalendarYear CalendarYear::from_years(double years, std::string_view field) {
    if (!std::isfinite(years)) {
        throw DataError(Errc::NonFiniteInput, std::string(field),
                        std::string(field) + " must be finite");
    }
    if (std::fabs(years) > kMaxAbsYears) {
        throw DataError(Errc::ValueOutOfRange, std::string(field),
                        std::string(field) + " exceeds 1e9 years");
    }
    return CalendarYear(std::llround(years * static_cast<double>(kTicksPerYear)));
}

CalendarYear CalendarYear::from_ticks(std::int64_t ticks, std::string_view field) {
    if (ticks > kMaxAbsTicks || ticks < -kMaxAbsTicks) {
        throw DataError(Errc::ValueOutOfRange, std::string(field),
                        std::string(field) + " exceeds 1e9 years");
    }
    return CalendarYear(ticks);
}

double CalendarYear::years() const {
    return static_cast<double>(ticks_) / static_cast<double>(kTicksPerYear);
}

std::string CalendarYear::to_string() const {
    const std::uint64_t mag = ticks_ < 0 ? static_cast<std::uint64_t>(-ticks_)
                                         : static_cast<std::uint64_t>(ticks_);
    std::string out = ticks_ < 0 ? "-" : "";
    out += std::to_string(mag / kTicksPerYear);
    auto frac = mag % kTicksPerYear;
    if (frac != 0) {
        std::string digits = std::to_string(frac);
        digits.insert(0, 6 - digits.size(), '0');
        while (digits.back() == '0') digits.pop_back();
        out += '.';
        out += digits;
    }
    return out;
}

RelativeAge RelativeAge::make(CalendarYear lower, CalendarYear upper) {
    if (lower > upper) {
        throw DataError(Errc::InvertedLimits, "age",
                        "lower limit " + lower.to_string() + " is after upper limit " +
                            upper.to_string());
    }
    return RelativeAge(lower, upper);
}

GeoPoint validate_geopoint(double latitude, double longitude) {
    if (!std::isfinite(latitude)) {
        throw DataError(Errc::NonFiniteCoordinate, "latitude", "latitude must be finite");
    }
    if (!std::isfinite(longitude)) {
        throw DataError(Errc::NonFiniteCoordinate, "longitude", "longitude must be finite");
    }
    if (latitude < -90.0 || latitude > 90.0) {
        throw DataError(Errc::LatitudeOutOfRange, "latitude",
                        "latitude must be between -90 and 90 degrees");
    }
    if (longitude < -180.0 || longitude > 180.0) {
        throw DataError(Errc::LongitudeOutOfRange, "longitude",
                        "longitude must be between -180 and 180 degrees");
    }
    return GeoPoint{latitude, longitude};
}

CalendarYear bp_to_calendar(double age_bp) {
    const auto bp = CalendarYear::from_years(age_bp, "age");
    return CalendarYear::from_ticks(kBpDatumTicks - bp.ticks(), "age");
}

double calendar_to_bp(CalendarYear year) {
    return static_cast<double>(kBpDatumTicks - year.ticks()) /
           static_cast<double>(CalendarYear::kTicksPerYear);
}

ObservationPayload validate_observation(const ObservationDraft& draft) {
    ObservationPayload out;
    out.location = validate_geopoint(draft.latitude, draft.longitude);

    require_finite(draft.height, "height");
    require_finite(draft.error, "error");
    if (draft.error < 0.0) {
        throw DataError(Errc::NegativeError, "error", "error must not be negative");
    }
    out.height = draft.height;
    out.error = draft.error;
    out.area_id = draft.area_id;
    out.publication_id = draft.publication_id;
    out.indicator_id = draft.indicator_id;

    if (draft.age.kind == AgeKind::Absolute) {
        out.age = AbsoluteAge{to_calendar(draft.age.value, draft.scale, "age.value")};
    } else {
        auto a = to_calendar(draft.age.lower, draft.scale, "age.lower");
        auto b = to_calendar(draft.age.upper, draft.scale, "age.upper");
        // BP limits come out reversed on the calendar scale.
        out.age = RelativeAge::make(std::min(a, b), std::max(a, b));
    }
    return out;
}

VlmPayload validate_vlm(const VlmDraft& draft) {
    VlmPayload out;
    out.location = validate_geopoint(draft.latitude, draft.longitude);
    require_finite(draft.age_start, "age_start");
    require_finite(draft.age_end, "age_end");
    require_finite(draft.velocity, "velocity");
    out.age_start = CalendarYear::from_years(draft.age_start, "age_start");
    out.age_end = CalendarYear::from_years(draft.age_end, "age_end");
    if (out.age_start > out.age_end) {
        throw DataError(Errc::InvertedInterval, "age_start",
                        "age_start must not be after age_end");
    }
    out.velocity = draft.velocity;
    out.area_id = draft.area_id;
    return out;
}

std::string normalize_name(std::string_view raw, std::string_view field) {
    auto first = std::find_if_not(raw.begin(), raw.end(), is_space);
    auto last = std::find_if_not(raw.rbegin(), raw.rend(), is_space).base();
    if (first >= last) {
        throw DataError(Errc::EmptyName, std::string(field),
                        std::string(field) + " must not be empty");
    }
    return std::string(first, last);
}

void validate_publication_year(int year) {
    if (year < kMinPublicationYear || year > kMaxPublicationYear) {
        throw DataError(Errc::YearOutOfRange, "year",
                        "publication year must be between 1500 and 2200");
    }
}

AgeGeometry age_plot_geometry(const Age& age) {
    if (const auto* abs = std::get_if<AbsoluteAge>(&age)) {
        return AgeGeometry{abs->value, {}, {}};
    }
    const auto& rel = std::get<RelativeAge>(age);
    const auto half = YearSpan::from_ticks((rel.upper() - rel.lower()).ticks() / 2);
    const auto center = rel.lower() + half;
    return AgeGeometry{center, center - rel.lower(), rel.upper() - center};
}

}  // namespace sealevel
