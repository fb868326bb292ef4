#include "sealevel/api.hpp"

#include <charconv>
#include <limits>

#include "sealevel/export_csv.hpp"

namespace sealevel::api {

using nlohmann::json;

namespace {

ApiError bad_request(std::string code, std::string message, std::optional<std::string> field = {}) {
    return ApiError{400, std::move(code), std::move(message), std::move(field)};
}

ApiError not_found(std::string message) {
    return ApiError{404, "NotFound", std::move(message), std::nullopt};
}

Response json_response(int status, const json& body) {
    Response r;
    r.status = status;
    r.body = body.dump();
    return r;
}

Response error_response(const ApiError& e) { return json_response(e.http_status, e.to_json()); }

json parse_body(const std::string& body) {
    json parsed = json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) {
        throw bad_request("MalformedBody", "request body is not valid JSON");
    }
    if (!parsed.is_object()) {
        throw bad_request("MalformedBody", "request body must be a JSON object");
    }
    return parsed;
}

const json& require(const json& body, const char* key, const char* field = nullptr) {
    if (!field) field = key;
    auto it = body.find(key);
    if (it == body.end() || it->is_null()) {
        throw bad_request("InvalidField", std::string(field) + " is required", field);
    }
    return *it;
}

double number_field(const json& body, const char* field) {
    const auto& v = require(body, field);
    if (!v.is_number()) {
        throw bad_request("InvalidField", std::string(field) + " must be a number", field);
    }
    return v.get<double>();
}

std::int64_t integer_value(const json& v, const char* field) {
    if (!v.is_number_integer() ||
        (v.is_number_unsigned() &&
         v.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))) {
        throw bad_request("InvalidField", std::string(field) + " must be an integer", field);
    }
    return v.get<std::int64_t>();
}

std::int64_t integer_field(const json& body, const char* field) {
    return integer_value(require(body, field), field);
}

std::string string_field(const json& body, const char* field) {
    const auto& v = require(body, field);
    if (!v.is_string()) {
        throw bad_request("InvalidField", std::string(field) + " must be a string", field);
    }
    return v.get<std::string>();
}

json age_to_json(const Age& age) {
    if (const auto* a = std::get_if<AbsoluteAge>(&age)) {
        return {{"kind", "absolute"}, {"value", a->value.years()}};
    }
    const auto& r = std::get<RelativeAge>(age);
    return {{"kind", "relative"}, {"lower", r.lower().years()}, {"upper", r.upper().years()}};
}

json point_to_json(const ChartPoint& p) {
    return {{"x", p.x.years()},
            {"x_minus", p.x_minus.years()},
            {"x_plus", p.x_plus.years()},
            {"y", p.y},
            {"y_err", p.y_err},
            {"observation_id", p.observation_id.value}};
}

ObservationFilter parse_filter(const std::string& raw) {
    if (raw == "area") return ObservationFilter::Area;
    if (raw == "publication") return ObservationFilter::Publication;
    throw bad_request("InvalidFilter", "filter must be \"area\" or \"publication\"", "filter");
}

Response csv_response(const CsvDocument& doc, const std::string& filename) {
    Response r;
    r.content_type = "text/csv; charset=utf-8";
    r.body = doc.to_string();
    r.headers["Content-Disposition"] = "attachment; filename=\"" + filename + "\"";
    return r;
}

}  // namespace

json ApiError::to_json() const {
    json body = {{"code", code}, {"message", message}};
    if (field) body["field"] = *field;
    return body;
}

ApiError from_data_error(const DataError& e) {
    int status = 400;
    switch (e.code()) {
        case Errc::UnknownArea:
        case Errc::UnknownPublication:
        case Errc::UnknownIndicator:
        case Errc::UnknownId:
            status = 404;
            break;
        case Errc::DuplicateName:
            status = 409;
            break;
        default:
            break;
    }
    std::optional<std::string> field;
    if (!e.field().empty()) field = e.field();
    return ApiError{status, std::string(to_string(e.code())), e.what(), field};
}

json to_json(const Area& a) { return {{"id", a.id.value}, {"name", a.name}}; }

json to_json(const Publication& p) {
    return {{"id", p.id.value}, {"title", p.title}, {"authors", p.authors}, {"year", p.year}};
}

json to_json(const Indicator& i) { return {{"id", i.id.value}, {"name", i.name}}; }

json to_json(const Observation& o) {
    return {{"id", o.id.value},
            {"latitude", o.location.latitude},
            {"longitude", o.location.longitude},
            {"height", o.height},
            {"error", o.error},
            {"area_id", o.area_id.value},
            {"publication_id", o.publication_id.value},
            {"indicator_id", o.indicator_id.value},
            {"age", age_to_json(o.age)}};
}

json to_json(const VerticalLandMovement& v) {
    return {{"id", v.id.value},
            {"latitude", v.location.latitude},
            {"longitude", v.location.longitude},
            {"age_start", v.age_start.years()},
            {"age_end", v.age_end.years()},
            {"velocity", v.velocity},
            {"area_id", v.area_id.value}};
}

json to_json(const ChartSeries& s) {
    auto points = json::array();
    for (const auto& p : s.points) points.push_back(point_to_json(p));
    return {{"area_id", s.area_id.value}, {"area_name", s.area_name}, {"points", points}};
}

ObservationDraft parse_observation_draft(const json& body) {
    ObservationDraft d;
    d.latitude = number_field(body, "latitude");
    d.longitude = number_field(body, "longitude");
    d.height = number_field(body, "height");
    d.error = number_field(body, "error");
    d.area_id = AreaId{integer_field(body, "area_id")};
    d.publication_id = PublicationId{integer_field(body, "publication_id")};
    d.indicator_id = IndicatorId{integer_field(body, "indicator_id")};

    d.scale = AgeScale::ADBC;
    if (auto it = body.find("age_scale"); it != body.end() && !it->is_null()) {
        const auto scale = it->is_string() ? it->get<std::string>() : std::string();
        if (scale == "BP") {
            d.scale = AgeScale::BP;
        } else if (scale != "ADBC") {
            throw bad_request("InvalidField", "age_scale must be \"BP\" or \"ADBC\"", "age_scale");
        }
    }

    const auto& age = require(body, "age");
    if (!age.is_object()) throw bad_request("InvalidField", "age must be an object", "age");
    const auto kind = age.contains("kind") && age["kind"].is_string()
                          ? age["kind"].get<std::string>()
                          : std::string();
    if (kind == "absolute") {
        d.age.kind = AgeKind::Absolute;
        const auto& v = require(age, "value", "age.value");
        if (!v.is_number()) throw bad_request("InvalidField", "age.value must be a number", "age.value");
        d.age.value = v.get<double>();
    } else if (kind == "relative") {
        d.age.kind = AgeKind::Relative;
        const auto& lo = require(age, "lower", "age.lower");
        const auto& hi = require(age, "upper", "age.upper");
        if (!lo.is_number()) throw bad_request("InvalidField", "age.lower must be a number", "age.lower");
        if (!hi.is_number()) throw bad_request("InvalidField", "age.upper must be a number", "age.upper");
        d.age.lower = lo.get<double>();
        d.age.upper = hi.get<double>();
    } else {
        throw bad_request("InvalidField", "age.kind must be \"absolute\" or \"relative\"", "age.kind");
    }
    return d;
}

VlmDraft parse_vlm_draft(const json& body) {
    VlmDraft d;
    d.latitude = number_field(body, "latitude");
    d.longitude = number_field(body, "longitude");
    d.age_start = number_field(body, "age_start");
    d.age_end = number_field(body, "age_end");
    d.velocity = number_field(body, "velocity");
    d.area_id = AreaId{integer_field(body, "area_id")};
    return d;
}

Response Service::handle(const Request& request) const {
    try {
        return dispatch(request);
    } catch (const ApiError& e) {
        return error_response(e);
    } catch (const DataError& e) {
        return error_response(from_data_error(e));
    } catch (const StorageError& e) {
        return error_response(ApiError{500, "StorageFailure", e.what(), std::nullopt});
    } catch (const std::exception& e) {
        return error_response(ApiError{500, "InternalError", e.what(), std::nullopt});
    }
}

Response Service::dispatch(const Request& request) const {
    const auto& path = request.path;

    if (request.method == "GET") {
        if (path == "/API/Area/") {
            return json_response(200, store_.read([](const StoreSnapshot& s) { return to_json_array(s.areas()); }));
        }
        if (path == "/API/Pub/") {
            return json_response(200, store_.read([](const StoreSnapshot& s) { return to_json_array(s.publications()); }));
        }
        if (path == "/API/Indicator/") {
            return json_response(200, store_.read([](const StoreSnapshot& s) { return to_json_array(s.indicators()); }));
        }
        if (path == "/API/Obs/") {
            return json_response(200, store_.read([](const StoreSnapshot& s) { return to_json_array(s.observations()); }));
        }
        if (path == "/API/VLM/") {
            return json_response(200, store_.read([](const StoreSnapshot& s) { return to_json_array(s.vlms()); }));
        }
        constexpr std::string_view download_prefix = "/API/Download/";
        if (path.rfind(download_prefix, 0) == 0) {
            return download(path.substr(download_prefix.size()), request);
        }
        throw not_found("no route for GET " + path);
    }

    if (request.method != "POST") {
        throw not_found("no route for " + request.method + " " + path);
    }

    if (path == "/API/GetName/") {
        const auto body = parse_body(request.body);
        const auto kind = string_field(body, "kind");
        const auto id = integer_field(body, "id");
        NamedKind named;
        if (kind == "area") {
            named = NamedKind::Area;
        } else if (kind == "publication") {
            named = NamedKind::Publication;
        } else {
            throw bad_request("InvalidKind", "kind must be \"area\" or \"publication\"", "kind");
        }
        return json_response(200, json{{"name", store_.get_name(named, id)}});
    }
    if (path == "/API/GetObservations/") {
        const auto body = parse_body(request.body);
        const auto filter = parse_filter(string_field(body, "filter"));
        const auto id = integer_field(body, "id");
        return json_response(200, to_json_array(store_.observations_by(filter, id)));
    }
    if (path == "/API/GetChart/") {
        const auto body = parse_body(request.body);
        std::vector<AreaId> ids;
        bool all = true;
        if (auto it = body.find("area_ids"); it != body.end() && !it->is_null()) {
            if (!it->is_array()) {
                throw bad_request("InvalidField", "area_ids must be an array", "area_ids");
            }
            for (const auto& v : *it) ids.push_back(AreaId{integer_value(v, "area_ids")});
            all = ids.empty();
        }
        auto series = store_.read([&](const StoreSnapshot& s) {
            return all ? all_areas_chart(s) : build_chart(s, ids);
        });
        return json_response(200, to_json_array(series));
    }
    if (path == "/API/AddArea/") {
        const auto body = parse_body(request.body);
        const auto id = store_.add_area(string_field(body, "name"));
        return json_response(201, json{{"id", id.value}});
    }
    if (path == "/API/AddInd/") {
        const auto body = parse_body(request.body);
        const auto id = store_.add_indicator(string_field(body, "name"));
        return json_response(201, json{{"id", id.value}});
    }
    if (path == "/API/AddPub/") {
        const auto body = parse_body(request.body);
        const auto title = string_field(body, "title");
        const auto authors = string_field(body, "authors");
        const auto year = integer_field(body, "year");
        if (year < kMinPublicationYear || year > kMaxPublicationYear) {
            throw DataError(Errc::YearOutOfRange, "year",
                            "publication year must be between 1500 and 2200");
        }
        const auto id = store_.add_publication(title, authors, static_cast<int>(year));
        return json_response(201, json{{"id", id.value}});
    }
    if (path == "/API/AddObs/") {
        const auto body = parse_body(request.body);
        const auto payload = validate_observation(parse_observation_draft(body));
        const auto id = store_.add_observation(payload);
        return json_response(201, json{{"id", id.value}});
    }
    if (path == "/API/AddVLM/") {
        const auto body = parse_body(request.body);
        const auto payload = validate_vlm(parse_vlm_draft(body));
        const auto id = store_.add_vlm(payload);
        return json_response(201, json{{"id", id.value}});
    }
    throw not_found("no route for POST " + path);
}

Response Service::download(const std::string& kind, const Request& request) const {
    if (kind == "areas") {
        return csv_response(store_.read([](const StoreSnapshot& s) { return entities_to_csv(s.areas()); }),
                            "areas.csv");
    }
    if (kind == "publications") {
        return csv_response(
            store_.read([](const StoreSnapshot& s) { return entities_to_csv(s.publications()); }),
            "publications.csv");
    }
    if (kind == "indicators") {
        return csv_response(
            store_.read([](const StoreSnapshot& s) { return entities_to_csv(s.indicators()); }),
            "indicators.csv");
    }
    if (kind == "vlm") {
        return csv_response(store_.read([](const StoreSnapshot& s) { return entities_to_csv(s.vlms()); }),
                            "vlm.csv");
    }
    if (kind != "observations") throw not_found("no download named '" + kind + "'");

    std::optional<std::pair<ObservationFilter, std::int64_t>> filter;
    auto f = request.query.find("filter");
    if (f != request.query.end()) {
        const auto which = parse_filter(f->second);
        auto i = request.query.find("id");
        std::int64_t id = 0;
        if (i == request.query.end()) {
            throw bad_request("InvalidField", "id is required with filter", "id");
        }
        const auto& raw = i->second;
        auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), id);
        if (ec != std::errc{} || ptr != raw.data() + raw.size()) {
            throw bad_request("InvalidField", "id must be an integer", "id");
        }
        filter = std::pair{which, id};
    }

    auto doc = store_.read([&](const StoreSnapshot& s) {
        const auto rows =
            filter ? s.observations_by(filter->first, filter->second) : s.observations();
        return observations_to_csv(rows, [&s](IndicatorId id) -> std::optional<std::string> {
            if (const auto* ind = s.find(id)) return ind->name;
            return std::nullopt;
        });
    });
    return csv_response(doc, "observations.csv");
}

}  // namespace sealevel::api
