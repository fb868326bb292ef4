#pragma once

#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "sealevel/chart.hpp"
#include "sealevel/domain.hpp"
#include "sealevel/store.hpp"

namespace sealevel::api {

struct Request {
    std::string method;  // "GET" or "POST"
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
};

struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
    std::map<std::string, std::string> headers;
};

/// Error body: {"code", "message"} plus "field" when one input is at fault.
struct ApiError {
    int http_status = 400;
    std::string code;
    std::string message;
    std::optional<std::string> field;

    nlohmann::json to_json() const;
};

ApiError from_data_error(const DataError& e);

// Wire shapes shared by the handlers and the contract tests.
nlohmann::json to_json(const Area& a);
nlohmann::json to_json(const Publication& p);
nlohmann::json to_json(const Indicator& i);
nlohmann::json to_json(const Observation& o);
nlohmann::json to_json(const VerticalLandMovement& v);
nlohmann::json to_json(const ChartSeries& s);

template <typename T>
nlohmann::json to_json_array(const std::vector<T>& rows) {
    auto out = nlohmann::json::array();
    for (const auto& r : rows) out.push_back(to_json(r));
    return out;
}

/// Parses an AddObs body into a draft. Throws ApiError for missing or
/// mistyped fields; range checks are left to validate_observation.
ObservationDraft parse_observation_draft(const nlohmann::json& body);
VlmDraft parse_vlm_draft(const nlohmann::json& body);

/// The REST surface. Stateless apart from the store reference, so one
/// instance may serve any number of concurrent requests.
///
///   GET  /API/Area/  /API/Pub/  /API/Indicator/  /API/Obs/  /API/VLM/
///   POST /API/GetName/  /API/GetObservations/  /API/GetChart/
///   POST /API/AddArea/  /API/AddPub/  /API/AddInd/  /API/AddObs/  /API/AddVLM/
///   GET  /API/Download/{areas|publications|indicators|observations|vlm}
class Service {
public:
    explicit Service(Store& store) : store_(store) {}

    Response handle(const Request& request) const;

private:
    Response dispatch(const Request& request) const;
    Response download(const std::string& kind, const Request& request) const;

    Store& store_;
};

}  // namespace sealevel::api
