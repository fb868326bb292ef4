#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "sealevel/api.hpp"
#include "sealevel/export_csv.hpp"

using namespace sealevel;
using nlohmann::json;

namespace {

struct Fixture {
    Store store;
    api::Service service{store};

    api::Response get(const std::string& path, std::map<std::string, std::string> query = {}) {
        return service.handle({"GET", path, std::move(query), ""});
    }
    api::Response post(const std::string& path, const std::string& body) {
        return service.handle({"POST", path, {}, body});
    }
    api::Response post(const std::string& path, const json& body) { return post(path, body.dump()); }
    api::Response post(const std::string& path, const char* body) { return post(path, std::string(body)); }

    void seed() {
        REQUIRE(post("/API/AddArea/", json{{"name", "Algarve"}}).status == 201);
        REQUIRE(post("/API/AddPub/", json{{"title", "Holocene RSL of X"}, {"authors", "A. Author"}, {"year", 2015}})
                    .status == 201);
        REQUIRE(post("/API/AddInd/", json{{"name", "marsh forams"}}).status == 201);
    }
};

json obs_body() {
    return {{"latitude", 38.7},
            {"longitude", -9.1},
            {"height", 1.2},
            {"error", 0.3},
            {"area_id", 1},
            {"publication_id", 1},
            {"indicator_id", 1},
            {"age_scale", "BP"},
            {"age", {{"kind", "absolute"}, {"value", 2500}}}};
}

json body_of(const api::Response& r) { return json::parse(r.body); }

std::set<std::string> keys(const json& j) {
    std::set<std::string> out;
    for (auto it = j.begin(); it != j.end(); ++it) out.insert(it.key());
    return out;
}

void check_error(const api::Response& r, int status, const std::string& code,
                 const std::string& field = "") {
    CHECK(r.status == status);
    const auto b = body_of(r);
    CHECK(b.at("code") == code);
    CHECK(b.at("message").is_string());
    if (!field.empty()) CHECK(b.at("field") == field);
}

}  // namespace

TEST_CASE("list endpoints on an empty store") {
    Fixture f;
    for (const char* p : {"/API/Area/", "/API/Pub/", "/API/Indicator/", "/API/Obs/", "/API/VLM/"}) {
        const auto r = f.get(p);
        CHECK(r.status == 200);
        CHECK(r.content_type == "application/json");
        CHECK(r.body == "[]");
    }
}

TEST_CASE("create endpoints and their errors") {
    Fixture f;
    auto r = f.post("/API/AddArea/", json{{"name", "Algarve"}});
    CHECK(r.status == 201);
    CHECK(body_of(r) == json{{"id", 1}});
    check_error(f.post("/API/AddArea/", json{{"name", "ALGARVE"}}), 409, "DuplicateName", "name");
    check_error(f.post("/API/AddArea/", json{{"name", ""}}), 400, "EmptyName", "name");
    check_error(f.post("/API/AddArea/", json{{"name", 5}}), 400, "InvalidField", "name");
    check_error(f.post("/API/AddArea/", json::object()), 400, "InvalidField", "name");

    CHECK(f.post("/API/AddPub/", json{{"title", "T"}, {"authors", "A"}, {"year", 2015}}).status == 201);
    check_error(f.post("/API/AddPub/", json{{"title", "T"}, {"authors", "A"}, {"year", 15000}}), 400,
                "YearOutOfRange", "year");
    check_error(f.post("/API/AddPub/", json{{"title", "T"}, {"authors", "A"}, {"year", 2015.5}}), 400,
                "InvalidField", "year");

    CHECK(f.post("/API/AddInd/", json{{"name", "forams"}}).status == 201);
    check_error(f.post("/API/AddInd/", json{{"name", "forams"}}), 409, "DuplicateName");

    const auto areas = body_of(f.get("/API/Area/"));
    REQUIRE(areas.size() == 1);
    CHECK(keys(areas[0]) == std::set<std::string>{"id", "name"});
    CHECK(keys(body_of(f.get("/API/Pub/"))[0]) ==
          std::set<std::string>{"id", "title", "authors", "year"});
}

TEST_CASE("AddObs converts BP and validates") {
    Fixture f;
    f.seed();
    auto r = f.post("/API/AddObs/", obs_body());
    REQUIRE(r.status == 201);
    CHECK(body_of(r) == json{{"id", 1}});

    const auto obs = body_of(f.get("/API/Obs/"));
    REQUIRE(obs.size() == 1);
    CHECK(keys(obs[0]) == std::set<std::string>{"id", "latitude", "longitude", "height", "error",
                                                "area_id", "publication_id", "indicator_id", "age"});
    CHECK(obs[0]["age"] == json{{"kind", "absolute"}, {"value", 1950.0 - 2500.0}});

    auto rel = obs_body();
    rel["age"] = {{"kind", "relative"}, {"lower", 3000}, {"upper", 2000}};
    REQUIRE(f.post("/API/AddObs/", rel).status == 201);
    CHECK(body_of(f.get("/API/Obs/"))[1]["age"] ==
          json{{"kind", "relative"}, {"lower", -1050.0}, {"upper", -50.0}});

    auto bad = obs_body();
    bad["latitude"] = 91;
    check_error(f.post("/API/AddObs/", bad), 400, "LatitudeOutOfRange", "latitude");
    bad = obs_body();
    bad["error"] = -0.1;
    check_error(f.post("/API/AddObs/", bad), 400, "NegativeError", "error");
    bad = obs_body();
    bad["area_id"] = 99;
    check_error(f.post("/API/AddObs/", bad), 404, "UnknownArea", "area_id");
    bad = obs_body();
    bad["publication_id"] = 99;
    check_error(f.post("/API/AddObs/", bad), 404, "UnknownPublication");
    bad = obs_body();
    bad["indicator_id"] = 99;
    check_error(f.post("/API/AddObs/", bad), 404, "UnknownIndicator");
    bad = obs_body();
    bad["age_scale"] = "CE";
    check_error(f.post("/API/AddObs/", bad), 400, "InvalidField", "age_scale");
    bad = obs_body();
    bad["age"] = {{"kind", "relative"}, {"lower", 1}};
    check_error(f.post("/API/AddObs/", bad), 400, "InvalidField", "age.upper");
    bad = obs_body();
    bad.erase("height");
    check_error(f.post("/API/AddObs/", bad), 400, "InvalidField", "height");

    CHECK(body_of(f.get("/API/Obs/")).size() == 2);
}

TEST_CASE("AddVLM") {
    Fixture f;
    f.seed();
    const json v = {{"latitude", 38.7}, {"longitude", -9.1}, {"age_start", -8000},
                    {"age_end", 1950},  {"velocity", 0.4},   {"area_id", 1}};
    CHECK(f.post("/API/AddVLM/", v).status == 201);
    const auto listed = body_of(f.get("/API/VLM/"));
    REQUIRE(listed.size() == 1);
    CHECK(listed[0] == json{{"id", 1}, {"latitude", 38.7}, {"longitude", -9.1}, {"age_start", -8000.0},
                            {"age_end", 1950.0}, {"velocity", 0.4}, {"area_id", 1}});

    auto inv = v;
    inv["age_start"] = 2000;
    check_error(f.post("/API/AddVLM/", inv), 400, "InvertedInterval");
    auto orphan = v;
    orphan["area_id"] = 5;
    check_error(f.post("/API/AddVLM/", orphan), 404, "UnknownArea");
}

TEST_CASE("GetName") {
    Fixture f;
    f.seed();
    auto r = f.post("/API/GetName/", json{{"kind", "area"}, {"id", 1}});
    CHECK(r.status == 200);
    CHECK(body_of(r) == json{{"name", "Algarve"}});
    CHECK(body_of(f.post("/API/GetName/", json{{"kind", "publication"}, {"id", 1}})) ==
          json{{"name", "Holocene RSL of X"}});
    check_error(f.post("/API/GetName/", json{{"kind", "area"}, {"id", 99}}), 404, "UnknownId");
    check_error(f.post("/API/GetName/", json{{"kind", "indicator"}, {"id", 1}}), 400, "InvalidKind", "kind");
}

TEST_CASE("GetObservations matches the store filter") {
    Fixture f;
    std::mt19937_64 rng(8);
    oracle::fill_random(f.store, rng, {3, 3, 2, 60, 0});
    for (const char* filter : {"area", "publication"}) {
        for (int id = 0; id <= 4; ++id) {
            const auto r = f.post("/API/GetObservations/", json{{"filter", filter}, {"id", id}});
            REQUIRE(r.status == 200);
            const auto expected = std::string(filter) == "area"
                                      ? oracle::scan_by_area(f.store.list_observations(), id)
                                      : oracle::scan_by_publication(f.store.list_observations(), id);
            CHECK(body_of(r) == api::to_json_array(expected));
        }
    }
    CHECK(f.post("/API/GetObservations/", json{{"filter", "area"}, {"id", 99}}).body == "[]");
    check_error(f.post("/API/GetObservations/", json{{"filter", "vlm"}, {"id", 1}}), 400, "InvalidFilter");
}

TEST_CASE("GetChart") {
    Fixture f;
    std::mt19937_64 rng(9);
    oracle::fill_random(f.store, rng, {4, 2, 2, 80, 0});

    const auto one = f.post("/API/GetChart/", json{{"area_ids", {1}}});
    REQUIRE(one.status == 200);
    const std::vector<AreaId> ids{AreaId{1}};
    const auto expected = f.store.read([&](const StoreSnapshot& s) { return build_chart(s, ids); });
    CHECK(body_of(one) == api::to_json_array(expected));
    const auto series = body_of(one)[0];
    CHECK(keys(series) == std::set<std::string>{"area_id", "area_name", "points"});
    CHECK(keys(series["points"][0]) ==
          std::set<std::string>{"x", "x_minus", "x_plus", "y", "y_err", "observation_id"});

    const auto all = f.store.read([](const StoreSnapshot& s) { return all_areas_chart(s); });
    CHECK(body_of(f.post("/API/GetChart/", "{}")) == api::to_json_array(all));
    CHECK(body_of(f.post("/API/GetChart/", json{{"area_ids", json::array()}})) == api::to_json_array(all));
    check_error(f.post("/API/GetChart/", json{{"area_ids", "x"}}), 400, "InvalidField", "area_ids");
    check_error(f.post("/API/GetChart/", json{{"area_ids", {1, "two"}}}), 400, "InvalidField");
}

TEST_CASE("Download routes") {
    Fixture f;
    f.seed();
    REQUIRE(f.post("/API/AddObs/", obs_body()).status == 201);
    REQUIRE(f.post("/API/AddArea/", json{{"name", "Minho"}}).status == 201);

    auto r = f.get("/API/Download/observations");
    CHECK(r.status == 200);
    CHECK(r.content_type == "text/csv; charset=utf-8");
    CHECK(r.headers["Content-Disposition"] == "attachment; filename=\"observations.csv\"");
    CHECK(r.body ==
          "ID,Coordinates,Height,Age,Indicator,Error\r\n"
          "1,\"38.700000,-9.100000\",1.2,-550,marsh forams,0.3\r\n");

    CHECK(f.get("/API/Download/observations", {{"filter", "area"}, {"id", "2"}}).body ==
          "ID,Coordinates,Height,Age,Indicator,Error\r\n");
    CHECK(f.get("/API/Download/observations", {{"filter", "publication"}, {"id", "1"}}).body == r.body);
    check_error(f.get("/API/Download/observations", {{"filter", "area"}}), 400, "InvalidField", "id");
    check_error(f.get("/API/Download/observations", {{"filter", "area"}, {"id", "x1"}}), 400,
                "InvalidField", "id");

    CHECK(f.get("/API/Download/areas").body == "ID,Name\r\n1,Algarve\r\n2,Minho\r\n");
    CHECK(f.get("/API/Download/publications").status == 200);
    CHECK(f.get("/API/Download/indicators").body == "ID,Name\r\n1,marsh forams\r\n");
    CHECK(f.get("/API/Download/vlm").headers["Content-Disposition"] == "attachment; filename=\"vlm.csv\"");
    check_error(f.get("/API/Download/foo"), 404, "NotFound");
}

TEST_CASE("malformed bodies leave the store unchanged") {
    Fixture f;
    f.seed();
    REQUIRE(f.post("/API/AddObs/", obs_body()).status == 201);
    const auto before = f.store.snapshot();
    for (const char* path : {"/API/AddArea/", "/API/AddPub/", "/API/AddInd/", "/API/AddObs/", "/API/AddVLM/",
                             "/API/GetName/", "/API/GetObservations/", "/API/GetChart/"}) {
        for (const char* body : {"", "{", "not json", "{\"name\": }", "[1,2]", "\"str\"", "null"}) {
            const auto r = f.post(path, std::string(body));
            CHECK(r.status == 400);
            CHECK(body_of(r).at("code") == "MalformedBody");
        }
    }
    CHECK(f.store.snapshot() == before);
}

TEST_CASE("unknown routes and methods") {
    Fixture f;
    check_error(f.get("/API/Area"), 404, "NotFound");
    check_error(f.get("/API/AddArea/"), 404, "NotFound");
    check_error(f.post("/API/Area/", "{}"), 404, "NotFound");
    check_error(f.service.handle({"DELETE", "/API/Area/", {}, ""}), 404, "NotFound");
}

TEST_CASE("reads are byte-identical on repeat") {
    Fixture f;
    std::mt19937_64 rng(10);
    oracle::fill_random(f.store, rng, {3, 3, 2, 50, 5});
    for (const char* p : {"/API/Area/", "/API/Pub/", "/API/Indicator/", "/API/Obs/", "/API/VLM/",
                          "/API/Download/observations", "/API/Download/vlm"}) {
        CHECK(f.get(p).body == f.get(p).body);
    }
    CHECK(f.post("/API/GetChart/", "{}").body == f.post("/API/GetChart/", "{}").body);
}
