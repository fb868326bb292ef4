#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "sealevel/http_server.hpp"

using namespace sealevel;
using nlohmann::json;

TEST_CASE("routes are reachable over HTTP") {
    const auto assets = std::filesystem::temp_directory_path() / "sealevel-http-assets";
    std::filesystem::create_directories(assets);
    {
        std::ofstream(assets / "index.html") << "<html>ui</html>";
    }

    Store store;
    api::Service service(store);
    httplib::Server server;
    api::bind_routes(server, service, assets);
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread loop([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);

    auto res = client.Post("/API/AddArea/", R"({"name":"Algarve"})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 201);
    CHECK(json::parse(res->body) == json{{"id", 1}});

    res = client.Get("/API/Area/");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("Content-Type") == "application/json");
    CHECK(json::parse(res->body) == json::array({{{"id", 1}, {"name", "Algarve"}}}));

    res = client.Post("/API/AddArea/", "{oops", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(json::parse(res->body)["code"] == "MalformedBody");

    res = client.Get("/API/Download/areas");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body == "ID,Name\r\n1,Algarve\r\n");
    CHECK(res->get_header_value("Content-Disposition") == "attachment; filename=\"areas.csv\"");

    res = client.Get("/API/Download/observations?filter=area&id=1");
    REQUIRE(res);
    CHECK(res->status == 200);

    res = client.Get("/API/Download/foo");
    REQUIRE(res);
    CHECK(res->status == 404);

    res = client.Get("/index.html");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body == "<html>ui</html>");

    server.stop();
    loop.join();
    std::filesystem::remove_all(assets);
}
