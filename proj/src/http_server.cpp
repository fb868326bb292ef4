#include "sealevel/http_server.hpp"

#include <httplib.h>

namespace sealevel::api {

namespace {

Request from_httplib(const httplib::Request& req) {
    Request out;
    out.method = req.method;
    out.path = req.path;
    out.body = req.body;
    for (const auto& [key, value] : req.params) out.query.emplace(key, value);
    return out;
}

void to_httplib(const Response& in, httplib::Response& res) {
    res.status = in.status;
    for (const auto& [key, value] : in.headers) res.set_header(key, value);
    res.set_content(in.body, in.content_type);
}

}  // namespace

void bind_routes(httplib::Server& server, const Service& service,
                 const std::optional<std::filesystem::path>& static_dir) {
    auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
        to_httplib(service.handle(from_httplib(req)), res);
    };
    server.Get(R"(/API/.*)", forward);
    server.Post(R"(/API/.*)", forward);

    if (static_dir) server.set_mount_point("/", static_dir->string());
}

}  // namespace sealevel::api
