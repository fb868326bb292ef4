// Serves the sea-level index-point API (and optionally the web UI) over HTTP.
//
//   sealevel-server --data rsl.store --port 8080 --static-dir webui/dist
//
// Every flag can also be given through the environment: SEALEVEL_HOST,
// SEALEVEL_PORT, SEALEVEL_DATA, SEALEVEL_STATIC_DIR. Flags win.

#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>

#include "sealevel/api.hpp"
#include "sealevel/http_server.hpp"
#include "sealevel/store.hpp"

namespace {
httplib::Server* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sea-level index point compilation service"};

    std::string host = "0.0.0.0";
    int port = 8080;
    std::string data = "sealevel.store";
    std::string static_dir;

    app.add_option("--host", host, "Address to bind")->envname("SEALEVEL_HOST")->capture_default_str();
    app.add_option("--port", port, "TCP port")
        ->envname("SEALEVEL_PORT")
        ->check(CLI::Range(0, 65535))
        ->capture_default_str();
    app.add_option("--data", data, "Store journal file (created if missing)")
        ->envname("SEALEVEL_DATA")
        ->capture_default_str();
    app.add_option("--static-dir", static_dir, "Directory of web UI assets served at /")
        ->envname("SEALEVEL_STATIC_DIR")
        ->check(CLI::ExistingDirectory);

    CLI11_PARSE(app, argc, argv);

    std::optional<sealevel::Store> store;
    try {
        store.emplace(data);
    } catch (const sealevel::StorageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    sealevel::api::Service service(*store);
    httplib::Server server;
    std::optional<std::filesystem::path> assets;
    if (!static_dir.empty()) assets = static_dir;
    sealevel::api::bind_routes(server, service, assets);
    server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
        std::cerr << req.method << " " << req.path << " " << res.status << "\n";
    });

    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    std::cerr << "serving " << data << " on " << host << ":" << port << "\n";
    if (!server.listen(host, port)) {
        std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
        return 1;
    }
    return 0;
}
