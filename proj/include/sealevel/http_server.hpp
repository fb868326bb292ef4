#pragma once

#include <filesystem>
#include <optional>

#include "sealevel/api.hpp"

namespace httplib {
class Server;
}

namespace sealevel::api {

/// Routes every /API/ request on `server` to `service` and, when given,
/// serves `static_dir` at "/". The service must outlive the server.
void bind_routes(httplib::Server& server, const Service& service,
                 const std::optional<std::filesystem::path>& static_dir = std::nullopt);

}  // namespace sealevel::api
