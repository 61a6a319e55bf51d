#pragma once

// Eigen must come before httplib: a system header pulled in by httplib
// breaks Eigen's product kernels otherwise.
#include "graphtune/session.hpp"

#include <httplib.h>

namespace graphtune {

/// Routes every GET and POST on `srv` to the session service.
inline void bind_http(httplib::Server& srv, SessionService& svc) {
  auto forward = [&svc](const httplib::Request& req, httplib::Response& res) {
    const auto r = svc.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(r.body.dump(), "application/json");
  };
  srv.Get(R"(/.*)", forward);
  srv.Post(R"(/.*)", forward);
  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

}  // namespace graphtune
