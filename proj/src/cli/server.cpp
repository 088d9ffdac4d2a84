#include "maintminer/server.hpp"

#include <filesystem>
#include <map>

#include "json.hpp"
#include "maintminer/analytics.hpp"
#include "maintminer/strings.hpp"

#include "httplib.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace maintminer::cli {

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json error_body(const std::string& message, const std::string& path) { return {{"error", message}, {"path", path}}; }

}  // namespace

struct BundleServer::Impl {
  std::string bundle_text;
  json bundle;
  std::map<std::string, std::string> datasets;
  httplib::Server server;
  bool bound = false;
};

BundleServer::BundleServer(const std::string& bundle_dir) : impl_(std::make_unique<Impl>()) {
  const auto path = fs::path(bundle_dir) / "bundle.json";
  if (!fs::is_regular_file(path)) throw StartupError("bundle not found: " + path.string());
  impl_->bundle_text = read_file(path.string());
  try {
    impl_->bundle = json::parse(impl_->bundle_text);
  } catch (const json::exception& e) {
    throw StartupError(path.string() + ": " + e.what());
  }
  const auto version = impl_->bundle.value("schema_version", -1);
  if (version != analytics::kBundleSchemaVersion)
    throw StartupError("unsupported bundle schema_version " + std::to_string(version));
  const auto datasets = fs::path(bundle_dir) / "datasets";
  if (fs::is_directory(datasets))
    for (const auto& entry : fs::directory_iterator(datasets))
      if (entry.is_regular_file() && entry.path().extension() == ".csv")
        impl_->datasets[entry.path().filename().string()] = read_file(entry.path().string());

  auto& s = impl_->server;
  s.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  Impl* impl = impl_.get();
  s.Get("/api/bundle", [impl](const httplib::Request&, httplib::Response& res) {
    res.set_content(impl->bundle_text, "application/json");
  });
  s.Get("/api/projects", [impl](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& p : impl->bundle.at("projects")) out.push_back({{"project", p.at("project")}, {"totals", p.at("totals")}});
    send_json(res, 200, out);
  });
  s.Get("/api/homogeneity", [impl](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, impl->bundle.at("homogeneity"));
  });
  s.Get("/api/profiles", [impl](const httplib::Request& req, httplib::Response& res) {
    int window = impl->bundle.value("window_days", 28);
    if (req.has_param("window")) {
      try {
        std::size_t used = 0;
        const auto text = req.get_param_value("window");
        window = std::stoi(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
      } catch (const std::exception&) {
        return send_json(res, 400, error_body("window must be an integer", req.path));
      }
    }
    if (window <= 0) return send_json(res, 400, error_body("window must be positive", req.path));
    try {
      send_json(res, 200,
                analytics::bundle_profiles(impl->bundle, req.get_param_value("project"), window,
                                           req.get_param_value("developer")));
    } catch (const ArgError& e) {
      send_json(res, 404, error_body(e.what(), req.path));
    }
  });
  s.Get(R"(/api/datasets/([A-Za-z0-9_.-]+))", [impl](const httplib::Request& req, httplib::Response& res) {
    const auto it = impl->datasets.find(req.matches[1].str());
    if (it == impl->datasets.end()) return send_json(res, 404, error_body("no such dataset", req.path));
    res.set_header("Content-Disposition", "attachment; filename=\"" + it->first + "\"");
    res.set_content(it->second, "text/csv");
  });
  auto refuse = [](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 405, error_body("read-only server", req.path));
  };
  s.Post(".*", refuse);
  s.Put(".*", refuse);
  s.Patch(".*", refuse);
  s.Delete(".*", refuse);
  s.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.status == 404 && res.body.empty()) send_json(res, 404, error_body("not found", req.path));
  });
  s.set_exception_handler([](const httplib::Request& req, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send_json(res, 500, error_body(what, req.path));
  });
}

BundleServer::~BundleServer() { stop(); }

int BundleServer::bind(const std::string& host, int port) {
  auto& s = impl_->server;
  int bound = port;
  if (port == 0)
    bound = s.bind_to_any_port(host);
  else if (!s.bind_to_port(host, port))
    bound = -1;
  if (bound < 0) throw BindError("cannot bind " + host + ":" + std::to_string(port));
  impl_->bound = true;
  return bound;
}

void BundleServer::listen() {
  if (!impl_->bound) throw ArgError("listen() before bind()");
  impl_->server.listen_after_bind();
}

void BundleServer::stop() { impl_->server.stop(); }

void BundleServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace maintminer::cli
