#include "hokcm/annotation_server.hpp"

#include <httplib.h>
#include <json.hpp>

#include "hokcm/errors.hpp"

namespace hokcm {

namespace {

using nlohmann::json;

void send_error(httplib::Response& res, int status, const std::string& message,
                const std::string& field = {}) {
  json j{{"error", message}};
  if (!field.empty()) j["field"] = field;
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

// Booleans are already binarized agreement labels.
std::vector<AgreementLabel> read_labels(const json& arr, const char* field) {
  if (!arr.is_array()) throw ValidationError(field, "expected an array");
  std::vector<AgreementLabel> out;
  for (const auto& v : arr) {
    if (v.is_boolean()) {
      out.push_back(v.get<bool>() ? AgreementLabel::TotallyAgree : AgreementLabel::Disagree);
    } else if (v.is_string()) {
      const auto label = parse_agreement_label(v.get<std::string>());
      if (!label) {
        throw ValidationError(field, "unknown label '" + v.get<std::string>() + "'");
      }
      out.push_back(*label);
    } else {
      throw ValidationError(field, "labels must be booleans or label names");
    }
  }
  return out;
}

}  // namespace

struct AnnotationServer::Impl {
  explicit Impl(AnnotationStore& s) : store(s) {}

  AnnotationStore& store;
  httplib::Server server;
};

AnnotationServer::AnnotationServer(AnnotationStore& store)
    : impl_(std::make_unique<Impl>(store)) {
  auto& srv = impl_->server;
  AnnotationStore& st = store;

  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  srv.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });

  srv.Get("/api/tasks/next", [&st](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("annotator")) {
      send_error(res, 400, "missing annotator parameter", "annotator");
      return;
    }
    try {
      const auto task = st.next_task(req.get_param_value("annotator"));
      if (!task) {
        res.status = 204;
        return;
      }
      json j{{"task_id", task->task_id}, {"phase", task->phase},
             {"sentence", task->sentence}};
      res.set_content(j.dump(), "application/json");
    } catch (const ValidationError& e) {
      send_error(res, 404, e.what(), e.field());
    }
  });

  srv.Post("/api/scores", [&st](const httplib::Request& req, httplib::Response& res) {
    try {
      const auto outcome = st.record_score(record_from_json(req.body));
      res.status = 201;
      res.set_content(json{{"accepted", true}, {"replaced", outcome.replaced}}.dump(),
                      "application/json");
    } catch (const ValidationError& e) {
      send_error(res, 400, e.what(), e.field());
    } catch (const Error& e) {
      send_error(res, 500, e.what());
    }
  });

  srv.Get("/api/stats", [&st](const httplib::Request&, httplib::Response& res) {
    res.set_content(st.stats().to_json(), "application/json");
  });

  srv.Get("/api/export", [&st](const httplib::Request&, httplib::Response& res) {
    res.set_content(st.export_jsonl(), "application/x-ndjson");
  });

  srv.Post("/api/kappa", [](const httplib::Request& req, httplib::Response& res) {
    try {
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::exception& e) {
        throw ValidationError("body", std::string("invalid JSON: ") + e.what());
      }
      if (!body.is_object() || !body.contains("a") || !body.contains("b")) {
        throw ValidationError("body", "expected {\"a\": [...], \"b\": [...]}");
      }
      const auto a = read_labels(body.at("a"), "a");
      const auto b = read_labels(body.at("b"), "b");
      const double k = cohen_kappa(std::span<const AgreementLabel>(a),
                                   std::span<const AgreementLabel>(b));
      res.set_content(json{{"kappa", k}}.dump(), "application/json");
    } catch (const ValidationError& e) {
      send_error(res, 400, e.what(), e.field());
    } catch (const DomainError& e) {
      send_error(res, 422, e.what());
    }
  });
}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool AnnotationServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void AnnotationServer::stop() {
  if (impl_) impl_->server.stop();
}

void AnnotationServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace hokcm
