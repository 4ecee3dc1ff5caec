#pragma once

// JSON-over-HTTP front of the judgment store. Payloads carry document ids, labels
// and progress only; run counts, rank sums and version names stay server-side.

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "poolbench/assess/store.hpp"
#include "poolbench/error.hpp"

namespace poolbench::assess {

struct ServerConfig {
  std::filesystem::path docs_dir;    // <docid>.html files
  std::filesystem::path static_dir;  // optional UI bundle mounted at /
};

namespace detail {

inline void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

/// Runs `fn`, mapping store exceptions to HTTP statuses.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const NotFound& e) {
    send_error(res, 404, e.what());
  } catch (const Conflict& e) {
    send_error(res, 409, e.what());
  } catch (const BadRequest& e) {
    send_error(res, 400, e.what());
  } catch (const nlohmann::json::exception& e) {
    send_error(res, 400, std::string("bad JSON body: ") + e.what());
  } catch (const DataError& e) {
    send_error(res, 500, e.what());
  }
}

inline bool safe_name(const std::string& s) {
  return !s.empty() && s.find('/') == std::string::npos && s.find('\\') == std::string::npos && s != "." &&
         s != ".." && s.find('\0') == std::string::npos;
}

inline nlohmann::json label_json(const std::optional<RawLabel>& l) {
  return l ? nlohmann::json(std::string(to_string(*l))) : nlohmann::json(nullptr);
}

}  // namespace detail

/// Registers the API routes on `server`. `store` must outlive it.
inline void register_routes(httplib::Server& server, Store& store, const ServerConfig& config) {
  using detail::guarded;
  using detail::send_error;
  using detail::send_json;
  using nlohmann::json;

  server.Get("/api/assignments/:assessor", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto& assessor = req.path_params.at("assessor");
      json topics = json::array();
      for (const auto& p : store.progress(assessor)) {
        json t = {{"topic", p.topic}, {"judged", p.judged}, {"total", p.total}};
        if (auto info = store.topic_info(p.topic)) t["content"] = info->content;
        topics.push_back(std::move(t));
      }
      send_json(res, 200, {{"assessor", assessor}, {"topics", topics}});
    });
  });

  server.Get("/api/pool/:assessor/:topic", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto& assessor = req.path_params.at("assessor");
      const auto& topic = req.path_params.at("topic");
      const auto view = store.get_pool(assessor, topic);
      json docs = json::array();
      for (const auto& d : view.documents) docs.push_back({{"doc", d.doc}, {"label", detail::label_json(d.label)}});
      json body = {{"topic", topic}, {"documents", docs}, {"judged", view.judged}, {"total", view.documents.size()}};
      if (auto info = store.topic_info(topic)) {
        body["content"] = info->content;
        body["description"] = info->description;
      }
      send_json(res, 200, body);
    });
  });

  server.Get("/api/doc/:topic/:doc", [&store, config](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto& topic = req.path_params.at("topic");
      const auto& doc = req.path_params.at("doc");
      if (!detail::safe_name(doc)) throw BadRequest("invalid document id");
      if (req.has_param("assessor")) store.view_doc(req.get_param_value("assessor"), topic, doc);
      const auto path = config.docs_dir / (doc + ".html");
      std::ifstream in(path, std::ios::binary);
      if (config.docs_dir.empty() || !in) throw NotFound("no content for document " + doc);
      std::ostringstream ss;
      ss << in.rdbuf();
      res.status = 200;
      res.set_content(ss.str(), "text/html; charset=utf-8");
    });
  });

  server.Post("/api/judgment", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = json::parse(req.body);
      for (const char* field : {"assessor", "topic", "doc", "label"}) {
        if (!body.contains(field) || !body[field].is_string()) {
          throw BadRequest(std::string("judgment needs string field '") + field + "'");
        }
      }
      const auto ack = store.post_judgment(body["assessor"].get<std::string>(), body["topic"].get<std::string>(),
                                           body["doc"].get<std::string>(), body["label"].get<std::string>());
      send_json(res, 200,
                {{"seq", ack.seq},
                 {"next", ack.next ? json(*ack.next) : json(nullptr)},
                 {"complete", ack.complete},
                 {"correction", ack.correction}});
    });
  });

  server.Get("/api/progress/:assessor", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto& assessor = req.path_params.at("assessor");
      json topics = json::array();
      std::size_t judged = 0, total = 0;
      for (const auto& p : store.progress(assessor)) {
        topics.push_back({{"topic", p.topic}, {"judged", p.judged}, {"total", p.total}, {"complete", p.judged == p.total}});
        judged += p.judged;
        total += p.total;
      }
      send_json(res, 200, {{"assessor", assessor}, {"judged", judged}, {"total", total}, {"topics", topics}});
    });
  });

  server.Get("/api/export/qrels/:version", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      res.set_content(store.export_qrels_text(req.path_params.at("version")), "text/plain; charset=utf-8");
      res.status = 200;
    });
  });

  server.Get("/api/export/log", [&store](const httplib::Request&, httplib::Response& res) {
    res.set_content(store.export_log(), "application/x-ndjson");
    res.status = 200;
  });

  if (!config.static_dir.empty()) server.set_mount_point("/", config.static_dir.string());
}

}  // namespace poolbench::assess
