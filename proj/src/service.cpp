#include "confik/service.hpp"

#include "confik/error.hpp"
#include "confik/solver.hpp"

#include <httplib.h>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>

namespace confik {

using nlohmann::ordered_json;

namespace {

ordered_json tree_node(const FeatureModel &fm, FeatureId f) {
  const Feature &feature = fm.features()[f];
  ordered_json node;
  node["name"] = feature.name;
  node["kind"] = to_string(feature.kind);
  if (feature.group) {
    node["group"] = to_string(fm.groups()[*feature.group].kind);
    node["group_id"] = *feature.group;
  } else {
    node["group"] = nullptr;
    node["group_id"] = nullptr;
  }
  ordered_json children = ordered_json::array();
  for (const ChildSlot &slot : feature.slots) {
    if (!slot.is_group) {
      children.push_back(tree_node(fm, slot.index));
      continue;
    }
    for (FeatureId m : fm.groups()[slot.index].members)
      children.push_back(tree_node(fm, m));
  }
  node["children"] = std::move(children);
  return node;
}

Response error(int status, std::string_view kind, const std::string &message) {
  return {status, ordered_json{{"error", kind}, {"message", message}}};
}

Response error(int status, const Error &e) { return error(status, to_string(e.kind()), e.what()); }

int status_for(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::AlreadyAssigned:
  case ErrorKind::InconsistentDecision:
  case ErrorKind::NotAUserDecision: return 409;
  case ErrorKind::UnsatModel:
  case ErrorKind::UnsatInput: return 422;
  case ErrorKind::UnknownVariable:
  case ErrorKind::SyntaxError:
  case ErrorKind::SemanticError:
  case ErrorKind::Usage: return 400;
  default: return 500;
  }
}

} // namespace

ordered_json session_document(const std::string &id, const std::string &model_name,
                              const FeatureModel &fm, const Session &s) {
  ClauseSet now = s.current();
  Solver solver(now);
  ordered_json vars = ordered_json::array();
  for (VarId v : s.user_vars()) {
    bool open = !s.is_assigned(v);
    std::vector<Literal> t{pos(v)}, f{neg(v)};
    vars.push_back(ordered_json{
        {"name", s.base().vars().name(v)},
        {"status", to_string(s.status(v))},
        {"highlighted", s.highlight().count(v) > 0},
        {"selectable_true", open && solver.solve(t).has_value()},
        {"selectable_false", open && solver.solve(f).has_value()},
    });
  }
  ordered_json doc;
  doc["id"] = id;
  doc["model_name"] = model_name;
  doc["complete"] = is_complete(s);
  doc["variables"] = std::move(vars);
  doc["tree"] = tree_node(fm, fm.root());
  return doc;
}

SessionService::SessionService(std::uint64_t id_seed) : rng_(id_seed) {}

void SessionService::set_default_model(std::string name, std::string text) {
  default_model_.emplace(std::move(name), std::move(text));
}

std::string SessionService::fresh_id() {
  std::lock_guard guard(rng_lock_);
  std::uint64_t hi = rng_.next();
  std::uint64_t lo = rng_.next();
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string &id) const {
  std::shared_lock guard(map_lock_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

Response SessionService::create(const std::string &body) {
  ordered_json request = ordered_json::parse(body, nullptr, false);
  if (request.is_discarded() || !request.is_object())
    return error(400, "MalformedBody", "expected a JSON object");
  std::string name, text;
  if (request.contains("model")) {
    if (!request["model"].is_string())
      return error(400, "MalformedBody", "\"model\" must be a string");
    text = request["model"].get<std::string>();
    name = "model";
  } else if (default_model_) {
    std::tie(name, text) = *default_model_;
  } else {
    return error(400, "MalformedBody", "missing \"model\"");
  }
  if (request.contains("name")) {
    if (!request["name"].is_string())
      return error(400, "MalformedBody", "\"name\" must be a string");
    name = request["name"].get<std::string>();
  }
  try {
    auto fm = std::make_shared<const FeatureModel>(parse_model(text));
    Session s = new_session(to_cnf(fm->vars(), translate(*fm)));
    std::string id = fresh_id();
    auto entry = std::make_shared<Entry>(name, fm, std::move(s));
    ordered_json doc = session_document(id, name, *fm, entry->session);
    std::unique_lock guard(map_lock_);
    sessions_.emplace(id, std::move(entry));
    return {201, std::move(doc)};
  } catch (const Error &e) {
    return error(status_for(e.kind()), e);
  }
}

Response SessionService::get(const std::string &id) {
  return mutate(id, [](const Entry &e) { return e.session; });
}

template <class Op> Response SessionService::mutate(const std::string &id, Op op) {
  std::shared_ptr<Entry> entry = find(id);
  if (!entry)
    return error(404, "UnknownSession", "no session '" + id + "'");
  std::lock_guard guard(entry->lock);
  try {
    entry->session = op(*entry);
    return {200, session_document(id, entry->name, *entry->model, entry->session)};
  } catch (const Error &e) {
    return error(status_for(e.kind()), e);
  }
}

Response SessionService::decide(const std::string &id, const std::string &body) {
  ordered_json request = ordered_json::parse(body, nullptr, false);
  if (request.is_discarded() || !request.is_object() || !request.contains("var") ||
      !request["var"].is_string() || !request.contains("value") || !request["value"].is_boolean())
    return error(400, "MalformedBody", "expected {\"var\": string, \"value\": boolean}");
  std::string var = request["var"].get<std::string>();
  bool value = request["value"].get<bool>();
  return mutate(id, [&](const Entry &e) {
    return apply_decision(e.session, e.session.base().vars().lookup(var), value);
  });
}

Response SessionService::undo(const std::string &id, const std::string &var) {
  return mutate(id, [&](const Entry &e) {
    return retract(e.session, e.session.base().vars().lookup(var));
  });
}

Response SessionService::shopping(const std::string &id) {
  return mutate(id, [](const Entry &e) { return shopping_principle(e.session); });
}

Response SessionService::complete(const std::string &id) {
  return mutate(id, [](const Entry &e) { return complete_blind(e.session); });
}

Response SessionService::default_model() const {
  if (!default_model_)
    return error(404, "NoDefaultModel", "the server was started without a model");
  return {200, ordered_json{{"name", default_model_->first}, {"model", default_model_->second}}};
}

ordered_json SessionService::snapshot() const {
  std::shared_lock guard(map_lock_);
  ordered_json out = ordered_json::array();
  for (const auto &[id, entry] : sessions_) {
    std::lock_guard entry_guard(entry->lock);
    out.push_back(ordered_json{
        {"document", session_document(id, entry->name, *entry->model, entry->session)},
        {"script", export_script(entry->session)},
    });
  }
  return out;
}

void SessionService::install(httplib::Server &server, const std::string &static_dir) {
  auto send = [](httplib::Response &res, const Response &r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.Post("/sessions", [this, send](const httplib::Request &req, httplib::Response &res) {
    send(res, create(req.body));
  });
  server.Get("/model", [this, send](const httplib::Request &, httplib::Response &res) {
    send(res, default_model());
  });
  server.Get("/sessions/:id", [this, send](const httplib::Request &req, httplib::Response &res) {
    send(res, get(req.path_params.at("id")));
  });
  server.Post("/sessions/:id/decisions",
              [this, send](const httplib::Request &req, httplib::Response &res) {
                send(res, decide(req.path_params.at("id"), req.body));
              });
  server.Delete("/sessions/:id/decisions/:var",
                [this, send](const httplib::Request &req, httplib::Response &res) {
                  send(res, undo(req.path_params.at("id"), req.path_params.at("var")));
                });
  server.Post("/sessions/:id/shopping-principle",
              [this, send](const httplib::Request &req, httplib::Response &res) {
                send(res, shopping(req.path_params.at("id")));
              });
  server.Post("/sessions/:id/complete",
              [this, send](const httplib::Request &req, httplib::Response &res) {
                send(res, complete(req.path_params.at("id")));
              });
  if (!static_dir.empty())
    server.set_mount_point("/", static_dir);
}

namespace {

httplib::Server *active_server = nullptr;

extern "C" void stop_active_server(int) {
  if (active_server)
    active_server->stop();
}

} // namespace

int serve(const ServeOptions &options, std::ostream &log) {
  SessionService service(std::random_device{}() ^
                         (static_cast<std::uint64_t>(std::random_device{}()) << 32));
  if (!options.model_text.empty())
    service.set_default_model(options.model_name, options.model_text);
  httplib::Server server;
  service.install(server, options.static_dir);
  int port = options.port;
  if (port == 0)
    port = server.bind_to_any_port(options.host);
  else if (!server.bind_to_port(options.host, port))
    port = -1;
  if (port < 0) {
    log << "error: cannot bind " << options.host << ":" << options.port << "\n";
    return 2;
  }
  log << "listening on http://" << options.host << ":" << port << "\n" << std::flush;
  active_server = &server;
  std::signal(SIGINT, stop_active_server);
  std::signal(SIGTERM, stop_active_server);
  server.listen_after_bind();
  active_server = nullptr;
  if (!options.snapshot_path.empty()) {
    std::ofstream out(options.snapshot_path);
    out << service.snapshot().dump(2) << "\n";
    log << "snapshot written to " << options.snapshot_path << "\n";
  }
  return 0;
}

} // namespace confik
