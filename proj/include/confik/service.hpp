#pragma once

#include "confik/feature_model.hpp"
#include "confik/random.hpp"
#include "confik/session.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

namespace httplib {
class Server;
}

namespace confik {

struct Response {
  int status = 200;
  nlohmann::ordered_json body;
};

/// Full client-facing rendering of a session: per-variable status,
/// highlighting, and whether each value can still be chosen, plus the
/// feature tree.
nlohmann::ordered_json session_document(const std::string &id, const std::string &model_name,
                                              const FeatureModel &fm, const Session &s);

/// In-memory session store behind the HTTP routes. Each handler returns the
/// status code and JSON body it would send, so the routing layer is thin and
/// the handlers are testable without sockets.
///
/// Status codes: 400 malformed body or unknown variable, 404 unknown
/// session, 409 rejected operation, 422 model without products.
class SessionService {
public:
  /// Session ids come from an Rng seeded with `id_seed`.
  explicit SessionService(std::uint64_t id_seed);

  /// Model used when a create request omits "model".
  void set_default_model(std::string name, std::string text);

  Response create(const std::string &body);
  Response get(const std::string &id);
  Response decide(const std::string &id, const std::string &body);
  Response undo(const std::string &id, const std::string &var);
  Response shopping(const std::string &id);
  Response complete(const std::string &id);
  Response default_model() const;

  /// Every session's document plus its replayable decision script.
  nlohmann::ordered_json snapshot() const;

  /// Installs the JSON routes; with a non-empty `static_dir`, also serves
  /// that directory under "/".
  void install(httplib::Server &server, const std::string &static_dir = "");

private:
  struct Entry {
    std::string name;
    std::shared_ptr<const FeatureModel> model;
    Session session;
    std::mutex lock;
  };

  std::shared_ptr<Entry> find(const std::string &id) const;
  template <class Op> Response mutate(const std::string &id, Op op);
  std::string fresh_id();

  mutable std::shared_mutex map_lock_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex rng_lock_;
  Rng rng_;
  std::optional<std::pair<std::string, std::string>> default_model_;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string model_name;
  std::string model_text;
  std::string static_dir;
  std::string snapshot_path;
};

/// Blocking server; port 0 picks a free port, which is reported on `log`.
/// Stops on SIGINT or SIGTERM and then writes snapshot() to `snapshot_path`
/// when it is set.
int serve(const ServeOptions &options, std::ostream &log);

} // namespace confik
