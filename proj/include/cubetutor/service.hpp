#pragma once

// HTTP tutor service. TutorService::handle is the whole API as a function of
// (method, path, bearer token, body); serve() puts it behind cpp-httplib.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>

#include "cubetutor/bias.hpp"
#include "cubetutor/dialogue.hpp"
#include "cubetutor/stores.hpp"

namespace httplib {
class Server;
}

namespace cubetutor {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path store_dir = "var";
  std::filesystem::path valence = "data/valence.tsv";
  std::filesystem::path abuse = "data/abuse.txt";
  std::filesystem::path templates = "data/templates.tsv";
  std::map<std::string, std::filesystem::path> libraries = {{"white-cross", "data/white_cross_library.json"}};
  std::map<std::string, std::filesystem::path> corpora = {{"eec", "data/eec.csv"}};
  std::map<std::string, std::string> tokens;  // bearer token -> user id
  Register reg = Register::Standard;
  std::uint64_t session_seed = 0;  // 0 draws from std::random_device
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown keys are rejected. Paths are taken as given.
ServiceConfig config_from_json(const std::string& text);
ServiceConfig load_config(const std::filesystem::path& path);
/// CUBETUTOR_HOST, CUBETUTOR_PORT, CUBETUTOR_STORE_DIR, CUBETUTOR_VALENCE,
/// CUBETUTOR_ABUSE, CUBETUTOR_TEMPLATES, CUBETUTOR_LIBRARY (white-cross).
void apply_env_overrides(ServiceConfig& config,
                         const std::function<std::optional<std::string>(const char*)>& getenv);
void apply_env_overrides(ServiceConfig& config);

struct ApiRequest {
  std::string method;
  std::string path;
  std::string authorization;  // full header value
  std::string body;
  std::map<std::string, std::string> query;
};

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON
};

class TutorService {
 public:
  /// Loads lexicons, templates and libraries; throws on any failure.
  explicit TutorService(ServiceConfig config);

  ApiResponse handle(const ApiRequest& request);

  const ServiceConfig& config() const { return config_; }
  ProfileStore& profiles() { return profiles_; }
  TranscriptStore& transcripts() { return transcripts_; }
  ReportStore& reports() { return reports_; }

 private:
  struct Session {
    std::mutex mutex;
    DialogueState state;
    std::string created;
    std::string updated;
  };

  ApiResponse create_session(const std::string& user);
  ApiResponse post_message(Session& s, const std::string& body);
  ApiResponse get_cube(Session& s);
  ApiResponse put_cube(Session& s, const std::string& body);
  ApiResponse summary(const std::string& user, const std::string& who);
  ApiResponse list_macros(const ApiRequest& request);
  ApiResponse create_audit(const std::string& body);
  ApiResponse get_audit(const std::string& id);

  std::optional<std::string> authenticate(const ApiRequest& request) const;
  std::shared_ptr<Session> find_session(const std::string& id);
  std::string next_id(const char* prefix);
  DialogueServices services();

  ServiceConfig config_;
  ValenceLexicon valence_;
  AbuseLexicon abuse_;
  TemplateSet templates_;
  LibraryStore libraries_;
  ProfileStore profiles_;
  TranscriptStore transcripts_;
  ReportStore reports_;

  std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mutex audits_mutex_;
  std::map<std::string, std::string> audits_;
  std::mutex id_mutex_;
  std::mt19937_64 ids_;
};

/// Routes every request on `server` to `service`.
void mount(httplib::Server& server, TutorService& service);

/// Blocks until the server stops.
int serve(TutorService& service);

}  // namespace cubetutor
