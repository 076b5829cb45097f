#include "cubetutor/service.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

namespace cubetutor {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

ApiResponse error(int status, std::string_view code, std::string_view message) {
  return {status, json{{"error", {{"code", code}, {"message", message}}}}.dump()};
}

ApiResponse ok(const json& j, int status = 200) { return {status, j.dump()}; }

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto end = path.find('/', start);
    const auto piece = path.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    if (!piece.empty()) parts.emplace_back(piece);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return parts;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::optional<json> parse_body(const std::string& body) {
  try {
    json j = json::parse(body);
    if (j.is_object()) return j;
  } catch (const json::exception&) {
  }
  return std::nullopt;
}

json response_json(const Response& r) {
  json j{{"kind", to_string(r.kind)}, {"text", r.text}};
  if (r.cube) j["cube"] = *r.cube;
  if (!r.moves.empty()) {
    j["moves"] = r.moves;
    j["states"] = r.states;
  }
  return j;
}

}  // namespace

ServiceConfig config_from_json(const std::string& text) {
  ServiceConfig c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "host") c.host = value.get<std::string>();
      else if (key == "port") c.port = value.get<int>();
      else if (key == "store_dir") c.store_dir = value.get<std::string>();
      else if (key == "valence") c.valence = value.get<std::string>();
      else if (key == "abuse") c.abuse = value.get<std::string>();
      else if (key == "templates") c.templates = value.get<std::string>();
      else if (key == "register") c.reg = parse_register(value.get<std::string>());
      else if (key == "session_seed") c.session_seed = value.get<std::uint64_t>();
      else if (key == "libraries") {
        c.libraries.clear();
        for (const auto& [g, p] : value.items()) c.libraries[g] = p.get<std::string>();
      } else if (key == "corpora") {
        c.corpora.clear();
        for (const auto& [n, p] : value.items()) c.corpora[n] = p.get<std::string>();
      } else if (key == "tokens") {
        for (const auto& [t, u] : value.items()) c.tokens[t] = u.get<std::string>();
      } else {
        throw ConfigError("unknown config key " + key);
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.port < 0 || c.port > 65535) throw ConfigError("port out of range");
  for (const auto& [t, u] : c.tokens)
    if (t.empty() || !valid_record_id(lower(u))) throw ConfigError("bad token entry for user " + u);
  return c;
}

ServiceConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

void apply_env_overrides(ServiceConfig& c, const std::function<std::optional<std::string>(const char*)>& getenv) {
  if (auto v = getenv("CUBETUTOR_HOST")) c.host = *v;
  if (auto v = getenv("CUBETUTOR_PORT")) {
    try {
      std::size_t used = 0;
      c.port = std::stoi(*v, &used);
      if (used != v->size() || c.port < 0 || c.port > 65535) throw std::invalid_argument("range");
    } catch (const std::logic_error&) {
      throw ConfigError("CUBETUTOR_PORT is not a port: " + *v);
    }
  }
  if (auto v = getenv("CUBETUTOR_STORE_DIR")) c.store_dir = *v;
  if (auto v = getenv("CUBETUTOR_VALENCE")) c.valence = *v;
  if (auto v = getenv("CUBETUTOR_ABUSE")) c.abuse = *v;
  if (auto v = getenv("CUBETUTOR_TEMPLATES")) c.templates = *v;
  if (auto v = getenv("CUBETUTOR_LIBRARY")) c.libraries["white-cross"] = *v;
}

void apply_env_overrides(ServiceConfig& c) {
  apply_env_overrides(c, [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (!v) return std::nullopt;
    return std::string(v);
  });
}

TutorService::TutorService(ServiceConfig config)
    : config_(std::move(config)),
      valence_(ValenceLexicon::load(config_.valence)),
      abuse_(AbuseLexicon::load(config_.abuse)),
      templates_(TemplateSet::load(config_.templates)),
      libraries_(config_.libraries),
      profiles_(config_.store_dir / "profiles"),
      transcripts_(config_.store_dir / "transcripts.jsonl"),
      reports_(config_.store_dir / "reports.jsonl"),
      ids_(config_.session_seed ? config_.session_seed : std::random_device{}()) {}

std::string TutorService::next_id(const char* prefix) {
  std::lock_guard lock(id_mutex_);
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(ids_()));
  return std::string(prefix) + buf;
}

std::optional<std::string> TutorService::authenticate(const ApiRequest& r) const {
  constexpr std::string_view scheme = "Bearer ";
  if (r.authorization.rfind(scheme, 0) != 0) return std::nullopt;
  const auto it = config_.tokens.find(r.authorization.substr(scheme.size()));
  if (it == config_.tokens.end()) return std::nullopt;
  return it->second;
}

std::shared_ptr<TutorService::Session> TutorService::find_session(const std::string& id) {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

DialogueServices TutorService::services() {
  DialogueServices sv;
  sv.valence = &valence_;
  sv.abuse = &abuse_;
  sv.templates = &templates_;
  for (const auto& g : libraries_.goals()) sv.libraries[g] = libraries_.find(g);
  sv.profiles = &profiles_;
  sv.report = [this](const StrikeReport& r) { reports_.append(r, utc_timestamp()); };
  sv.reg = config_.reg;
  return sv;
}

ApiResponse TutorService::handle(const ApiRequest& req) {
  try {
    const auto parts = split_path(req.path);
    const auto user = authenticate(req);
    if (!user) return error(401, "unauthorized", "missing or unknown bearer token");
    const auto& m = req.method;

    if (parts.size() == 1 && parts[0] == "sessions") {
      if (m != "POST") return error(405, "method_not_allowed", "use POST");
      return create_session(*user);
    }
    if (parts.size() == 3 && parts[0] == "sessions" && (parts[2] == "messages" || parts[2] == "cube")) {
      const auto s = find_session(parts[1]);
      if (!s) return error(404, "unknown_session", "no such session");
      std::lock_guard lock(s->mutex);
      if (lower(s->state.user_id) != lower(*user)) return error(403, "forbidden", "session belongs to another user");
      if (parts[2] == "messages") {
        if (m != "POST") return error(405, "method_not_allowed", "use POST");
        return post_message(*s, req.body);
      }
      if (m == "GET") return get_cube(*s);
      if (m == "PUT") return put_cube(*s, req.body);
      return error(405, "method_not_allowed", "use GET or PUT");
    }
    if (parts.size() == 3 && parts[0] == "users" && parts[2] == "summary") {
      if (m != "GET") return error(405, "method_not_allowed", "use GET");
      return summary(*user, parts[1]);
    }
    if (parts.size() == 1 && parts[0] == "macros") {
      if (m != "GET") return error(405, "method_not_allowed", "use GET");
      return list_macros(req);
    }
    if (parts.size() == 1 && parts[0] == "audits") {
      if (m != "POST") return error(405, "method_not_allowed", "use POST");
      return create_audit(req.body);
    }
    if (parts.size() == 2 && parts[0] == "audits") {
      if (m != "GET") return error(405, "method_not_allowed", "use GET");
      return get_audit(parts[1]);
    }
    return error(404, "not_found", "no such endpoint");
  } catch (const StoreError& e) {
    return error(500, "store_failure", e.what());
  } catch (const std::exception& e) {
    return error(500, "internal_error", e.what());
  }
}

ApiResponse TutorService::create_session(const std::string& user) {
  auto s = std::make_shared<Session>();
  s->state.session_id = next_id("s-");
  s->state.user_id = user;
  s->created = s->updated = utc_timestamp();
  transcripts_.append({s->created, s->state.session_id, "system", user, "", "", 0, "session_start"});
  {
    std::unique_lock lock(sessions_mutex_);
    sessions_[s->state.session_id] = s;
  }
  return ok({{"session_id", s->state.session_id}, {"cube", format_facelets(s->state.cube)}, {"goal", s->state.goal}},
            201);
}

ApiResponse TutorService::post_message(Session& s, const std::string& body) {
  const auto j = parse_body(body);
  if (!j || !j->contains("text") || !(*j)["text"].is_string())
    return error(400, "invalid_request", "expected {\"text\": string}");
  const std::string text = (*j)["text"].get<std::string>();
  if (text.size() > 4096) return error(400, "invalid_request", "text longer than 4096 bytes");

  const TurnRecord rec = respond(s.state, text, services());
  s.updated = utc_timestamp();
  const std::string sentiment(to_string(rec.sentiment.label));
  const std::string intent(to_string(rec.intent.kind));
  transcripts_.append({s.updated, s.state.session_id, "user", text, sentiment, intent, s.state.strike_count, ""});
  json out{{"sentiment", sentiment},
           {"intensity", rec.sentiment.intensity},
           {"intent", intent},
           {"strike_count", s.state.strike_count},
           {"responses", json::array()}};
  for (const auto& r : rec.responses) {
    transcripts_.append({s.updated, s.state.session_id, "bot", r.text, "", "", s.state.strike_count,
                         std::string(to_string(r.kind))});
    out["responses"].push_back(response_json(r));
  }
  return ok(out);
}

ApiResponse TutorService::get_cube(Session& s) {
  return ok({{"facelets", format_facelets(s.state.cube)}, {"goal", s.state.goal}});
}

ApiResponse TutorService::put_cube(Session& s, const std::string& body) {
  const auto j = parse_body(body);
  if (!j || !j->contains("facelets") || !(*j)["facelets"].is_string())
    return error(400, "invalid_request", "expected {\"facelets\": string}");
  try {
    const CubeState cube = parse_facelets((*j)["facelets"].get<std::string>());
    s.state.cube = cube;
    s.state.plan.reset();
    s.state.last_topic = Topic::None;
    s.updated = utc_timestamp();
    transcripts_.append({s.updated, s.state.session_id, "system", format_facelets(cube), "", "", s.state.strike_count,
                         "cube_edit"});
  } catch (const FaceletParseError& e) {
    return error(400, "invalid_facelets", e.what());
  }
  return get_cube(s);
}

ApiResponse TutorService::summary(const std::string& user, const std::string& who) {
  if (who != "me" && lower(who) != lower(user)) return error(403, "forbidden", kLeakageRefusal);
  const auto p = profiles_.find(user);
  json out{{"summary", summarize_performance(p)}};
  if (p) {
    out["games_played"] = p->games_played;
    out["games_won"] = p->games_won;
    out["avg_game_minutes"] = p->games_played > 0 && p->avg_game_minutes ? json(*p->avg_game_minutes) : json(nullptr);
  }
  return ok(out);
}

ApiResponse TutorService::list_macros(const ApiRequest& req) {
  const auto g = req.query.find("goal");
  const std::string goal = g == req.query.end() ? "white-cross" : g->second;
  Register reg = config_.reg;
  if (const auto r = req.query.find("register"); r != req.query.end()) {
    try {
      reg = parse_register(r->second);
    } catch (const std::invalid_argument& e) {
      return error(400, "invalid_request", e.what());
    }
  }
  const MacroLibrary* lib = libraries_.find(goal);
  if (!lib) return error(404, "unknown_goal", "no library for goal " + goal);
  json out{{"goal", lib->goal_name}, {"revision", lib->revision}, {"macros", json::array()}};
  for (const auto& m : lib->macros)
    out["macros"].push_back({{"name", m.name},
                             {"moves", format_moves(m.sequence)},
                             {"precondition", to_string(m.precondition)},
                             {"effect", m.effect.description},
                             {"complexity", m.complexity},
                             {"explanation", render_macro(m, reg, templates_).text()}});
  return ok(out);
}

ApiResponse TutorService::create_audit(const std::string& body) {
  const auto j = parse_body(body);
  if (!j) return error(400, "invalid_request", "expected a JSON object");
  const std::string metric = j->value("metric", "");
  if (metric != "die" && metric != "wrs") return error(400, "invalid_metric", "metric must be die or wrs");
  TemplateCorpus corpus;
  try {
    if (j->contains("corpus_csv")) {
      corpus = parse_corpus_csv((*j)["corpus_csv"].get<std::string>());
    } else {
      const auto it = config_.corpora.find(j->value("corpus", "eec"));
      if (it == config_.corpora.end()) return error(400, "unknown_corpus", "no such corpus");
      corpus = load_corpus_csv(it->second);
    }
  } catch (const CorpusError& e) {
    return error(400, "invalid_corpus", e.what());
  } catch (const json::exception& e) {
    return error(400, "invalid_corpus", e.what());
  }
  std::vector<std::string> names = {"lexicon", "constant", "gender-skewed"};
  if (j->contains("systems")) {
    if (!(*j)["systems"].is_array()) return error(400, "invalid_request", "systems must be a list");
    names.clear();
    for (const auto& n : (*j)["systems"]) {
      if (!n.is_string()) return error(400, "invalid_request", "systems must be strings");
      names.push_back(n.get<std::string>());
    }
    if (names.empty()) return error(400, "invalid_request", "no systems");
  }
  std::vector<std::pair<std::string, SentimentScorer>> systems;
  for (const auto& n : names) {
    if (n == "lexicon")
      systems.emplace_back(n, [this](std::string_view t) -> std::optional<double> {
        return score_sentiment(normalize(t), valence_).intensity;
      });
    else if (n == "constant") systems.emplace_back(n, constant_scorer(0.3));
    else if (n == "gender-skewed") systems.emplace_back(n, gender_skewed_scorer(corpus));
    else return error(400, "unknown_system", "unknown system " + n);
  }
  const std::string report = audit_to_json(run_audit(expand_templates(corpus), systems, metric));
  const std::string id = next_id("a-");
  write_atomic(config_.store_dir / "audits" / (id + ".json"), report);
  {
    std::lock_guard lock(audits_mutex_);
    audits_[id] = report;
  }
  return ok({{"audit_id", id}}, 201);
}

ApiResponse TutorService::get_audit(const std::string& id) {
  {
    std::lock_guard lock(audits_mutex_);
    if (const auto it = audits_.find(id); it != audits_.end()) return {200, it->second};
  }
  if (!valid_record_id(id)) return error(404, "unknown_audit", "no such audit");
  const fs::path path = config_.store_dir / "audits" / (id + ".json");
  if (!fs::exists(path)) return error(404, "unknown_audit", "no such audit");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return {200, ss.str()};
}

void mount(httplib::Server& server, TutorService& service) {
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    ApiRequest r{req.method, req.path, req.get_header_value("Authorization"), req.body, {}};
    for (const auto& [k, v] : req.params) r.query[k] = v;
    const ApiResponse out = service.handle(r);
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  server.Get(".*", forward);
  server.Post(".*", forward);
  server.Put(".*", forward);
  server.Delete(".*", forward);
}

int serve(TutorService& service) {
  httplib::Server server;
  server.set_payload_max_length(1 << 20);
  mount(server, service);
  const auto& c = service.config();
  if (!server.listen(c.host, c.port)) return 1;
  return 0;
}

}  // namespace cubetutor
