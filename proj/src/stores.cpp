#include "cubetutor/stores.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/crc.hpp>

#include "json.hpp"

namespace cubetutor {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_fully(int fd, const std::string& data, const fs::path& path) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw StoreError("write failed for " + path.string() + ": " + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

}  // namespace

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.parent_path() / ("." + path.filename().string() + ".tmp");
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw StoreError("cannot create " + tmp.string() + ": " + std::strerror(errno));
  try {
    write_fully(fd, content, tmp);
    if (::fsync(fd) != 0) throw StoreError("fsync failed for " + tmp.string());
  } catch (...) {
    ::close(fd);
    fs::remove(tmp);
    throw;
  }
  ::close(fd);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw StoreError("cannot rename " + tmp.string() + ": " + ec.message());
}

bool valid_record_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
  });
}

std::string profile_to_json(const UserProfile& p) {
  json j{{"username", p.username},       {"gender", p.gender},       {"score", p.score},
         {"games_won", p.games_won},     {"skill_level", p.skill_level}, {"games_played", p.games_played},
         {"role", p.role}};
  j["avg_game_minutes"] = p.avg_game_minutes ? json(*p.avg_game_minutes) : json(nullptr);
  return j.dump(2) + "\n";
}

UserProfile profile_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    UserProfile p;
    p.username = j.at("username").get<std::string>();
    p.gender = j.value("gender", "");
    p.score = j.value("score", 0LL);
    p.games_won = j.value("games_won", 0LL);
    p.skill_level = j.value("skill_level", "");
    p.games_played = j.value("games_played", 0LL);
    if (j.contains("avg_game_minutes") && !j["avg_game_minutes"].is_null())
      p.avg_game_minutes = j["avg_game_minutes"].get<double>();
    p.role = j.value("role", "student");
    if (!valid_profile(p)) throw StoreError("profile " + p.username + " has inconsistent counts");
    return p;
  } catch (const json::exception& e) {
    throw StoreError(std::string("malformed profile: ") + e.what());
  }
}

ProfileStore::ProfileStore(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

std::optional<UserProfile> ProfileStore::find(std::string_view user_id) const {
  const std::string id = lower(user_id);
  if (!valid_record_id(id)) return std::nullopt;
  std::shared_lock lock(mutex_);
  const fs::path path = dir_ / (id + ".json");
  if (!fs::exists(path)) return std::nullopt;
  return profile_from_json(read_all(path));
}

std::vector<std::string> ProfileStore::usernames() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    const auto name = entry.path().filename().string();
    if (name.front() == '.' || entry.path().extension() != ".json") continue;
    try {
      out.push_back(profile_from_json(read_all(entry.path())).username);
    } catch (const StoreError&) {
      // unreadable profiles are not offered to the intent classifier
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void ProfileStore::save(const UserProfile& profile) {
  const std::string id = lower(profile.username);
  if (!valid_record_id(id)) throw StoreError("invalid user id " + profile.username);
  if (!valid_profile(profile)) throw StoreError("profile " + profile.username + " has inconsistent counts");
  std::unique_lock lock(mutex_);
  write_atomic(dir_ / (id + ".json"), profile_to_json(profile));
}

std::string line_checksum(const std::string& compact_json) {
  boost::crc_32_type crc;
  crc.process_bytes(compact_json.data(), compact_json.size());
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", crc.checksum());
  return buf;
}

ChecksummedLog::ChecksummedLog(fs::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
}

void ChecksummedLog::append(const std::string& record) {
  json j = json::parse(record);
  if (!j.is_object() || j.contains("crc")) throw StoreError("log records must be objects without crc");
  const std::string body = j.dump();
  j["crc"] = line_checksum(body);
  const std::string line = j.dump() + "\n";
  std::lock_guard lock(mutex_);
  const int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw StoreError("cannot open " + path_.string() + ": " + std::strerror(errno));
  try {
    write_fully(fd, line, path_);
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
}

LogScan ChecksummedLog::scan() {
  std::lock_guard lock(mutex_);
  LogScan out;
  if (!fs::exists(path_)) return out;
  std::ifstream in(path_, std::ios::binary);
  std::string line;
  std::vector<std::string> fresh;
  std::set<std::string> known;
  if (std::ifstream q(path_.string() + ".quarantine"); q)
    for (std::string l; std::getline(q, l);) known.insert(l);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    bool ok = false;
    try {
      json j = json::parse(line);
      if (j.is_object() && j.contains("crc") && j["crc"].is_string()) {
        const std::string crc = j["crc"].get<std::string>();
        j.erase("crc");
        const std::string body = j.dump();
        if (line_checksum(body) == crc) {
          out.records.push_back(body);
          ok = true;
        }
      }
    } catch (const json::exception&) {
    }
    if (!ok) {
      out.quarantined.push_back(line);
      if (known.insert(line).second) fresh.push_back(line);
    }
  }
  if (!fresh.empty()) {
    std::ofstream q(path_.string() + ".quarantine", std::ios::app);
    for (const auto& l : fresh) q << l << "\n";
  }
  return out;
}

std::string transcript_to_json(const TranscriptLine& l) {
  json j{{"timestamp", l.timestamp}, {"session", l.session},   {"speaker", l.speaker},
         {"text", l.text},           {"sentiment", l.sentiment}, {"intent", l.intent},
         {"strike_count", l.strike_count}};
  if (!l.kind.empty()) j["kind"] = l.kind;
  return j.dump();
}

TranscriptLine transcript_from_json(const std::string& text) {
  const json j = json::parse(text);
  TranscriptLine l;
  l.timestamp = j.value("timestamp", "");
  l.session = j.value("session", "");
  l.speaker = j.value("speaker", "");
  l.text = j.value("text", "");
  l.sentiment = j.value("sentiment", "");
  l.intent = j.value("intent", "");
  l.strike_count = j.value("strike_count", 0);
  l.kind = j.value("kind", "");
  return l;
}

std::vector<TranscriptLine> TranscriptStore::load(std::vector<std::string>* quarantined) {
  auto scan = log_.scan();
  if (quarantined) *quarantined = scan.quarantined;
  std::vector<TranscriptLine> out;
  for (const auto& r : scan.records) out.push_back(transcript_from_json(r));
  return out;
}

std::vector<TranscriptLine> TranscriptStore::session(const std::string& session_id) {
  auto all = load();
  std::erase_if(all, [&](const TranscriptLine& l) { return l.session != session_id; });
  return all;
}

void ReportStore::append(const StrikeReport& r, const std::string& timestamp) {
  log_.append(json{{"timestamp", timestamp},
                   {"session", r.session_id},
                   {"user", r.user_id},
                   {"strike_count", r.strike_count},
                   {"utterance", r.utterance},
                   {"teacher_visible", r.teacher_visible}}
                  .dump());
}

std::vector<StrikeReport> ReportStore::load() {
  std::vector<StrikeReport> out;
  for (const auto& rec : log_.scan().records) {
    const json j = json::parse(rec);
    out.push_back({j.value("session", ""), j.value("user", ""), j.value("strike_count", 0), j.value("utterance", ""),
                   j.value("teacher_visible", true)});
  }
  return out;
}

LibraryStore::LibraryStore(const std::map<std::string, fs::path>& paths) {
  for (const auto& [goal, path] : paths) {
    try {
      libraries_.emplace(goal, load_library(path));
    } catch (const std::exception& e) {
      throw StoreError("library for " + goal + ": " + e.what());
    }
  }
}

const MacroLibrary* LibraryStore::find(const std::string& goal) const {
  const auto it = libraries_.find(goal);
  return it == libraries_.end() ? nullptr : &it->second;
}

std::vector<std::string> LibraryStore::goals() const {
  std::vector<std::string> out;
  for (const auto& [g, _] : libraries_) out.push_back(g);
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace cubetutor
