#pragma once

// File-backed stores. Records are written to a temp file and renamed into
// place; logs are JSON lines carrying a CRC-32 of their content and are only
// ever appended to.

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubetutor/dialogue.hpp"
#include "cubetutor/macros.hpp"

namespace cubetutor {

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes `content` next to `path` and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Lowercase letters, digits, '-' and '_', 1 to 64 chars. Ids become file names.
bool valid_record_id(std::string_view id);

std::string profile_to_json(const UserProfile& p);
UserProfile profile_from_json(const std::string& text);

class ProfileStore : public ProfileSource {
 public:
  explicit ProfileStore(std::filesystem::path dir);

  std::optional<UserProfile> find(std::string_view user_id) const override;
  std::vector<std::string> usernames() const override;
  /// Throws StoreError for an invalid profile or id.
  void save(const UserProfile& profile);

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
};

/// CRC-32 (as 8 lowercase hex digits) of a compact JSON object.
std::string line_checksum(const std::string& compact_json);

struct LogScan {
  std::vector<std::string> records;  // compact JSON objects without "crc", file order
  std::vector<std::string> quarantined;  // raw lines that failed the check
};

/// Append-only JSON-lines file. Each append is one write(2) of a whole line.
class ChecksummedLog {
 public:
  explicit ChecksummedLog(std::filesystem::path path);

  /// `record` must be a JSON object without a "crc" member.
  void append(const std::string& record);
  /// Reads every line; lines that fail to parse or to match their checksum are
  /// copied to <path>.quarantine (once per distinct line) and left out of the result.
  LogScan scan();

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
};

struct TranscriptLine {
  std::string timestamp;
  std::string session;
  std::string speaker;  // "user" or "bot"
  std::string text;
  std::string sentiment;
  std::string intent;
  int strike_count = 0;
  std::string kind;  // bot response kind
};

std::string transcript_to_json(const TranscriptLine& line);
TranscriptLine transcript_from_json(const std::string& text);

class TranscriptStore {
 public:
  explicit TranscriptStore(std::filesystem::path path) : log_(std::move(path)) {}
  void append(const TranscriptLine& line) { log_.append(transcript_to_json(line)); }
  std::vector<TranscriptLine> load(std::vector<std::string>* quarantined = nullptr);
  std::vector<TranscriptLine> session(const std::string& session_id);

 private:
  ChecksummedLog log_;
};

class ReportStore {
 public:
  explicit ReportStore(std::filesystem::path path) : log_(std::move(path)) {}
  void append(const StrikeReport& report, const std::string& timestamp);
  std::vector<StrikeReport> load();

 private:
  ChecksummedLog log_;
};

class LibraryStore {
 public:
  /// Loads every configured library; throws StoreError naming the goal on failure.
  explicit LibraryStore(const std::map<std::string, std::filesystem::path>& paths);
  const MacroLibrary* find(const std::string& goal) const;
  std::vector<std::string> goals() const;

 private:
  std::map<std::string, MacroLibrary> libraries_;
};

/// UTC, second resolution: 2024-05-01T12:00:00Z.
std::string utc_timestamp();

}  // namespace cubetutor
