#include "cubetutor/replay.hpp"

#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace cubetutor {

namespace {

struct SessionReplay {
  DialogueState state;
  std::vector<std::string> expected;
  std::vector<std::string> actual;
};

}  // namespace

ReplayResult replay(const std::vector<TranscriptLine>& lines, const DialogueServices& services) {
  ReplayResult result;
  std::map<std::string, SessionReplay> sessions;
  std::vector<std::string> order;
  for (const auto& l : lines) {
    if (l.speaker == "system" && l.kind == "session_start") {
      auto& s = sessions[l.session];
      s = SessionReplay{};
      s.state.session_id = l.session;
      s.state.user_id = l.text;
      order.push_back(l.session);
      continue;
    }
    const auto it = sessions.find(l.session);
    if (it == sessions.end()) throw std::invalid_argument("line for session " + l.session + " before session_start");
    auto& s = it->second;
    if (l.speaker == "system" && l.kind == "cube_edit") {
      s.state.cube = parse_facelets(l.text);
      s.state.plan.reset();
      s.state.last_topic = Topic::None;
    } else if (l.speaker == "user") {
      ++result.user_turns;
      for (const auto& r : respond(s.state, l.text, services).responses)
        s.actual.push_back(std::string(to_string(r.kind)) + ": " + r.text);
    } else if (l.speaker == "bot") {
      ++result.bot_lines;
      s.expected.push_back(l.kind + ": " + l.text);
    } else {
      throw std::invalid_argument("unknown speaker " + l.speaker);
    }
  }
  result.sessions = order.size();
  for (const auto& id : order) {
    const auto& s = sessions[id];
    const std::size_t n = std::max(s.expected.size(), s.actual.size());
    for (std::size_t i = 0; i < n; ++i) {
      const std::string e = i < s.expected.size() ? s.expected[i] : "";
      const std::string a = i < s.actual.size() ? s.actual[i] : "";
      if (e != a) result.diffs.push_back({id, i + 1, e, a});
    }
  }
  return result;
}

std::vector<TranscriptLine> read_transcript_jsonl(const std::string& text) {
  std::vector<TranscriptLine> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(transcript_from_json(line));
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("transcript line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::string format_diff(const ReplayDiff& d) {
  return "session " + d.session + " bot line " + std::to_string(d.index) + "\n- " +
         (d.expected.empty() ? "(nothing)" : d.expected) + "\n+ " + (d.actual.empty() ? "(nothing)" : d.actual);
}

}  // namespace cubetutor
