#pragma once

// Re-run recorded conversations through the dialogue engine and compare the
// bot lines. System lines set up the session: kind "session_start" carries
// the user id, kind "cube_edit" the facelets.

#include <string>
#include <vector>

#include "cubetutor/dialogue.hpp"
#include "cubetutor/stores.hpp"

namespace cubetutor {

struct ReplayDiff {
  std::string session;
  std::size_t index = 0;  // bot line number within the session, from 1
  std::string expected;   // "<kind>: <text>", empty when the engine said more
  std::string actual;     // empty when the engine said less
};

struct ReplayResult {
  std::size_t sessions = 0;
  std::size_t user_turns = 0;
  std::size_t bot_lines = 0;
  std::vector<ReplayDiff> diffs;
};

/// Lines may interleave sessions. Throws std::invalid_argument for a line
/// before its session_start or an unknown speaker.
ReplayResult replay(const std::vector<TranscriptLine>& lines, const DialogueServices& services);

/// One JSON object per line, same fields as the transcript store minus "crc".
std::vector<TranscriptLine> read_transcript_jsonl(const std::string& text);

std::string format_diff(const ReplayDiff& d);

}  // namespace cubetutor
