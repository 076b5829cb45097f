#pragma once

// Guarded dialogue policy: intents, strikes and warnings, leakage refusal,
// own-performance summaries and the teaching flow.
//
// respond() runs normalize -> sentiment -> abuse/strikes -> intent -> guard
// -> content. An abusive turn yields only the warning for its tier. A
// negative turn without abuse gets an encouragement before the content.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cubetutor/macros.hpp"
#include "cubetutor/nlg.hpp"
#include "cubetutor/sentiment.hpp"

namespace cubetutor {

enum class IntentKind {
  TeachGoal,
  ContinueTeaching,
  AskOtherUser,
  AskOwnSummary,
  Affirm,
  Deny,
  Smalltalk,
  EditCube,
  Unknown
};
std::string_view to_string(IntentKind k);

struct Intent {
  IntentKind kind = IntentKind::Unknown;
  std::string goal;    // TeachGoal: "white-cross" or "solved"
  std::string target;  // AskOtherUser: the username as known to the store
  std::string metric;  // AskOtherUser: "move-success", "score", ...
  bool abusive = false;
  std::vector<std::string> abusive_terms;
};

/// `other_usernames` must not contain the requester.
Intent classify_intent(const Utterance& u, const std::vector<std::string>& other_usernames,
                       const AbuseLexicon& abuse);

struct UserProfile {
  std::string username;
  std::string gender;
  long long score = 0;
  long long games_won = 0;
  std::string skill_level;
  long long games_played = 0;
  std::optional<double> avg_game_minutes;
  std::string role = "student";  // reserved
};

/// Counts non-negative and games_won <= games_played.
bool valid_profile(const UserProfile& p);

enum class Topic { None, Described, Taught };

struct TeachingPlan {
  CubeState start;
  GreedyResult solution;
};

struct DialogueState {
  std::string session_id;
  std::string user_id;
  int strike_count = 0;
  CubeState cube = solved_state();
  std::string goal = "white-cross";
  Topic last_topic = Topic::None;
  std::optional<TeachingPlan> plan;
  std::vector<SentimentLabel> sentiment_history;
};

/// Returns the warning tier, 0 when the turn is not abusive.
int update_strikes(DialogueState& state, bool abusive);

/// Throws std::out_of_range outside 1..3.
std::string warning_message(int tier);

inline constexpr std::string_view kLeakageRefusal =
    "Any answer to your query will lead to release of private information of others. Hence, I am not able to "
    "answer at this time.";

class ProfileSource {
 public:
  virtual ~ProfileSource() = default;
  virtual std::optional<UserProfile> find(std::string_view user_id) const = 0;
  virtual std::vector<std::string> usernames() const = 0;
};

struct GuardDecision {
  bool allow = true;
  std::string refusal;
};

/// Refusals never depend on the target or on what the store holds.
GuardDecision guard_leakage(const Intent& intent, std::string_view requester, const ProfileSource& profiles);

/// Three lines: games played, average minutes per game, games won. A missing
/// profile gets an onboarding prompt.
std::string summarize_performance(const std::optional<UserProfile>& profile);

enum class ResponseKind { Answer, Warning, Refusal, Encouragement, Summary, TeachingStep };
std::string_view to_string(ResponseKind k);

struct Response {
  ResponseKind kind = ResponseKind::Answer;
  std::string text;
  std::optional<std::string> cube;                 // facelets after this response
  std::vector<std::string> moves;                  // teaching steps: moves played
  std::vector<std::string> states;                 // facelets after each move
};

struct StrikeReport {
  std::string session_id;
  std::string user_id;
  int strike_count = 0;
  std::string utterance;
  bool teacher_visible = true;
};

struct TurnRecord {
  SentimentResult sentiment;
  Intent intent;
  int tier = 0;
  std::vector<Response> responses;
};

struct DialogueServices {
  const ValenceLexicon* valence = nullptr;
  const AbuseLexicon* abuse = nullptr;
  const TemplateSet* templates = nullptr;
  std::map<std::string, const MacroLibrary*> libraries;  // by goal name
  const ProfileSource* profiles = nullptr;
  std::function<void(const StrikeReport&)> report;
  Register reg = Register::Standard;
};

TurnRecord respond(DialogueState& state, std::string_view text, const DialogueServices& services);

inline constexpr std::string_view kEncouragement =
    "Don't give up, you are making progress. You can keep solving or take a short break.";
inline constexpr std::string_view kReprompt =
    "Sorry, I did not understand that. I can teach you how to solve the white cross, continue a lesson, or give "
    "you a summary of your own performance.";

}  // namespace cubetutor
