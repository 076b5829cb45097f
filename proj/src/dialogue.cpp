#include "cubetutor/dialogue.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <stdexcept>

namespace cubetutor {

namespace {

struct Tokens {
  const std::vector<std::string>& t;

  bool has(std::string_view w) const { return std::find(t.begin(), t.end(), w) != t.end(); }
  template <typename Words>
  bool any_in(const Words& ws) const {
    return std::any_of(ws.begin(), ws.end(), [&](std::string_view w) { return has(w); });
  }
  bool any(std::initializer_list<std::string_view> ws) const { return any_in(ws); }
  bool seq(std::initializer_list<std::string_view> ws) const {
    const std::vector<std::string_view> p(ws);
    if (p.size() > t.size()) return false;
    for (std::size_t i = 0; i + p.size() <= t.size(); ++i)
      if (std::equal(p.begin(), p.end(), t.begin() + static_cast<std::ptrdiff_t>(i))) return true;
    return false;
  }
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string strip_possessive(const std::string& token) {
  if (token.size() > 2 && token.ends_with("'s")) return token.substr(0, token.size() - 2);
  return token;
}

struct MetricWords {
  std::string_view metric;
  std::vector<std::string_view> words;
};

const std::vector<MetricWords>& metric_vocabulary() {
  static const std::vector<MetricWords> v = {
      {"move-success",
       {"able", "perform", "performed", "successfully", "success", "succeed", "succeeded", "manage", "managed",
        "solve", "solved", "finish", "finished", "complete", "completed"}},
      {"score", {"score", "scores", "points", "marks", "grade", "grades"}},
      {"games-won", {"won", "win", "wins", "winning", "victories"}},
      {"games-played", {"games", "played", "play", "plays"}},
      {"skill-level", {"skill", "skills", "level", "rank", "ranking", "good", "better", "best", "worse", "expert"}},
      {"gender", {"gender", "male", "female", "boy", "girl"}},
      {"summary", {"performance", "summary", "stats", "statistics", "progress", "results", "record", "doing"}},
      {"time", {"time", "minutes", "long", "fast", "quick", "quickly", "slow", "average"}},
  };
  return v;
}

std::optional<std::string> metric_of(const Tokens& w) {
  for (const auto& m : metric_vocabulary())
    if (w.any_in(m.words)) return std::string(m.metric);
  return std::nullopt;
}

std::optional<std::string> goal_of(const Tokens& w) {
  if (w.seq({"white", "cross"}) || w.has("white-cross")) return "white-cross";
  if (w.seq({"whole", "cube"}) || w.seq({"entire", "cube"}) || w.seq({"full", "cube"}) ||
      w.seq({"solve", "the", "cube"}) || w.seq({"rubik's", "cube"}))
    return "solved";
  return std::nullopt;
}

std::string goal_text(std::string_view goal) { return goal == "white-cross" ? "white cross" : "whole cube"; }

std::string rotations(std::size_t n) {
  return n == 1 ? "one rotation of the face" : number_word(n) + " rotations of the faces";
}

std::string lower_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

// Cubelet that a greedy step places, in the caller's frame.
int step_target(const MacroAction& m, int frame) { return transform_position(m.effect.target, inverse_frame(frame)); }

Response teach_description(DialogueState& state, const DialogueServices& sv) {
  const auto lib_it = sv.libraries.find(state.goal);
  const auto goal = named_goal(state.goal);
  if (lib_it == sv.libraries.end() || !lib_it->second || !goal) {
    std::string known;
    for (const auto& [name, lib] : sv.libraries) known += (known.empty() ? "" : ", ") + goal_text(name);
    return {ResponseKind::Answer, "I do not have lessons for that goal yet. I can teach: " + known + ".", {}, {}, {}};
  }
  state.plan.reset();
  if (matches(state.cube, *goal))
    return {ResponseKind::Answer, "Yes. The " + goal_text(state.goal) + " is already solved on your cube.",
            format_facelets(state.cube), {}, {}};
  GreedyResult r = greedy_solve_with_library(state.cube, *lib_it->second);
  if (!r.solved() || r.steps.empty())
    return {ResponseKind::Answer,
            "I could not find a way to teach this configuration with the macros I know yet. Try scrambling the "
            "cube differently.",
            format_facelets(state.cube), {}, {}};
  const GreedyStep& first = r.steps.front();
  const int target = step_target(lib_it->second->macros[first.macro_index], first.frame);
  std::string text = "Yes. For the current configuration of the Rubik's cube, " +
                     lower_first(describe_cubelet(state.cube, target, sv.reg, *sv.templates)) +
                     (sv.reg == Register::Standard ? "\nDo you have any questions?" : "\nAny questions?");
  state.plan = TeachingPlan{state.cube, std::move(r)};
  state.last_topic = Topic::Described;
  return {ResponseKind::Answer, std::move(text), format_facelets(state.cube), {}, {}};
}

std::vector<Response> teach_steps(DialogueState& state, const DialogueServices& sv) {
  if (!state.plan || state.plan->start != state.cube)
    return {{ResponseKind::Answer,
             "Ask me to teach you a goal first, for example: can you teach me the white cross?", {}, {}, {}}};
  const MacroLibrary& lib = *sv.libraries.at(state.goal);
  std::vector<Response> out;
  CubeState s = state.plan->start;
  const auto& steps = state.plan->solution.steps;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const bool last = i + 1 == steps.size();
    const int target = step_target(lib.macros[steps[i].macro_index], steps[i].frame);
    const MoveSequence& moves = steps[i].moves;
    std::size_t placed_at = moves.size();
    CubeState probe = s;
    for (std::size_t j = 0; j < moves.size(); ++j) {
      probe = apply_move(probe, moves[j]);
      if (is_placed(probe, target)) {
        placed_at = j + 1;
        break;
      }
    }
    auto play = [&](std::size_t from, std::size_t to, std::string text) {
      Response r{ResponseKind::TeachingStep, std::move(text), std::nullopt, {}, {}};
      for (std::size_t j = from; j < to; ++j) {
        s = apply_move(s, moves[j]);
        r.moves.push_back(format_move(moves[j]));
        r.states.push_back(format_facelets(s));
      }
      r.cube = format_facelets(s);
      out.push_back(std::move(r));
    };
    std::string first = std::string(i == 0 ? "Here we perform " : "Next we perform ") + rotations(placed_at) + ". " +
                        describe_effect(target);
    if (placed_at == moves.size()) {
      if (last) first += " Solved!";
      play(0, moves.size(), std::move(first));
    } else {
      play(0, placed_at, std::move(first));
      const std::size_t rest = moves.size() - placed_at;
      play(placed_at, moves.size(),
           "We perform " + rotations(rest) +
               (last ? " to solve the " + goal_text(state.goal) + ". Solved!" : " to put the other cubelets back."));
    }
  }
  state.cube = s;
  state.plan.reset();
  state.last_topic = Topic::Taught;
  return out;
}

}  // namespace

std::string_view to_string(IntentKind k) {
  switch (k) {
    case IntentKind::TeachGoal: return "teach_goal";
    case IntentKind::ContinueTeaching: return "continue_teaching";
    case IntentKind::AskOtherUser: return "ask_other_user";
    case IntentKind::AskOwnSummary: return "ask_own_summary";
    case IntentKind::Affirm: return "affirm";
    case IntentKind::Deny: return "deny";
    case IntentKind::Smalltalk: return "smalltalk";
    case IntentKind::EditCube: return "edit_cube";
    case IntentKind::Unknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(ResponseKind k) {
  switch (k) {
    case ResponseKind::Answer: return "answer";
    case ResponseKind::Warning: return "warning";
    case ResponseKind::Refusal: return "refusal";
    case ResponseKind::Encouragement: return "encouragement";
    case ResponseKind::Summary: return "summary";
    case ResponseKind::TeachingStep: return "teaching-step";
  }
  return "answer";
}

Intent classify_intent(const Utterance& u, const std::vector<std::string>& other_usernames,
                       const AbuseLexicon& abuse) {
  Intent in;
  const AbuseResult a = detect_abuse(u, abuse);
  in.abusive = a.flag;
  in.abusive_terms = a.matched;
  const Tokens w{u.tokens};

  for (const auto& token : u.tokens) {
    const std::string name = strip_possessive(token);
    for (const auto& user : other_usernames)
      if (!user.empty() && lower(user) == name) {
        in.target = user;
        break;
      }
    if (!in.target.empty()) break;
  }
  const auto metric = metric_of(w);
  if (!in.target.empty() && metric) {
    in.kind = IntentKind::AskOtherUser;
    in.metric = *metric;
    return in;
  }
  in.target.clear();

  if (w.has("summary") || w.seq({"how", "am", "i", "doing"}) || w.seq({"how", "did", "i", "do"}) ||
      (w.any({"my", "mine"}) && w.any({"performance", "score", "stats", "statistics", "progress", "results"}))) {
    in.kind = IntentKind::AskOwnSummary;
    return in;
  }

  const bool teach_word = w.any({"teach", "show", "learn", "explain"}) || w.seq({"how", "to", "solve"}) ||
                          w.seq({"help", "me", "solve"});
  if (const auto goal = goal_of(w); teach_word && goal) {
    in.kind = IntentKind::TeachGoal;
    in.goal = *goal;
    return in;
  }

  if (w.any({"continue", "next", "proceed"}) || w.seq({"go", "on"}) || w.seq({"keep", "going"})) {
    in.kind = IntentKind::ContinueTeaching;
    return in;
  }

  if (w.any({"edit", "recolor", "recolour", "repaint"}) ||
      (w.any({"change", "set", "update"}) && w.any({"cube", "colors", "colours", "stickers"}))) {
    in.kind = IntentKind::EditCube;
    return in;
  }

  if (u.tokens.size() <= 4) {
    if (w.any({"no", "nope", "nah"}) || w.seq({"not", "really"})) {
      in.kind = IntentKind::Deny;
      return in;
    }
    if (w.any({"yes", "yeah", "yep", "sure", "ok", "okay", "alright", "right", "correct", "understood"}) ||
        w.seq({"got", "it"})) {
      in.kind = IntentKind::Affirm;
      return in;
    }
  }
  const bool third_person = w.any({"friend", "friends", "he", "she", "his", "her", "they", "their", "someone",
                                   "somebody", "others", "classmate", "classmates", "everyone"});
  if ((third_person && metric) || w.any({"hi", "hello", "hey", "thanks", "thank", "bye", "goodbye"}) ||
      w.seq({"how", "are", "you"})) {
    in.kind = IntentKind::Smalltalk;
    return in;
  }

  return in;
}

bool valid_profile(const UserProfile& p) {
  return p.score >= 0 && p.games_won >= 0 && p.games_played >= 0 && p.games_won <= p.games_played &&
         (!p.avg_game_minutes || *p.avg_game_minutes >= 0.0);
}

int update_strikes(DialogueState& state, bool abusive) {
  if (!abusive) return 0;
  ++state.strike_count;
  return std::min(state.strike_count, 3);
}

std::string warning_message(int tier) {
  static const std::string t1 = "Please do not use inappropriate language.";
  static const std::string t2 = t1 + " I have been designed to ignore such inputs when repeated.";
  static const std::string t3 = t2 + " I am also reporting our interaction for potential further action.";
  switch (tier) {
    case 1: return t1;
    case 2: return t2;
    case 3: return t3;
    default: throw std::out_of_range("warning tier must be 1, 2 or 3");
  }
}

GuardDecision guard_leakage(const Intent& intent, std::string_view, const ProfileSource&) {
  if (intent.kind == IntentKind::AskOtherUser) return {false, std::string(kLeakageRefusal)};
  return {true, {}};
}

std::string summarize_performance(const std::optional<UserProfile>& profile) {
  if (!profile) return "I do not have any games recorded for you yet. Play a game and ask me again.";
  std::string avg = "n/a";
  if (profile->games_played > 0 && profile->avg_game_minutes) {
    const double m = *profile->avg_game_minutes;
    char buf[32];
    if (std::abs(m - std::round(m)) < 1e-9)
      std::snprintf(buf, sizeof buf, "%lld minutes", static_cast<long long>(std::llround(m)));
    else
      std::snprintf(buf, sizeof buf, "%.1f minutes", m);
    avg = buf;
  }
  return "Total games played: " + std::to_string(profile->games_played) +
         "\nAverage time taken for a single game: " + avg +
         "\nTotal games won: " + std::to_string(profile->games_won);
}

TurnRecord respond(DialogueState& state, std::string_view text, const DialogueServices& sv) {
  if (!sv.valence || !sv.abuse || !sv.templates || !sv.profiles)
    throw std::invalid_argument("dialogue services are incomplete");
  TurnRecord rec;
  const Utterance u = normalize(text);
  rec.sentiment = score_sentiment(u, *sv.valence);
  state.sentiment_history.push_back(rec.sentiment.label);

  std::vector<std::string> others;
  for (auto& name : sv.profiles->usernames())
    if (lower(name) != lower(state.user_id)) others.push_back(std::move(name));
  rec.intent = classify_intent(u, others, *sv.abuse);

  rec.tier = update_strikes(state, rec.intent.abusive);
  if (rec.tier > 0) {
    rec.responses.push_back({ResponseKind::Warning, warning_message(rec.tier), {}, {}, {}});
    if (rec.tier == 3 && sv.report) sv.report({state.session_id, state.user_id, state.strike_count, u.raw, true});
    return rec;
  }
  if (rec.sentiment.label == SentimentLabel::Negative)
    rec.responses.push_back({ResponseKind::Encouragement, std::string(kEncouragement), {}, {}, {}});

  const GuardDecision guard = guard_leakage(rec.intent, state.user_id, *sv.profiles);
  if (!guard.allow) {
    rec.responses.push_back({ResponseKind::Refusal, guard.refusal, {}, {}, {}});
    return rec;
  }

  auto answer = [&](std::string t) { rec.responses.push_back({ResponseKind::Answer, std::move(t), {}, {}, {}}); };
  switch (rec.intent.kind) {
    case IntentKind::AskOwnSummary: {
      const auto profile = sv.profiles->find(state.user_id);
      rec.responses.push_back({ResponseKind::Summary,
                               profile ? "Sure. Here is your summary.\n" + summarize_performance(profile)
                                       : summarize_performance(std::nullopt),
                               {}, {}, {}});
      break;
    }
    case IntentKind::TeachGoal:
      state.goal = rec.intent.goal;
      rec.responses.push_back(teach_description(state, sv));
      break;
    case IntentKind::ContinueTeaching:
      for (auto& r : teach_steps(state, sv)) rec.responses.push_back(std::move(r));
      break;
    case IntentKind::Deny:
      if (state.last_topic == Topic::Described && state.plan) {
        for (auto& r : teach_steps(state, sv)) rec.responses.push_back(std::move(r));
      } else {
        answer("Okay.");
      }
      break;
    case IntentKind::Affirm:
      answer(state.last_topic == Topic::Described
                 ? "Sure, what would you like to know? You can also ask me to continue teaching."
                 : "Okay.");
      break;
    case IntentKind::EditCube:
      answer("You can change the colors in the cube editor. I will explain the new configuration once you submit it.");
      break;
    case IntentKind::Smalltalk:
      answer("Hello! I am your cube tutor. Ask me to teach you the white cross whenever you are ready.");
      break;
    case IntentKind::AskOtherUser:
    case IntentKind::Unknown:
      answer(std::string(kReprompt));
      break;
  }
  return rec;
}

}  // namespace cubetutor
