#include <cmath>
#include <map>

#include "doctest.h"

#include "cubetutor/dialogue.hpp"

using namespace cubetutor;

namespace {

struct Fixture {
  ValenceLexicon valence = ValenceLexicon::load("data/valence.tsv");
  AbuseLexicon abuse = AbuseLexicon::load("data/abuse.txt");
  TemplateSet templates = TemplateSet::load("data/templates.tsv");
  MacroLibrary library = load_library("data/white_cross_library.json");
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

class MapProfiles : public ProfileSource {
 public:
  std::map<std::string, UserProfile> profiles;
  std::optional<UserProfile> find(std::string_view id) const override {
    const auto it = profiles.find(std::string(id));
    if (it == profiles.end()) return std::nullopt;
    return it->second;
  }
  std::vector<std::string> usernames() const override {
    std::vector<std::string> out;
    for (const auto& [k, v] : profiles) out.push_back(k);
    return out;
  }
};

MapProfiles table_profiles() {
  MapProfiles p;
  p.profiles["alex"] = {"alex", "female", 340, 8, "beginner", 12, 10.0, "student"};
  p.profiles["John"] = {"John", "male", 910, 30, "expert", 41, 6.5, "student"};
  return p;
}

DialogueServices services(const ProfileSource& profiles, std::vector<StrikeReport>* reports = nullptr) {
  DialogueServices s;
  s.valence = &fx().valence;
  s.abuse = &fx().abuse;
  s.templates = &fx().templates;
  s.libraries["white-cross"] = &fx().library;
  s.profiles = &profiles;
  if (reports) s.report = [reports](const StrikeReport& r) { reports->push_back(r); };
  return s;
}

CubeState worked_state() { return apply_sequence(solved_state(), parse_moves("F' R' F D")); }

const std::vector<std::string> kTable = {
    "Can you teach me how to solve the goddamn White Cross?",
    "Go to hell",
    "Ok. Can you teach me White Cross?",
    "I did not understand a thing, you idiot.",
    "I am sorry. Please continue teaching.",
    "Was my friend, John, able to perform this move successfully?",
    "Ok. Can I get a summary of my performance till this point?",
};

SentimentLabel label(std::string_view text) { return score_sentiment(normalize(text), fx().valence).label; }

}  // namespace

TEST_CASE("normalization") {
  CHECK(normalize("Was my friend, John, able?").tokens ==
        std::vector<std::string>{"was", "my", "friend", "john", "able"});
  CHECK(normalize("I didn't move the white-orange edge").tokens ==
        std::vector<std::string>{"i", "didn't", "move", "the", "white-orange", "edge"});
  CHECK(normalize("'quoted' -- dash-").tokens == std::vector<std::string>{"quoted", "dash"});
  CHECK(normalize("It\xE2\x80\x99s fine").tokens == std::vector<std::string>{"it's", "fine"});
  CHECK(normalize("").tokens.empty());
  CHECK(normalize("  ?! ").tokens.empty());
}

TEST_CASE("sentiment labels of the reference conversation") {
  const std::vector<SentimentLabel> expected = {SentimentLabel::Negative, SentimentLabel::Negative,
                                                SentimentLabel::Neutral,  SentimentLabel::Negative,
                                                SentimentLabel::Neutral,  SentimentLabel::Neutral,
                                                SentimentLabel::Neutral};
  for (std::size_t i = 0; i < kTable.size(); ++i) CHECK(label(kTable[i]) == expected[i]);
  const auto empty = score_sentiment(normalize(""), fx().valence);
  CHECK(empty.label == SentimentLabel::Neutral);
  CHECK(empty.intensity == 0.0);
  CHECK(label("this is hopeless") == SentimentLabel::Negative);
}

TEST_CASE("sentiment rules") {
  const ValenceLexicon lex({{"happy", 2.0}, {"sad", -1.0}});
  auto intensity = [&](std::string_view t) { return score_sentiment(normalize(t), lex).intensity; };
  auto norm = [](double s) { return s / std::sqrt(s * s + 15.0); };
  CHECK(intensity("happy") == doctest::Approx(norm(2.0)).epsilon(1e-12));
  CHECK(intensity("very happy") == doctest::Approx(norm(2.5)).epsilon(1e-12));
  CHECK(intensity("really very happy") == doctest::Approx(norm(3.0)).epsilon(1e-12));
  CHECK(intensity("not happy") == doctest::Approx(norm(-2.0)).epsilon(1e-12));
  CHECK(intensity("not at all happy") == doctest::Approx(norm(-2.0)).epsilon(1e-12));
  CHECK(intensity("not a single bit happy") == doctest::Approx(norm(2.0)).epsilon(1e-12));
  CHECK(intensity("isn't sad") == doctest::Approx(norm(1.0)).epsilon(1e-12));
  CHECK(intensity("happy sad") == doctest::Approx(norm(1.0)).epsilon(1e-12));
  CHECK(label_for(0.05) == SentimentLabel::Positive);
  CHECK(label_for(0.0499) == SentimentLabel::Neutral);
  CHECK(label_for(-0.05) == SentimentLabel::Negative);
  for (const char* t : {"happy", "very very very happy happy happy", "sad sad sad sad sad"})
    CHECK(std::abs(intensity(t)) < 1.0);

  CHECK_THROWS_AS(ValenceLexicon::parse("happy 2"), std::runtime_error);
  CHECK_THROWS_AS(ValenceLexicon::parse("happy\t9"), std::runtime_error);
  CHECK_THROWS_AS(ValenceLexicon::parse("happy\tx"), std::runtime_error);
  CHECK_THROWS_AS(ValenceLexicon::parse("Happy\t1"), std::runtime_error);
  CHECK_THROWS_AS(ValenceLexicon::parse("happy\t1\nhappy\t2"), std::runtime_error);
  CHECK(ValenceLexicon::parse("# c\nhappy\t1.5\n").valence("happy") == 1.5);
}

TEST_CASE("abuse detection") {
  auto flagged = [](std::string_view t) { return detect_abuse(normalize(t), fx().abuse).flag; };
  CHECK(flagged(kTable[0]));
  CHECK(flagged(kTable[1]));
  CHECK(flagged(kTable[3]));
  CHECK_FALSE(flagged("Please continue teaching."));
  CHECK_FALSE(flagged(kTable[4]));
  CHECK_FALSE(flagged("the shell of the dumbbell"));
  CHECK_FALSE(flagged("go to the hall"));
  CHECK(detect_abuse(normalize("you idiot, go to hell"), fx().abuse).matched ==
        std::vector<std::string>{"idiot", "go to hell"});
  CHECK_THROWS_AS(AbuseLexicon::parse("ok\n ?? \n"), std::runtime_error);
}

TEST_CASE("intent classification") {
  const std::vector<std::string> users = {"John", "mary"};
  auto intent = [&](std::string_view t) { return classify_intent(normalize(t), users, fx().abuse); };

  const Intent u6 = intent(kTable[5]);
  CHECK(u6.kind == IntentKind::AskOtherUser);
  CHECK(u6.target == "John");
  CHECK(u6.metric == "move-success");
  CHECK(intent("What is mary's score?").kind == IntentKind::AskOtherUser);
  CHECK(intent(kTable[6]).kind == IntentKind::AskOwnSummary);
  const Intent u3 = intent(kTable[2]);
  CHECK(u3.kind == IntentKind::TeachGoal);
  CHECK(u3.goal == "white-cross");
  const Intent u1 = intent(kTable[0]);
  CHECK(u1.kind == IntentKind::TeachGoal);
  CHECK(u1.abusive);
  CHECK(intent(kTable[4]).kind == IntentKind::ContinueTeaching);
  CHECK(intent("Was my friend able to perform this move?").kind == IntentKind::Smalltalk);
  CHECK(intent("Say hello to John").kind == IntentKind::Smalltalk);
  CHECK(intent("yes").kind == IntentKind::Affirm);
  CHECK(intent("no thanks").kind == IntentKind::Deny);
  CHECK(intent("I want to change the cube colors").kind == IntentKind::EditCube);
  CHECK(intent("purple elephants").kind == IntentKind::Unknown);
  CHECK(intent("Teach me to solve the whole cube").goal == "solved");
  CHECK(classify_intent(normalize("What is John's score?"), {"mary"}, fx().abuse).kind != IntentKind::AskOtherUser);
}

TEST_CASE("strikes and warnings") {
  DialogueState s;
  CHECK(update_strikes(s, false) == 0);
  CHECK(s.strike_count == 0);
  CHECK(update_strikes(s, true) == 1);
  CHECK(update_strikes(s, false) == 0);
  CHECK(update_strikes(s, true) == 2);
  CHECK(update_strikes(s, true) == 3);
  CHECK(update_strikes(s, true) == 3);
  CHECK(s.strike_count == 4);

  CHECK(warning_message(1) == "Please do not use inappropriate language.");
  CHECK(warning_message(2) ==
        "Please do not use inappropriate language. I have been designed to ignore such inputs when repeated.");
  CHECK(warning_message(3) ==
        "Please do not use inappropriate language. I have been designed to ignore such inputs when repeated. I am "
        "also reporting our interaction for potential further action.");
  CHECK_THROWS_AS(warning_message(0), std::out_of_range);
  CHECK_THROWS_AS(warning_message(4), std::out_of_range);
}

TEST_CASE("leakage guard and summaries") {
  const MapProfiles profiles = table_profiles();
  Intent other;
  other.kind = IntentKind::AskOtherUser;
  other.target = "John";
  const GuardDecision known = guard_leakage(other, "alex", profiles);
  CHECK_FALSE(known.allow);
  CHECK(known.refusal ==
        "Any answer to your query will lead to release of private information of others. Hence, I am not able to "
        "answer at this time.");
  other.target = "nobody-by-this-name";
  CHECK(guard_leakage(other, "alex", profiles).refusal == known.refusal);
  Intent own;
  own.kind = IntentKind::AskOwnSummary;
  CHECK(guard_leakage(own, "alex", profiles).allow);

  const std::string summary = summarize_performance(profiles.find("alex"));
  CHECK(summary ==
        "Total games played: 12\nAverage time taken for a single game: 10 minutes\nTotal games won: 8");
  CHECK(summary.find("female") == std::string::npos);
  CHECK(summary.find("beginner") == std::string::npos);
  UserProfile fresh{"new", "", 0, 0, "", 0, std::nullopt, "student"};
  CHECK(summarize_performance(fresh) ==
        "Total games played: 0\nAverage time taken for a single game: n/a\nTotal games won: 0");
  UserProfile half = fresh;
  half.games_played = 2;
  half.avg_game_minutes = 7.5;
  CHECK(summarize_performance(half).find("7.5 minutes") != std::string::npos);
  CHECK(summarize_performance(std::nullopt).find("Total") == std::string::npos);
  CHECK(valid_profile(fresh));
  UserProfile bad = fresh;
  bad.games_won = 3;
  CHECK_FALSE(valid_profile(bad));
}

TEST_CASE("reference conversation replay") {
  const MapProfiles profiles = table_profiles();
  std::vector<StrikeReport> reports;
  const DialogueServices sv = services(profiles, &reports);
  DialogueState st;
  st.session_id = "s1";
  st.user_id = "alex";
  st.cube = worked_state();

  std::vector<TurnRecord> turns;
  for (const auto& u : kTable) turns.push_back(respond(st, u, sv));
  REQUIRE(turns.size() == 7);
  auto only = [&](std::size_t i, ResponseKind kind, const std::string& text) {
    REQUIRE(turns[i].responses.size() == 1);
    CHECK(turns[i].responses[0].kind == kind);
    CHECK(turns[i].responses[0].text == text);
  };
  only(0, ResponseKind::Warning, warning_message(1));
  only(1, ResponseKind::Warning, warning_message(2));
  only(2, ResponseKind::Answer,
       "Yes. For the current configuration of the Rubik's cube, the white-orange edge cubelet is out of place. The "
       "white side of the edge cubelet is aligned with the orange center cubelet and the orange side of the edge "
       "cubelet is aligned with the yellow center cubelet.\nDo you have any questions?");
  only(3, ResponseKind::Warning, warning_message(3));
  REQUIRE(turns[4].responses.size() == 2);
  CHECK(turns[4].responses[0].kind == ResponseKind::TeachingStep);
  CHECK(turns[4].responses[0].text == "Here we perform three rotations of the faces. White-orange cubelet is aligned.");
  CHECK(turns[4].responses[1].text == "We perform one rotation of the face to solve the white cross. Solved!");
  CHECK(turns[4].responses[0].moves.size() == 3);
  CHECK(turns[4].responses[1].moves.size() == 1);
  CHECK(turns[4].responses[1].states.back() == format_facelets(st.cube));
  CHECK(matches(st.cube, PartialGoal::white_cross()));
  only(5, ResponseKind::Refusal, std::string(kLeakageRefusal));
  only(6, ResponseKind::Summary,
       "Sure. Here is your summary.\nTotal games played: 12\nAverage time taken for a single game: 10 minutes\n"
       "Total games won: 8");

  CHECK(st.strike_count == 3);
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].strike_count == 3);
  CHECK(reports[0].utterance == kTable[3]);
  CHECK(reports[0].teacher_visible);
  CHECK(st.sentiment_history.size() == 7);

  // same inputs, same outputs
  DialogueState again;
  again.session_id = "s1";
  again.user_id = "alex";
  again.cube = worked_state();
  for (std::size_t i = 0; i < kTable.size(); ++i) {
    const TurnRecord r = respond(again, kTable[i], sv);
    REQUIRE(r.responses.size() == turns[i].responses.size());
    for (std::size_t k = 0; k < r.responses.size(); ++k) CHECK(r.responses[k].text == turns[i].responses[k].text);
  }
}

TEST_CASE("policy details") {
  const MapProfiles profiles = table_profiles();
  const DialogueServices sv = services(profiles);
  DialogueState st;
  st.user_id = "alex";

  const TurnRecord sad = respond(st, "this is hopeless", sv);
  REQUIRE(sad.responses.size() == 2);
  CHECK(sad.responses[0].kind == ResponseKind::Encouragement);
  CHECK(sad.responses[1].text == kReprompt);

  CHECK(respond(st, "Please continue teaching.", sv).responses[0].text.starts_with("Ask me to teach"));
  CHECK(respond(st, "Can you teach me the white cross?", sv).responses[0].text.find("already solved") !=
        std::string::npos);
  CHECK(respond(st, "Can you teach me to solve the whole cube?", sv).responses[0].text.find("I can teach: white "
                                                                                           "cross") !=
        std::string::npos);

  // a rotated copy of the worked case is described and solved in its own frame
  DialogueState rot;
  rot.user_id = "alex";
  for (int frame = 1; frame < 4; ++frame) {
    rot.cube = transform_state(worked_state(), frame);
    const TurnRecord d = respond(rot, "Teach me the white cross", sv);
    REQUIRE(d.responses.size() == 1);
    CHECK(d.responses[0].text.find("is out of place") != std::string::npos);
    const TurnRecord t = respond(rot, "no", sv);
    REQUIRE(!t.responses.empty());
    CHECK(t.responses.back().text.ends_with("Solved!"));
    CHECK(matches(rot.cube, PartialGoal::white_cross()));
  }

  // a swap in the cube between description and continuation invalidates the plan
  DialogueState moved;
  moved.user_id = "alex";
  moved.cube = worked_state();
  respond(moved, "Teach me the white cross", sv);
  moved.cube = solved_state();
  CHECK(respond(moved, "continue", sv).responses[0].text.starts_with("Ask me to teach"));

  // a profile-less requester gets an onboarding prompt, not someone else's data
  DialogueState stranger;
  stranger.user_id = "zoe";
  const TurnRecord s = respond(stranger, "Can I get a summary of my performance?", sv);
  REQUIRE(s.responses.size() == 1);
  CHECK(s.responses[0].text.find("Total games") == std::string::npos);
}
