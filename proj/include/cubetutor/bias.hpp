#pragma once

// Sentiment-scorer bias audit over templated sentences: per-template gender
// instability, backdoor-adjusted expectations (DIE%), Welch t-test rejection
// counts (WRS) and ratings from raw scores.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace cubetutor {

struct CorpusTemplate {
  std::string id;
  std::string text;  // exactly one {person} and one {emotion}
};

struct PersonVariable {
  std::string text;
  std::string gender;
};

struct EmotionWord {
  std::string word;
  std::string category;
};

struct TemplateCorpus {
  std::vector<CorpusTemplate> templates;
  std::vector<PersonVariable> persons;
  std::vector<EmotionWord> emotions;
};

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws CorpusError unless the text has exactly one of each slot.
void check_template(const CorpusTemplate& t);

/// CSV with header template_id,template,person,gender,emotion_word,emotion_category.
/// Templates, persons and emotions are collected in order of first appearance.
TemplateCorpus parse_corpus_csv(std::string_view text);
TemplateCorpus load_corpus_csv(const std::filesystem::path& path);
std::string corpus_to_csv(const TemplateCorpus& corpus);

struct Sentence {
  std::string text;
  std::string template_id;
  std::string person;
  std::string gender;
  std::string emotion;
  std::string category;
};

/// templates x persons x emotions in that nesting order; the first letter of
/// each sentence is capitalized.
std::vector<Sentence> expand_templates(const TemplateCorpus& corpus);

/// Scorer contract: text to a score in [-1, 1], nullopt on failure.
using SentimentScorer = std::function<std::optional<double>(std::string_view)>;

struct ScoredSentence {
  Sentence sentence;
  std::optional<double> score;
  std::string system;
};

/// Scores every sentence (in parallel); order follows the input.
std::vector<ScoredSentence> score_all(const SentimentScorer& scorer, std::string_view system,
                                      const std::vector<Sentence>& sentences);

struct GroupMean {
  double mean = 0.0;
  std::size_t count = 0;
  std::size_t missing = 0;
};

struct TemplateInstability {
  std::string template_id;
  std::map<std::string, GroupMean> by_gender;
  std::optional<double> delta;  // |mean(male) - mean(female)| when both exist
  bool flagged = false;
};

struct InstabilityReport {
  std::vector<TemplateInstability> templates;  // corpus template order
  double threshold = 0.05;
};

InstabilityReport instability_matrix(const std::vector<ScoredSentence>& scored, double threshold = 0.05);

/// Joint counts over (X emotion word, Z protected attribute, Y class index).
class ContingencyData {
 public:
  void add(const std::string& x, const std::string& z, int y, std::uint64_t count = 1);
  std::uint64_t count(const std::string& x, const std::string& z, int y) const;
  std::uint64_t total() const { return total_; }
  std::vector<std::string> xs() const;
  std::vector<std::string> zs() const;
  int y_classes() const { return y_classes_; }
  const std::map<std::tuple<std::string, std::string, int>, std::uint64_t>& cells() const { return cells_; }

 private:
  std::map<std::tuple<std::string, std::string, int>, std::uint64_t> cells_;
  std::uint64_t total_ = 0;
  int y_classes_ = 0;
};

/// Default Y values for {negative, neutral, positive}.
inline const std::vector<double> kDefaultYValues = {0.0, 0.5, 1.0};

/// X = emotion word, Z = gender, Y = sentiment class of the score
/// (thresholds of the lexicon scorer). Unscored sentences are skipped.
ContingencyData contingency_from_scores(const std::vector<ScoredSentence>& scored);

class PositivityViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UndefinedDie : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// E[Y | X = x]. Throws std::invalid_argument when x never occurs.
double conditional_expectation(const ContingencyData& data, const std::string& x, const std::vector<double>& y_values);
/// E[Y | do(X = x)] = sum_j y_j sum_z P(Y = j | x, z) P(z).
double do_expectation(const ContingencyData& data, const std::string& x, const std::vector<double>& y_values);
/// |do - conditional| / |conditional| * 100; UndefinedDie when conditional is 0,
/// PositivityViolation as for do_expectation.
double die_percent(const ContingencyData& data, const std::string& x, const std::vector<double>& y_values);

struct DieSummary {
  std::map<std::string, double> per_x;
  std::vector<std::string> undefined;  // x values excluded from the mean
  double mean = 0.0;                   // over defined x values
};

DieSummary die_summary(const ContingencyData& data, const std::vector<double>& y_values = kDefaultYValues);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
  bool reject = false;
};

/// Two-sided unequal-variance t-test; reject iff p < 1 - confidence.
/// Throws std::invalid_argument for groups smaller than 2 or confidence
/// outside (0, 1). Two zero-variance groups give p = 1 for equal means and
/// p = 0 otherwise.
WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b, double confidence);

inline constexpr double kConfidenceLevels[3] = {0.95, 0.70, 0.60};
inline constexpr double kWrsWeights[3] = {1.0, 0.8, 0.6};

struct RejectionCounts {
  std::uint64_t at95 = 0, at70 = 0, at60 = 0;
};

double wrs(const RejectionCounts& x);

/// Per data group (template), male against female scores at each level.
RejectionCounts rejection_counts(const std::vector<ScoredSentence>& scored);

struct SystemScore {
  std::string system;
  std::string metric;  // "die" or "wrs"
  double score = 0.0;
};

struct RatedSystem {
  std::string system;
  double score = 0.0;
  int rating = 0;
};

struct RatingReport {
  std::string metric;
  std::vector<RatedSystem> systems;  // ascending score, ties by name
};

/// Lower is less biased. Consecutive sorted scores closer than the tolerance
/// share a group; the rating is the group's 1-based rank. Throws
/// std::invalid_argument on an empty input or mixed metrics.
RatingReport rate_systems(std::vector<SystemScore> scores, double tolerance = 1e-6);

/// Scorers used by audits besides the lexicon scorer.
SentimentScorer constant_scorer(double value);
/// +0.2 for sentences naming a male person variable, -0.2 otherwise.
SentimentScorer gender_skewed_scorer(const TemplateCorpus& corpus);

struct SystemAudit {
  std::string system;
  InstabilityReport instability;
  DieSummary die;
  RejectionCounts rejections;
  double wrs = 0.0;
  std::size_t failures = 0;
};

struct AuditReport {
  std::string metric;
  std::vector<SystemAudit> systems;  // input order
  RatingReport rating;
};

/// Throws std::invalid_argument for a metric other than "die" or "wrs".
AuditReport run_audit(const std::vector<Sentence>& sentences,
                      const std::vector<std::pair<std::string, SentimentScorer>>& systems, const std::string& metric);

std::string audit_to_json(const AuditReport& report);

}  // namespace cubetutor
