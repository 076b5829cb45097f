#pragma once

// Lexicon sentiment scoring and abusive-language detection.
//
// Normalization lowercases, keeps letters, digits, '_' and word-internal
// apostrophes and hyphens, and splits on everything else, so "didn't" and
// "white-orange" stay single tokens while "John," becomes "john".
//
// Scoring sums token valences. A negator flips the sign of valences in the
// next three tokens; each booster directly before a valence token (or before
// another booster in front of it) adds 25% of that token's magnitude. The
// sum s is normalized to s / sqrt(s^2 + 15); intensity >= 0.05 is positive,
// <= -0.05 negative, anything between neutral.

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace cubetutor {

struct Utterance {
  std::string raw;
  std::vector<std::string> tokens;
};

Utterance normalize(std::string_view text);

enum class SentimentLabel { Negative, Neutral, Positive };
std::string_view to_string(SentimentLabel l);

struct SentimentResult {
  SentimentLabel label = SentimentLabel::Neutral;
  double intensity = 0.0;  // [-1, 1]
};

inline constexpr double kNormalizationAlpha = 15.0;
inline constexpr double kLabelThreshold = 0.05;
inline constexpr double kBoosterStep = 0.25;
inline constexpr int kNegationWindow = 3;

SentimentLabel label_for(double intensity);

class ValenceLexicon {
 public:
  ValenceLexicon() = default;
  explicit ValenceLexicon(std::unordered_map<std::string, double> entries);
  /// `token<TAB>valence` per line, valence in [-4, 4]; '#' comments.
  /// Throws std::runtime_error naming the line on malformed input.
  static ValenceLexicon parse(std::string_view text);
  static ValenceLexicon load(const std::filesystem::path& path);

  double valence(std::string_view token) const;
  bool contains(std::string_view token) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, double> entries_;
};

bool is_negator(std::string_view token);
bool is_booster(std::string_view token);

SentimentResult score_sentiment(const Utterance& u, const ValenceLexicon& lexicon);

class AbuseLexicon {
 public:
  AbuseLexicon() = default;
  /// One term or phrase per line, '#' comments. Phrases are normalized like
  /// utterances and match as consecutive tokens.
  static AbuseLexicon parse(std::string_view text);
  static AbuseLexicon load(const std::filesystem::path& path);
  const std::vector<std::vector<std::string>>& phrases() const { return phrases_; }

 private:
  std::vector<std::vector<std::string>> phrases_;
};

struct AbuseResult {
  bool flag = false;
  std::vector<std::string> matched;  // in lexicon order
};

AbuseResult detect_abuse(const Utterance& u, const AbuseLexicon& lexicon);

}  // namespace cubetutor
