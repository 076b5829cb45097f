#include "cubetutor/sentiment.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cubetutor {

namespace {

constexpr std::array<std::string_view, 11> kNegators = {"not",     "no",    "never",   "none",    "nobody", "nothing",
                                                        "neither", "nor",   "without", "cannot",  "nowhere"};
constexpr std::array<std::string_view, 16> kBoosters = {
    "very",       "really", "extremely", "so",    "too",      "totally", "absolutely", "incredibly",
    "completely", "super",  "highly",    "utterly", "truly", "especially", "awfully",  "hugely"};

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename Fn>
void for_lines(std::string_view text, Fn&& fn) {
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    fn(line, number);
  }
}

}  // namespace

Utterance normalize(std::string_view text) {
  Utterance u;
  u.raw = std::string(text);
  std::string cur;
  auto flush = [&] {
    while (!cur.empty() && (cur.back() == '\'' || cur.back() == '-')) cur.pop_back();
    if (!cur.empty()) u.tokens.push_back(cur);
    cur.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\xE2' && i + 2 < text.size() && text[i + 1] == '\x80' && text[i + 2] == '\x99') {
      c = '\'';  // typographic apostrophe
      i += 2;
    }
    if (word_char(c)) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if ((c == '\'' || c == '-') && !cur.empty()) {
      cur += c;
    } else {
      flush();
    }
  }
  flush();
  return u;
}

std::string_view to_string(SentimentLabel l) {
  switch (l) {
    case SentimentLabel::Negative: return "negative";
    case SentimentLabel::Neutral: return "neutral";
    case SentimentLabel::Positive: return "positive";
  }
  return "neutral";
}

SentimentLabel label_for(double intensity) {
  if (intensity >= kLabelThreshold) return SentimentLabel::Positive;
  if (intensity <= -kLabelThreshold) return SentimentLabel::Negative;
  return SentimentLabel::Neutral;
}

ValenceLexicon::ValenceLexicon(std::unordered_map<std::string, double> entries) : entries_(std::move(entries)) {}

ValenceLexicon ValenceLexicon::parse(std::string_view text) {
  std::unordered_map<std::string, double> entries;
  for_lines(text, [&](const std::string& line, int number) {
    auto fail = [&](const std::string& why) {
      throw std::runtime_error("valence lexicon line " + std::to_string(number) + ": " + why);
    };
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) fail("expected token<TAB>valence");
    const std::string token = line.substr(0, tab);
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(line.substr(tab + 1), &used);
      if (line.find_first_not_of(" \t", tab + 1 + used) != std::string::npos) fail("trailing text after valence");
    } catch (const std::logic_error&) {
      fail("valence is not a number");
    }
    if (!(v >= -4.0 && v <= 4.0)) fail("valence outside [-4, 4]");
    const Utterance norm = normalize(token);
    if (norm.tokens.size() != 1 || norm.tokens[0] != token) fail("token must be a single normalized word");
    if (!entries.emplace(token, v).second) fail("duplicate token " + token);
  });
  return ValenceLexicon(std::move(entries));
}

ValenceLexicon ValenceLexicon::load(const std::filesystem::path& path) { return parse(read_file(path)); }

double ValenceLexicon::valence(std::string_view token) const {
  const auto it = entries_.find(std::string(token));
  return it == entries_.end() ? 0.0 : it->second;
}

bool ValenceLexicon::contains(std::string_view token) const { return entries_.contains(std::string(token)); }

bool is_negator(std::string_view token) {
  if (std::find(kNegators.begin(), kNegators.end(), token) != kNegators.end()) return true;
  return token.size() > 3 && token.substr(token.size() - 3) == "n't";
}

bool is_booster(std::string_view token) {
  return std::find(kBoosters.begin(), kBoosters.end(), token) != kBoosters.end();
}

SentimentResult score_sentiment(const Utterance& u, const ValenceLexicon& lexicon) {
  const auto& t = u.tokens;
  double sum = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    double v = lexicon.valence(t[i]);
    if (v == 0.0) continue;
    int boosters = 0;
    for (std::size_t j = i; j > 0 && is_booster(t[j - 1]); --j) ++boosters;
    v *= 1.0 + kBoosterStep * boosters;
    bool negated = false;
    for (std::size_t j = i; j > 0 && i - j < static_cast<std::size_t>(kNegationWindow); --j)
      if (is_negator(t[j - 1])) negated = !negated;
    sum += negated ? -v : v;
  }
  SentimentResult r;
  r.intensity = sum / std::sqrt(sum * sum + kNormalizationAlpha);
  r.label = label_for(r.intensity);
  return r;
}

AbuseLexicon AbuseLexicon::parse(std::string_view text) {
  AbuseLexicon lex;
  for_lines(text, [&](const std::string& line, int number) {
    Utterance u = normalize(line);
    if (u.tokens.empty()) throw std::runtime_error("abuse lexicon line " + std::to_string(number) + ": no term");
    lex.phrases_.push_back(std::move(u.tokens));
  });
  return lex;
}

AbuseLexicon AbuseLexicon::load(const std::filesystem::path& path) { return parse(read_file(path)); }

AbuseResult detect_abuse(const Utterance& u, const AbuseLexicon& lexicon) {
  AbuseResult r;
  const auto& t = u.tokens;
  for (const auto& phrase : lexicon.phrases()) {
    if (phrase.size() > t.size()) continue;
    for (std::size_t i = 0; i + phrase.size() <= t.size(); ++i) {
      if (!std::equal(phrase.begin(), phrase.end(), t.begin() + static_cast<std::ptrdiff_t>(i))) continue;
      std::string joined;
      for (const auto& w : phrase) joined += (joined.empty() ? "" : " ") + w;
      r.matched.push_back(std::move(joined));
      break;
    }
  }
  r.flag = !r.matched.empty();
  return r;
}

}  // namespace cubetutor
