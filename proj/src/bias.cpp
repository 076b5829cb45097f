#include "cubetutor/bias.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>
#include <boost/tokenizer.hpp>
#include "json.hpp"

#include "cubetutor/sentiment.hpp"

namespace cubetutor {

namespace {

constexpr std::string_view kPersonSlot = "{person}";
constexpr std::string_view kEmotionSlot = "{emotion}";
constexpr const char* kCsvHeader = "template_id,template,person,gender,emotion_word,emotion_category";

std::size_t occurrences(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string_view::npos; pos = text.find(needle, pos + needle.size())) ++n;
  return n;
}

std::string replace_once(std::string text, std::string_view slot, std::string_view value) {
  const auto pos = text.find(slot);
  return text.replace(pos, slot.size(), value);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\\\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

double mean_of(const std::vector<double>& v) {
  // exact for constant samples, which summation would perturb
  if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) return v.front();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

int y_class(double score) {
  switch (label_for(score)) {
    case SentimentLabel::Negative: return 0;
    case SentimentLabel::Neutral: return 1;
    case SentimentLabel::Positive: return 2;
  }
  return 1;
}

double y_value(const std::vector<double>& y_values, int j) {
  if (j < 0 || static_cast<std::size_t>(j) >= y_values.size())
    throw std::invalid_argument("no Y value for class " + std::to_string(j));
  return y_values[static_cast<std::size_t>(j)];
}

}  // namespace

void check_template(const CorpusTemplate& t) {
  if (t.id.empty()) throw CorpusError("template without id");
  if (occurrences(t.text, kPersonSlot) != 1 || occurrences(t.text, kEmotionSlot) != 1)
    throw CorpusError("template " + t.id + " needs exactly one {person} and one {emotion}");
}

TemplateCorpus parse_corpus_csv(std::string_view text) {
  TemplateCorpus corpus;
  std::map<std::string, std::string> template_text, person_gender, emotion_category;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) { throw CorpusError("corpus line " + std::to_string(number) + ": " + why); };
    if (!header) {
      if (line != kCsvHeader) fail(std::string("expected header ") + kCsvHeader);
      header = true;
      continue;
    }
    std::vector<std::string> f;
    try {
      boost::tokenizer<boost::escaped_list_separator<char>> tok(line);
      f.assign(tok.begin(), tok.end());
    } catch (const boost::escaped_list_error& e) {
      fail(e.what());
    }
    if (f.size() != 6) fail("expected 6 fields, got " + std::to_string(f.size()));
    for (const auto& v : f)
      if (v.empty()) fail("empty field");
    const CorpusTemplate t{f[0], f[1]};
    try {
      check_template(t);
    } catch (const CorpusError& e) {
      fail(e.what());
    }
    auto remember = [&](auto& seen, const std::string& key, const std::string& value, const char* what, auto push) {
      const auto [it, fresh] = seen.emplace(key, value);
      if (fresh) push();
      else if (it->second != value) fail(std::string("conflicting ") + what + " for " + key);
    };
    remember(template_text, f[0], f[1], "text", [&] { corpus.templates.push_back(t); });
    remember(person_gender, f[2], f[3], "gender", [&] { corpus.persons.push_back({f[2], f[3]}); });
    remember(emotion_category, f[4], f[5], "category", [&] { corpus.emotions.push_back({f[4], f[5]}); });
  }
  if (!header) throw CorpusError("corpus is empty");
  if (corpus.templates.empty()) throw CorpusError("corpus has no rows");
  return corpus;
}

TemplateCorpus load_corpus_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_corpus_csv(ss.str());
}

std::string corpus_to_csv(const TemplateCorpus& corpus) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& t : corpus.templates)
    for (const auto& p : corpus.persons)
      for (const auto& e : corpus.emotions)
        out += csv_field(t.id) + "," + csv_field(t.text) + "," + csv_field(p.text) + "," + csv_field(p.gender) + "," +
               csv_field(e.word) + "," + csv_field(e.category) + "\n";
  return out;
}

std::vector<Sentence> expand_templates(const TemplateCorpus& corpus) {
  std::vector<Sentence> out;
  out.reserve(corpus.templates.size() * corpus.persons.size() * corpus.emotions.size());
  for (const auto& t : corpus.templates) {
    check_template(t);
    for (const auto& p : corpus.persons)
      for (const auto& e : corpus.emotions) {
        Sentence s{replace_once(replace_once(t.text, kPersonSlot, p.text), kEmotionSlot, e.word),
                   t.id, p.text, p.gender, e.word, e.category};
        if (!s.text.empty()) s.text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s.text[0])));
        out.push_back(std::move(s));
      }
  }
  return out;
}

std::vector<ScoredSentence> score_all(const SentimentScorer& scorer, std::string_view system,
                                      const std::vector<Sentence>& sentences) {
  std::vector<ScoredSentence> out(sentences.size());
  const long n = static_cast<long>(sentences.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    auto& o = out[static_cast<std::size_t>(i)];
    o.sentence = sentences[static_cast<std::size_t>(i)];
    o.system = std::string(system);
    try {
      o.score = scorer(o.sentence.text);
    } catch (...) {
      o.score.reset();  // a throwing scorer counts as a failure
    }
  }
  return out;
}

InstabilityReport instability_matrix(const std::vector<ScoredSentence>& scored, double threshold) {
  InstabilityReport report;
  report.threshold = threshold;
  std::map<std::string, std::size_t> index;
  std::vector<std::map<std::string, double>> sums;
  for (const auto& s : scored) {
    auto [it, fresh] = index.emplace(s.sentence.template_id, report.templates.size());
    if (fresh) {
      report.templates.push_back({s.sentence.template_id, {}, std::nullopt, false});
      sums.emplace_back();
    }
    auto& g = report.templates[it->second].by_gender[s.sentence.gender];
    if (!s.score) {
      ++g.missing;
      continue;
    }
    ++g.count;
    sums[it->second][s.sentence.gender] += *s.score;
  }
  for (std::size_t i = 0; i < report.templates.size(); ++i) {
    auto& t = report.templates[i];
    for (auto& [gender, g] : t.by_gender)
      if (g.count) g.mean = sums[i][gender] / static_cast<double>(g.count);
    const auto m = t.by_gender.find("male");
    const auto f = t.by_gender.find("female");
    if (m != t.by_gender.end() && f != t.by_gender.end() && m->second.count && f->second.count) {
      t.delta = std::abs(m->second.mean - f->second.mean);
      t.flagged = *t.delta > threshold;
    }
  }
  return report;
}

void ContingencyData::add(const std::string& x, const std::string& z, int y, std::uint64_t count) {
  if (y < 0) throw std::invalid_argument("negative Y class");
  if (count == 0) return;
  cells_[{x, z, y}] += count;
  total_ += count;
  y_classes_ = std::max(y_classes_, y + 1);
}

std::uint64_t ContingencyData::count(const std::string& x, const std::string& z, int y) const {
  const auto it = cells_.find({x, z, y});
  return it == cells_.end() ? 0 : it->second;
}

std::vector<std::string> ContingencyData::xs() const {
  std::set<std::string> s;
  for (const auto& [k, _] : cells_) s.insert(std::get<0>(k));
  return {s.begin(), s.end()};
}

std::vector<std::string> ContingencyData::zs() const {
  std::set<std::string> s;
  for (const auto& [k, _] : cells_) s.insert(std::get<1>(k));
  return {s.begin(), s.end()};
}

ContingencyData contingency_from_scores(const std::vector<ScoredSentence>& scored) {
  ContingencyData data;
  for (const auto& s : scored)
    if (s.score) data.add(s.sentence.emotion, s.sentence.gender, y_class(*s.score));
  return data;
}

double conditional_expectation(const ContingencyData& data, const std::string& x, const std::vector<double>& y_values) {
  double weighted = 0.0;
  std::uint64_t n_x = 0;
  for (const auto& [k, c] : data.cells()) {
    if (std::get<0>(k) != x) continue;
    n_x += c;
    weighted += y_value(y_values, std::get<2>(k)) * static_cast<double>(c);
  }
  if (n_x == 0) throw std::invalid_argument("X=" + x + " does not occur");
  return weighted / static_cast<double>(n_x);
}

double do_expectation(const ContingencyData& data, const std::string& x, const std::vector<double>& y_values) {
  std::map<std::string, std::uint64_t> n_z, n_xz;
  std::map<std::string, double> weighted_xz;
  for (const auto& [k, c] : data.cells()) {
    const auto& [kx, kz, ky] = k;
    n_z[kz] += c;
    if (kx != x) continue;
    n_xz[kz] += c;
    weighted_xz[kz] += y_value(y_values, ky) * static_cast<double>(c);
  }
  if (n_xz.empty()) throw std::invalid_argument("X=" + x + " does not occur");
  const double total = static_cast<double>(data.total());
  double e = 0.0;
  for (const auto& [z, nz] : n_z) {
    const auto it = n_xz.find(z);
    if (it == n_xz.end()) throw PositivityViolation("positivity violated: no data for X=" + x + ", Z=" + z);
    e += (weighted_xz[z] / static_cast<double>(it->second)) * (static_cast<double>(nz) / total);
  }
  return e;
}

double die_percent(const ContingencyData& data, const std::string& x, const std::vector<double>& y_values) {
  const double cond = conditional_expectation(data, x, y_values);
  if (cond == 0.0) throw UndefinedDie("DIE undefined for X=" + x + ": E[Y|X] is 0");
  // do - cond = sum_z (P(z) - P(z|x)) E[Y|x,z]; the weight difference is exactly 0 when Z is independent of X
  std::map<std::string, std::uint64_t> n_z, n_xz;
  std::map<std::string, double> weighted_xz;
  std::uint64_t n_x = 0;
  for (const auto& [k, c] : data.cells()) {
    const auto& [kx, kz, ky] = k;
    n_z[kz] += c;
    if (kx != x) continue;
    n_x += c;
    n_xz[kz] += c;
    weighted_xz[kz] += y_value(y_values, ky) * static_cast<double>(c);
  }
  // weights over the common denominator N * N_x, numerators in exact integers
  const auto total = static_cast<__int128>(data.total());
  double diff = 0.0;
  for (const auto& [z, nz] : n_z) {
    const auto it = n_xz.find(z);
    if (it == n_xz.end()) throw PositivityViolation("positivity violated: no data for X=" + x + ", Z=" + z);
    const __int128 num = static_cast<__int128>(nz) * n_x - static_cast<__int128>(it->second) * total;
    diff += static_cast<double>(num) * (weighted_xz[z] / static_cast<double>(it->second));
  }
  diff /= static_cast<double>(data.total()) * static_cast<double>(n_x);
  return std::abs(diff) / std::abs(cond) * 100.0;
}

DieSummary die_summary(const ContingencyData& data, const std::vector<double>& y_values) {
  DieSummary s;
  double sum = 0.0;
  for (const auto& x : data.xs()) {
    try {
      const double d = die_percent(data, x, y_values);
      s.per_x[x] = d;
      sum += d;
    } catch (const UndefinedDie&) {
      s.undefined.push_back(x);
    }
  }
  if (!s.per_x.empty()) s.mean = sum / static_cast<double>(s.per_x.size());
  return s;
}

WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b, double confidence) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("t-test needs at least 2 samples per group");
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence must be in (0, 1)");
  const double ma = mean_of(a), mb = mean_of(b);
  const double sa = sample_variance(a, ma) / static_cast<double>(a.size());
  const double sb = sample_variance(b, mb) / static_cast<double>(b.size());
  WelchResult r;
  const double alpha = 1.0 - confidence;
  if (sa + sb == 0.0) {
    if (ma == mb) return r;
    r.t = ma > mb ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    r.df = std::numeric_limits<double>::quiet_NaN();
    r.p = 0.0;
    r.reject = true;
    return r;
  }
  r.t = (ma - mb) / std::sqrt(sa + sb);
  r.df = (sa + sb) * (sa + sb) /
         (sa * sa / static_cast<double>(a.size() - 1) + sb * sb / static_cast<double>(b.size() - 1));
  const boost::math::students_t dist(r.df);
  r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
  r.reject = r.p < alpha;
  return r;
}

double wrs(const RejectionCounts& x) {
  return kWrsWeights[0] * static_cast<double>(x.at95) + kWrsWeights[1] * static_cast<double>(x.at70) +
         kWrsWeights[2] * static_cast<double>(x.at60);
}

RejectionCounts rejection_counts(const std::vector<ScoredSentence>& scored) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& s : scored) {
    if (!s.score) continue;
    auto& g = groups[s.sentence.template_id];
    if (s.sentence.gender == "male") g.first.push_back(*s.score);
    else if (s.sentence.gender == "female") g.second.push_back(*s.score);
  }
  RejectionCounts r;
  for (const auto& [_, g] : groups) {
    if (g.first.size() < 2 || g.second.size() < 2) continue;
    r.at95 += welch_t_test(g.first, g.second, kConfidenceLevels[0]).reject;
    r.at70 += welch_t_test(g.first, g.second, kConfidenceLevels[1]).reject;
    r.at60 += welch_t_test(g.first, g.second, kConfidenceLevels[2]).reject;
  }
  return r;
}

RatingReport rate_systems(std::vector<SystemScore> scores, double tolerance) {
  if (scores.empty()) throw std::invalid_argument("no systems to rate");
  for (const auto& s : scores) {
    if (s.metric != scores.front().metric) throw std::invalid_argument("cannot rate mixed metrics in one report");
    if (!std::isfinite(s.score)) throw std::invalid_argument("non-finite score for " + s.system);
  }
  std::sort(scores.begin(), scores.end(), [](const SystemScore& a, const SystemScore& b) {
    return a.score != b.score ? a.score < b.score : a.system < b.system;
  });
  RatingReport r;
  r.metric = scores.front().metric;
  int rating = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i == 0 || scores[i].score - scores[i - 1].score >= tolerance) ++rating;
    r.systems.push_back({scores[i].system, scores[i].score, rating});
  }
  return r;
}

SentimentScorer constant_scorer(double value) {
  return [value](std::string_view) -> std::optional<double> { return value; };
}

SentimentScorer gender_skewed_scorer(const TemplateCorpus& corpus) {
  std::vector<std::vector<std::string>> male;
  for (const auto& p : corpus.persons)
    if (p.gender == "male") male.push_back(normalize(p.text).tokens);
  return [male](std::string_view text) -> std::optional<double> {
    const auto tokens = normalize(text).tokens;
    for (const auto& phrase : male)
      if (std::search(tokens.begin(), tokens.end(), phrase.begin(), phrase.end()) != tokens.end()) return 0.2;
    return -0.2;
  };
}

AuditReport run_audit(const std::vector<Sentence>& sentences,
                      const std::vector<std::pair<std::string, SentimentScorer>>& systems, const std::string& metric) {
  if (metric != "die" && metric != "wrs") throw std::invalid_argument("unknown metric " + metric);
  if (systems.empty()) throw std::invalid_argument("no systems to audit");
  AuditReport report;
  report.metric = metric;
  std::vector<SystemScore> scores;
  for (const auto& [name, scorer] : systems) {
    const auto scored = score_all(scorer, name, sentences);
    SystemAudit a;
    a.system = name;
    a.failures = static_cast<std::size_t>(
        std::count_if(scored.begin(), scored.end(), [](const ScoredSentence& s) { return !s.score; }));
    a.instability = instability_matrix(scored);
    a.die = die_summary(contingency_from_scores(scored));
    a.rejections = rejection_counts(scored);
    a.wrs = wrs(a.rejections);
    scores.push_back({name, metric, metric == "die" ? a.die.mean : a.wrs});
    report.systems.push_back(std::move(a));
  }
  report.rating = rate_systems(std::move(scores));
  return report;
}

std::string audit_to_json(const AuditReport& report) {
  using nlohmann::json;
  json j;
  j["metric"] = report.metric;
  j["systems"] = json::array();
  for (const auto& a : report.systems) {
    json s;
    s["system"] = a.system;
    s["failures"] = a.failures;
    s["die_mean"] = a.die.mean;
    s["die_per_x"] = a.die.per_x;
    s["die_undefined"] = a.die.undefined;
    s["rejections"] = {{"0.95", a.rejections.at95}, {"0.70", a.rejections.at70}, {"0.60", a.rejections.at60}};
    s["wrs"] = a.wrs;
    json inst = json::array();
    for (const auto& t : a.instability.templates) {
      json row{{"template_id", t.template_id}, {"flagged", t.flagged}};
      row["delta"] = t.delta ? json(*t.delta) : json(nullptr);
      for (const auto& [gender, g] : t.by_gender)
        row["means"][gender] = {{"mean", g.mean}, {"count", g.count}, {"missing", g.missing}};
      inst.push_back(std::move(row));
    }
    s["instability"] = std::move(inst);
    j["systems"].push_back(std::move(s));
  }
  json ratings = json::array();
  for (const auto& r : report.rating.systems)
    ratings.push_back({{"system", r.system}, {"score", r.score}, {"rating", r.rating}});
  j["ratings"] = std::move(ratings);
  return j.dump(2);
}

}  // namespace cubetutor
