#include "cubetutor/nlg.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace cubetutor {

namespace {

constexpr std::array<std::string_view, 9> kSpots = {"top-left", "top",         "top-right", "left",        "center",
                                                    "right",    "bottom-left", "bottom",    "bottom-right"};

struct Shape {
  std::string_view name;
  int arity;
  std::set<std::string_view> slots;
};

const std::vector<Shape>& shapes() {
  static const std::vector<Shape> s = {
      {"edge_slot", 3, {"cubelet", "kind", "position", "color", "face", "center"}},
      {"corner_slot", 3, {"cubelet", "kind", "position", "color", "face", "center"}},
      {"placed", 1, {"cubelet", "kind"}},
      {"not_placed", 1, {"cubelet", "kind"}},
      {"aligned", 3, {"cubelet", "kind", "color", "face", "center"}},
      {"sticker_at", 2, {"color", "face", "center", "spot"}},
  };
  return s;
}

const Shape* shape_of(std::string_view name) {
  for (const auto& s : shapes())
    if (s.name == name) return &s;
  return nullptr;
}

std::string colors_of(int cubelet) {
  std::string s;
  for (Color c : cubelet_colors(cubelet)) {
    if (!s.empty()) s += '-';
    s += color_name(c);
  }
  return s;
}

std::string position_words(int position) {
  const auto faces = position_faces(position);
  std::string s;
  for (std::size_t i = 0; i < faces.size(); ++i) {
    if (i > 0) s += i + 1 == faces.size() ? " and " : ", ";
    s += face_name(faces[i]);
  }
  return s;
}

std::map<std::string_view, std::string> slot_values(const Predicate& p) {
  std::map<std::string_view, std::string> v;
  switch (p.kind) {
    case PredicateKind::EdgeSlot:
    case PredicateKind::CornerSlot: {
      const int n = sticker_count(p.b);
      const Face f = position_faces(p.a)[static_cast<std::size_t>(p.c % n)];
      v["cubelet"] = colors_of(p.b);
      v["kind"] = is_edge(p.b) ? "edge" : "corner";
      v["position"] = position_words(p.a);
      v["color"] = color_name(cubelet_colors(p.b)[0]);
      v["face"] = face_name(f);
      v["center"] = color_name(home_color(f));
      break;
    }
    case PredicateKind::Placed:
      v["cubelet"] = colors_of(p.a);
      v["kind"] = is_edge(p.a) ? "edge" : "corner";
      break;
    case PredicateKind::Aligned: {
      const Face f = home_face(static_cast<Color>(p.c));
      v["cubelet"] = colors_of(p.a);
      v["kind"] = is_edge(p.a) ? "edge" : "corner";
      v["color"] = color_name(static_cast<Color>(p.b));
      v["face"] = face_name(f);
      v["center"] = color_name(static_cast<Color>(p.c));
      break;
    }
    case PredicateKind::StickerAt: {
      const Face f = facelet_face(p.a);
      v["color"] = color_name(static_cast<Color>(p.b));
      v["face"] = face_name(f);
      v["center"] = color_name(home_color(f));
      v["spot"] = kSpots[static_cast<std::size_t>(p.a % 9)];
      break;
    }
  }
  return v;
}

// Calls fn(slot_name) for every {slot}; returns false on an unbalanced brace.
template <typename Fn>
bool scan_slots(std::string_view text, Fn&& fn) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '}') return false;
    if (text[i] != '{') continue;
    const auto end = text.find('}', i);
    if (end == std::string_view::npos) return false;
    const auto name = text.substr(i + 1, end - i - 1);
    if (name.empty() || name.find('{') != std::string_view::npos) return false;
    fn(name);
    i = end;
  }
  return true;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string lower_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

std::string sentence(std::string s) {
  s = capitalize(std::move(s));
  if (!s.empty() && s.back() != '.' && s.back() != '?' && s.back() != '!') s += '.';
  return s;
}

int rank_of(const Predicate& p) {
  switch (p.kind) {
    case PredicateKind::Placed: return 0;
    case PredicateKind::EdgeSlot:
    case PredicateKind::CornerSlot: return 1;
    case PredicateKind::Aligned: return 2;
    case PredicateKind::StickerAt: return 3;
  }
  return 3;
}

}  // namespace

std::string_view to_string(Register r) { return r == Register::Standard ? "standard" : "simplified"; }

Register parse_register(std::string_view text) {
  if (text == "standard") return Register::Standard;
  if (text == "simplified") return Register::Simplified;
  throw std::invalid_argument("unknown register: " + std::string(text));
}

TemplateSet TemplateSet::parse(std::string_view text) {
  TemplateSet set;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fail = [&](const std::string& why) {
      throw TemplateError("template line " + std::to_string(number) + ": " + why);
    };
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos)
      fail("expected three tab-separated fields");
    const std::string key = line.substr(0, t1);
    const std::string reg_text = line.substr(t1 + 1, t2 - t1 - 1);
    SentenceTemplate t;
    t.text = line.substr(t2 + 1);
    const auto slash = key.find('/');
    if (slash == std::string::npos) fail("predicate must be name/arity");
    t.predicate = key.substr(0, slash);
    const Shape* shape = shape_of(t.predicate);
    if (!shape) fail("unknown predicate " + t.predicate);
    try {
      std::size_t used = 0;
      t.arity = std::stoi(key.substr(slash + 1), &used);
      if (used != key.size() - slash - 1) fail("bad arity in " + key);
    } catch (const std::logic_error&) {
      fail("bad arity in " + key);
    }
    if (t.arity != shape->arity) fail(key + " has arity " + std::to_string(shape->arity));
    try {
      t.reg = parse_register(reg_text);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    if (t.text.empty()) fail("empty template");
    std::string bad;
    const bool balanced = scan_slots(t.text, [&](std::string_view slot) {
      if (!shape->slots.contains(slot) && bad.empty()) bad = std::string(slot);
    });
    if (!balanced) fail("unbalanced braces");
    if (!bad.empty()) fail("slot {" + bad + "} is not available for " + t.predicate);
    const auto k = std::make_pair(t.predicate, t.reg);
    if (set.templates_.contains(k)) fail("duplicate template for " + key + " " + reg_text);
    set.templates_.emplace(k, std::move(t));
  }
  return set;
}

TemplateSet TemplateSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TemplateError("cannot read template file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const SentenceTemplate* TemplateSet::find(std::string_view predicate, Register reg) const {
  const auto it = templates_.find(std::make_pair(std::string(predicate), reg));
  return it == templates_.end() ? nullptr : &it->second;
}

std::string template_name(const Predicate& p) {
  switch (p.kind) {
    case PredicateKind::EdgeSlot: return "edge_slot";
    case PredicateKind::CornerSlot: return "corner_slot";
    case PredicateKind::Placed: return p.negated ? "not_placed" : "placed";
    case PredicateKind::Aligned: return "aligned";
    case PredicateKind::StickerAt: return "sticker_at";
  }
  return "";
}

std::string render_predicate(const Predicate& p, Register reg, const TemplateSet& templates) {
  const std::string name = template_name(p);
  const SentenceTemplate* t = templates.find(name, reg);
  if (!t) throw MissingTemplate("no " + std::string(to_string(reg)) + " template for " + name);
  const auto values = slot_values(p);
  std::string out;
  std::size_t last = 0;
  const std::string_view text = t->text;
  for (std::size_t i = text.find('{'); i != std::string_view::npos; i = text.find('{', last)) {
    const auto end = text.find('}', i);
    out.append(text.substr(last, i - last));
    out += values.at(text.substr(i + 1, end - i - 1));
    last = end + 1;
  }
  out.append(text.substr(last));
  return sentence(std::move(out));
}

std::string move_phrase(Move m) {
  return "rotate the " + std::string(face_name(m.face)) + " face " + (m.clockwise ? "clockwise" : "counterclockwise");
}

std::vector<TaggedSentence> order_sentences(std::vector<TaggedSentence> sentences) {
  // first mention of each cubelet per (section, group)
  std::map<std::tuple<Section, int, int>, std::size_t> first;
  for (std::size_t i = 0; i < sentences.size(); ++i)
    first.emplace(std::make_tuple(sentences[i].section, sentences[i].group, sentences[i].cubelet), i);
  auto key = [&](const TaggedSentence& s) {
    return std::make_tuple(s.section, s.group, first.at(std::make_tuple(s.section, s.group, s.cubelet)), s.rank);
  };
  std::stable_sort(sentences.begin(), sentences.end(),
                   [&](const TaggedSentence& a, const TaggedSentence& b) { return key(a) < key(b); });
  return sentences;
}

std::string ExplanationText::text() const {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out += ' ';
    out += s.text;
  }
  return out;
}

std::vector<std::string> ExplanationText::section(Section sec) const {
  std::vector<std::string> out;
  for (const auto& s : sentences)
    if (s.section == sec) out.push_back(s.text);
  return out;
}

ExplanationText render_macro(const MacroAction& macro, Register reg, const TemplateSet& templates) {
  std::vector<TaggedSentence> out;
  const auto groups = program_to_predicates(macro.precondition);
  const bool several = groups.size() > 1;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<TaggedSentence> clause;
    for (const auto& p : groups[g])
      clause.push_back({Section::Precondition, static_cast<int>(g), p.cubelet(), rank_of(p),
                        render_predicate(p, reg, templates)});
    clause = order_sentences(std::move(clause));
    if (several && !clause.empty())
      clause.front().text = "Case " + number_word(g + 1) + ": " + lower_first(clause.front().text);
    out.insert(out.end(), clause.begin(), clause.end());
  }
  for (Move m : macro.sequence) out.push_back({Section::Action, 0, -1, 0, sentence(move_phrase(m))});
  out.push_back({Section::Effect, 0, macro.effect.target, 0, sentence(macro.effect.description)});
  out.push_back({Section::Question, 0, -1, 0,
                 reg == Register::Standard ? "Do you have any questions?" : "Any questions?"});
  return ExplanationText{order_sentences(std::move(out))};
}

std::string describe_cubelet(const CubeState& state, int cubelet, Register reg, const TemplateSet& templates) {
  const CubieView v = locate(state);
  if (v.placed(cubelet)) return render_predicate(Predicate::placed(cubelet), reg, templates);
  std::string out = render_predicate(Predicate::placed(cubelet, true), reg, templates);
  std::vector<std::string> aligned;
  for (Color c : cubelet_colors(cubelet)) {
    const Color center = home_color(facelet_face(v.facelet_of(cubelet, c)));
    aligned.push_back(render_predicate(Predicate::aligned(cubelet, c, center), reg, templates));
  }
  std::string joined;
  for (std::size_t i = 0; i < aligned.size(); ++i) {
    std::string s = aligned[i];
    if (i + 1 < aligned.size()) s.pop_back();  // drop the period before joining
    if (i == 0) {
      joined = s;
    } else {
      joined += (i + 1 == aligned.size() ? " and " : ", ") + lower_first(s);
    }
  }
  return out + " " + joined;
}

std::string number_word(std::size_t n) {
  static constexpr std::array<std::string_view, 13> kWords = {"zero", "one", "two",   "three", "four",
                                                              "five", "six", "seven", "eight", "nine",
                                                              "ten",  "eleven", "twelve"};
  return n < kWords.size() ? std::string(kWords[n]) : std::to_string(n);
}

}  // namespace cubetutor
