#include "cubetutor/predicates.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace cubetutor {

namespace {

std::uint32_t encode(const Predicate& p) {
  return ((((static_cast<std::uint32_t>(p.kind) * 64u + static_cast<std::uint32_t>(p.a)) * 64u +
            static_cast<std::uint32_t>(p.b)) *
               8u +
           static_cast<std::uint32_t>(p.c)) *
          2u) +
         (p.negated ? 1u : 0u);
}

struct Vocabulary {
  std::vector<Predicate> atoms;
  absl::flat_hash_map<std::uint32_t, std::size_t> index;

  Vocabulary() {
    for (int p = 0; p < kNumEdges; ++p)
      for (int c = 0; c < kNumEdges; ++c)
        for (int o = 0; o < 2; ++o) atoms.push_back(Predicate::edge_slot(p, c, o));
    for (int p = kNumEdges; p < kNumCubelets; ++p)
      for (int c = kNumEdges; c < kNumCubelets; ++c)
        for (int o = 0; o < 3; ++o) atoms.push_back(Predicate::corner_slot(p, c, o));
    for (int c = 0; c < kNumCubelets; ++c) {
      atoms.push_back(Predicate::placed(c, false));
      atoms.push_back(Predicate::placed(c, true));
    }
    for (int c = 0; c < kNumCubelets; ++c)
      for (Color sticker : cubelet_colors(c))
        for (int center = 0; center < kNumColors; ++center)
          atoms.push_back(Predicate::aligned(c, sticker, static_cast<Color>(center)));
    for (int f = 0; f < kNumFacelets; ++f) {
      if (is_center(f)) continue;
      for (int color = 0; color < kNumColors; ++color) atoms.push_back(Predicate::sticker_at(f, static_cast<Color>(color)));
    }
    for (std::size_t i = 0; i < atoms.size(); ++i) index.emplace(encode(atoms[i]), i);
  }
};

const Vocabulary& vocab() {
  static const Vocabulary v;
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = s.find(sep, start);
    if (at == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, at - start));
    start = at + sep.size();
  }
}

[[noreturn]] void bad(std::string_view text, std::string_view why) {
  throw std::invalid_argument("malformed predicate '" + std::string(text) + "': " + std::string(why));
}

Color parse_color(std::string_view text, std::string_view whole) {
  if (text.size() != 1 || !std::isupper(static_cast<unsigned char>(text[0]))) bad(whole, "expected a color letter");
  const auto c = color_from_letter(text[0]);
  if (!c) bad(whole, "unknown color");
  return *c;
}

int parse_int(std::string_view text, std::string_view whole) {
  if (text.size() != 1 || !std::isdigit(static_cast<unsigned char>(text[0]))) bad(whole, "expected a digit");
  return text[0] - '0';
}

}  // namespace

int Predicate::cubelet() const {
  switch (kind) {
    case PredicateKind::EdgeSlot:
    case PredicateKind::CornerSlot: return b;
    case PredicateKind::Placed:
    case PredicateKind::Aligned: return a;
    case PredicateKind::StickerAt: return -1;
  }
  return -1;
}

const std::vector<Predicate>& vocabulary() { return vocab().atoms; }

std::size_t atom_index(const Predicate& p) {
  const auto& idx = vocab().index;
  const auto it = idx.find(encode(p));
  if (it == idx.end()) throw std::invalid_argument("predicate outside the vocabulary: " + to_string(p));
  return it->second;
}

bool evaluate(const Predicate& p, const CubeState& state, const CubieView& view) {
  switch (p.kind) {
    case PredicateKind::EdgeSlot:
    case PredicateKind::CornerSlot:
      return view.cubelet_at[static_cast<std::size_t>(p.a)] == p.b && view.orient_at[static_cast<std::size_t>(p.a)] == p.c;
    case PredicateKind::Placed: return view.placed(p.a) != p.negated;
    case PredicateKind::Aligned: {
      const int f = view.facelet_of(p.a, static_cast<Color>(p.b));
      return f >= 0 && state[facelet_index(facelet_face(f), kCenterSlot)] == static_cast<Color>(p.c);
    }
    case PredicateKind::StickerAt: return state[p.a] == static_cast<Color>(p.b);
  }
  return false;
}

bool evaluate_clause(const Clause& clause, const CubeState& state, const CubieView& view) {
  return std::all_of(clause.begin(), clause.end(), [&](const Predicate& p) { return evaluate(p, state, view); });
}

bool evaluate_program(const PredicateProgram& program, const CubeState& state) {
  if (program.clauses.empty()) return false;
  const auto view = try_locate(state);
  if (!view) return false;
  return std::any_of(program.clauses.begin(), program.clauses.end(),
                     [&](const Clause& c) { return evaluate_clause(c, state, *view); });
}

std::string to_string(const Predicate& p) {
  switch (p.kind) {
    case PredicateKind::EdgeSlot:
      return "edge_slot(" + std::string(position_code(p.a)) + "," + cubelet_code(p.b) + "," + std::to_string(p.c) + ")";
    case PredicateKind::CornerSlot:
      return "corner_slot(" + std::string(position_code(p.a)) + "," + cubelet_code(p.b) + "," + std::to_string(p.c) + ")";
    case PredicateKind::Placed: return std::string(p.negated ? "not " : "") + "placed(" + cubelet_code(p.a) + ")";
    case PredicateKind::Aligned:
      return "aligned(" + cubelet_code(p.a) + "." + color_letter(static_cast<Color>(p.b)) + "," +
             color_letter(static_cast<Color>(p.c)) + ")";
    case PredicateKind::StickerAt:
      return "sticker_at(" + std::string(1, face_letter(facelet_face(p.a))) + std::to_string(p.a % 9) + "," +
             color_letter(static_cast<Color>(p.b)) + ")";
  }
  return "";
}

std::string to_string(const Clause& clause) {
  if (clause.empty()) return "true";
  std::string out;
  for (const auto& p : clause) {
    if (!out.empty()) out += " AND ";
    out += to_string(p);
  }
  return out;
}

std::string to_string(const PredicateProgram& program) {
  if (program.clauses.empty()) return "false";
  std::string out;
  for (const auto& c : program.clauses) {
    if (!out.empty()) out += " OR ";
    out += to_string(c);
  }
  return out;
}

Predicate parse_predicate(std::string_view text) {
  const std::string_view whole = trim(text);
  std::string_view s = whole;
  bool negated = false;
  if (s.substr(0, 4) == "not ") {
    negated = true;
    s = trim(s.substr(4));
  }
  const auto open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')') bad(whole, "expected name(args)");
  const std::string_view name = s.substr(0, open);
  std::vector<std::string_view> args = split(s.substr(open + 1, s.size() - open - 2), ",");
  for (auto& a : args) a = trim(a);
  if (negated && name != "placed") bad(whole, "only placed() can be negated");

  Predicate p;
  if (name == "edge_slot" || name == "corner_slot") {
    if (args.size() != 3) bad(whole, "expected 3 arguments");
    const auto pos = position_from_code(args[0]);
    const auto cub = cubelet_from_code(args[1]);
    if (!pos || !cub) bad(whole, "unknown position or cubelet");
    p = name == "edge_slot" ? Predicate::edge_slot(*pos, *cub, parse_int(args[2], whole))
                            : Predicate::corner_slot(*pos, *cub, parse_int(args[2], whole));
  } else if (name == "placed") {
    if (args.size() != 1) bad(whole, "expected 1 argument");
    const auto cub = cubelet_from_code(args[0]);
    if (!cub) bad(whole, "unknown cubelet");
    p = Predicate::placed(*cub, negated);
  } else if (name == "aligned") {
    if (args.size() != 2) bad(whole, "expected 2 arguments");
    const auto dot = args[0].find('.');
    if (dot == std::string_view::npos) bad(whole, "expected cubelet.color");
    const auto cub = cubelet_from_code(args[0].substr(0, dot));
    if (!cub) bad(whole, "unknown cubelet");
    p = Predicate::aligned(*cub, parse_color(args[0].substr(dot + 1), whole), parse_color(args[1], whole));
  } else if (name == "sticker_at") {
    if (args.size() != 2 || args[0].size() != 2) bad(whole, "expected sticker_at(<face><slot>,<color>)");
    const auto face = face_from_letter(args[0][0]);
    if (!face) bad(whole, "unknown face");
    p = Predicate::sticker_at(facelet_index(*face, parse_int(args[0].substr(1), whole)), parse_color(args[1], whole));
  } else {
    bad(whole, "unknown predicate name");
  }
  if (!vocab().index.contains(encode(p))) bad(whole, "arguments outside the vocabulary");
  return p;
}

PredicateProgram parse_program(std::string_view text) {
  PredicateProgram program;
  const std::string_view t = trim(text);
  if (t == "false") return program;
  if (t.empty()) throw std::invalid_argument("empty program text");
  for (std::string_view clause_text : split(t, " OR ")) {
    clause_text = trim(clause_text);
    Clause clause;
    if (clause_text != "true")
      for (std::string_view atom : split(clause_text, " AND ")) clause.push_back(parse_predicate(atom));
    program.clauses.push_back(std::move(clause));
  }
  return program;
}

std::vector<std::vector<Predicate>> program_to_predicates(const PredicateProgram& program) {
  std::vector<std::vector<Predicate>> groups;
  for (const Clause& clause : program.clauses) {
    Clause sorted = clause;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Predicate& x, const Predicate& y) { return atom_index(x) < atom_index(y); });
    std::vector<int> order;
    for (const auto& p : sorted)
      if (std::find(order.begin(), order.end(), p.cubelet()) == order.end()) order.push_back(p.cubelet());
    std::vector<Predicate> group;
    for (int c : order)
      for (const auto& p : sorted)
        if (p.cubelet() == c) group.push_back(p);
    groups.push_back(std::move(group));
  }
  return groups;
}

}  // namespace cubetutor
