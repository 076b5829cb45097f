#pragma once

// Template-based English rendering of predicates and macros.
//
// Template file: one template per line,
//   predicate_name/arity <TAB> register <TAB> text with {slot} markers
// Blank lines and lines starting with '#' are ignored. Predicate names are
// edge_slot/3, corner_slot/3, placed/1, not_placed/1, aligned/3 and
// sticker_at/2. Slots: {cubelet} color pair or triple ("white-orange"),
// {kind} edge/corner, {position} faces of a slot ("bottom and right"),
// {color} a sticker color, {face} a face name, {center} the color of that
// face's center, {spot} a facelet position on a face ("top-left").

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cubetutor/macros.hpp"
#include "cubetutor/predicates.hpp"

namespace cubetutor {

enum class Register { Standard, Simplified };

std::string_view to_string(Register r);
/// Throws std::invalid_argument for anything but "standard"/"simplified".
Register parse_register(std::string_view text);

class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingTemplate : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct SentenceTemplate {
  std::string predicate;  // e.g. "not_placed"
  int arity = 0;
  Register reg = Register::Standard;
  std::string text;
};

class TemplateSet {
 public:
  /// Throws TemplateError naming the line on any malformed entry.
  static TemplateSet parse(std::string_view text);
  static TemplateSet load(const std::filesystem::path& path);

  const SentenceTemplate* find(std::string_view predicate, Register reg) const;
  std::size_t size() const { return templates_.size(); }

 private:
  std::map<std::pair<std::string, Register>, SentenceTemplate> templates_;
};

/// Template key of a predicate: "edge_slot", "not_placed", ...
std::string template_name(const Predicate& p);

/// Throws MissingTemplate when the set has no entry for the predicate.
std::string render_predicate(const Predicate& p, Register reg, const TemplateSet& templates);

/// Phrase for one move, e.g. "rotate the bottom face counterclockwise".
std::string move_phrase(Move m);

enum class Section { Precondition, Action, Effect, Question };

struct TaggedSentence {
  Section section = Section::Precondition;
  int group = 0;     // clause index for preconditions
  int cubelet = -1;  // referenced cubelet, -1 when none
  int rank = 0;      // placement 0, slot 1, alignment 2, sticker 3
  std::string text;
};

/// Sections in order precondition, action, effect, question; within a
/// section by group, then by cubelet in order of first mention, then rank.
/// Stable otherwise.
std::vector<TaggedSentence> order_sentences(std::vector<TaggedSentence> sentences);

struct ExplanationText {
  std::vector<TaggedSentence> sentences;
  /// Sentences joined by single spaces.
  std::string text() const;
  std::vector<std::string> section(Section s) const;
};

ExplanationText render_macro(const MacroAction& macro, Register reg, const TemplateSet& templates);

/// Description of where a cubelet is in a state: whether it is in place and,
/// when it is not, how its stickers are aligned with the centers.
std::string describe_cubelet(const CubeState& state, int cubelet, Register reg, const TemplateSet& templates);

std::string number_word(std::size_t n);

}  // namespace cubetutor
