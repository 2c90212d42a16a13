#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "a2nav/encoder.hpp"
#include "a2nav/types.hpp"

namespace a2nav {

class LlmClient;  // llm.hpp

// Parser output before canonicalization, preserved verbatim for audit.
struct RawSubTask {
  std::string action_phrase;
  std::string landmark_phrase;
  std::string source_line;
};

enum class ParserKind { Heuristic, Llm };
enum class PromptStyle { Definition, Examples, Both };

struct ParsedInstruction {
  std::string instruction;
  std::vector<SubTask> subtasks;
  std::vector<RawSubTask> raw;
  ParserKind parser = ParserKind::Heuristic;
  std::optional<PromptStyle> prompt_style;
};

// Synonym phrase (lowercased, whitespace-normalized) -> action kind.
class ActionLexicon {
 public:
  static ActionLexicon builtin();
  static ActionLexicon from_table(const std::string& text);  // phrase<TAB>kind lines

  void add(const std::string& phrase, ActionKind kind);
  std::optional<ActionKind> lookup(const std::string& phrase) const;
  const std::map<std::string, ActionKind>& entries() const { return entries_; }

 private:
  std::map<std::string, ActionKind> entries_;
};

std::string normalize_phrase(const std::string& text);

// Grammatical chunker: splits on sentence punctuation and the connectives
// {"then", "and then", "after that", "next"}; leading verb group becomes the
// action phrase, the article-stripped remainder the landmark phrase.
std::vector<RawSubTask> chunk_heuristic(const std::string& instruction);

// Two-stage semantic translation: lexicon lookup, then embedding cosine
// against the five canonical phrases (ties broken by kind order).
ActionKind canonicalize_action(const std::string& action_phrase,
                               const TextEncoder& encoder,
                               const ActionLexicon& lexicon);

std::string build_prompt(const std::string& instruction, PromptStyle style);
std::string prompt_definition_block();
std::string prompt_examples_block();

// Accepts lines of the form "<n>. (<action>, <landmark>)"; the index is
// optional, blank lines are skipped.
std::vector<RawSubTask> parse_llm_output(const std::string& completion);

// Renders sub-tasks back into the line grammar (inverse of parse_llm_output
// on well-formed lists).
std::string format_subtasks(const std::vector<RawSubTask>& raw);
std::string format_subtasks(const std::vector<SubTask>& subtasks);

ParsedInstruction parse_instruction(const std::string& instruction, ParserKind parser,
                                    std::optional<PromptStyle> style, LlmClient* llm,
                                    const TextEncoder& encoder,
                                    const ActionLexicon& lexicon);

}  // namespace a2nav
