#include "a2nav/parser.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

#include "a2nav/errors.hpp"
#include "a2nav/llm.hpp"

namespace a2nav {

namespace {

const char* kParticles[] = {"to", "into", "in",   "past",   "through", "out",
                            "of", "from", "at",  "by",     "toward",  "towards"};
const char* kArticles[] = {"the", "a", "an"};

bool is_particle(const std::string& token) {
  for (const char* p : kParticles)
    if (token == p) return true;
  return false;
}

bool is_article(const std::string& token) {
  for (const char* a : kArticles)
    if (token == a) return true;
  return false;
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string strip_edge_punct(const std::string& token) {
  std::size_t b = 0, e = token.size();
  auto is_word = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '\'' || c == '-';
  };
  while (b < e && !is_word(token[b])) ++b;
  while (e > b && !is_word(token[e - 1])) --e;
  return token.substr(b, e - b);
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

std::string display_phrase(ActionKind kind) {
  switch (kind) {
    case ActionKind::GoTo: return "Go to";
    case ActionKind::GoPast: return "Go past";
    case ActionKind::GoInto: return "Go into";
    case ActionKind::GoThrough: return "Go through";
    case ActionKind::Exit: return "Exit";
  }
  return "Go to";
}

}  // namespace

std::string normalize_phrase(const std::string& text) {
  std::string out;
  for (char c : text) {
    const char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (std::isspace(static_cast<unsigned char>(lc))) {
      if (!out.empty() && out.back() != ' ') out.push_back(' ');
    } else {
      out.push_back(lc);
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

void ActionLexicon::add(const std::string& phrase, ActionKind kind) {
  entries_[normalize_phrase(phrase)] = kind;
}

std::optional<ActionKind> ActionLexicon::lookup(const std::string& phrase) const {
  const auto it = entries_.find(normalize_phrase(phrase));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

ActionLexicon ActionLexicon::builtin() {
  ActionLexicon lex;
  const std::pair<const char*, ActionKind> table[] = {
      {"go to", ActionKind::GoTo},        {"walk to", ActionKind::GoTo},
      {"head to", ActionKind::GoTo},      {"move to", ActionKind::GoTo},
      {"navigate to", ActionKind::GoTo},  {"approach", ActionKind::GoTo},
      {"go toward", ActionKind::GoTo},    {"go towards", ActionKind::GoTo},
      {"walk toward", ActionKind::GoTo},  {"walk towards", ActionKind::GoTo},
      {"head toward", ActionKind::GoTo},  {"head towards", ActionKind::GoTo},
      {"continue to", ActionKind::GoTo},  {"proceed to", ActionKind::GoTo},
      {"stop at", ActionKind::GoTo},      {"stop by", ActionKind::GoTo},
      {"wait at", ActionKind::GoTo},      {"wait by", ActionKind::GoTo},
      {"reach", ActionKind::GoTo},        {"stand by", ActionKind::GoTo},

      {"go past", ActionKind::GoPast},    {"walk past", ActionKind::GoPast},
      {"move past", ActionKind::GoPast},  {"pass", ActionKind::GoPast},
      {"pass by", ActionKind::GoPast},    {"go by", ActionKind::GoPast},
      {"walk by", ActionKind::GoPast},    {"go beyond", ActionKind::GoPast},
      {"proceed beyond", ActionKind::GoPast},
      {"continue past", ActionKind::GoPast},
      {"walk beyond", ActionKind::GoPast},

      {"go into", ActionKind::GoInto},    {"walk into", ActionKind::GoInto},
      {"go in", ActionKind::GoInto},      {"walk in", ActionKind::GoInto},
      {"enter", ActionKind::GoInto},      {"get into", ActionKind::GoInto},
      {"step into", ActionKind::GoInto},  {"go inside", ActionKind::GoInto},
      {"move into", ActionKind::GoInto},  {"head into", ActionKind::GoInto},

      {"go through", ActionKind::GoThrough},
      {"walk through", ActionKind::GoThrough},
      {"pass through", ActionKind::GoThrough},
      {"move through", ActionKind::GoThrough},
      {"travel through", ActionKind::GoThrough},
      {"cross", ActionKind::GoThrough},
      {"cross through", ActionKind::GoThrough},
      {"go across", ActionKind::GoThrough},
      {"walk across", ActionKind::GoThrough},

      {"exit", ActionKind::Exit},         {"leave", ActionKind::Exit},
      {"go out of", ActionKind::Exit},    {"walk out of", ActionKind::Exit},
      {"get out of", ActionKind::Exit},   {"step out of", ActionKind::Exit},
      {"exit from", ActionKind::Exit},    {"depart from", ActionKind::Exit},
      {"depart", ActionKind::Exit},       {"leave from", ActionKind::Exit},
      {"go out", ActionKind::Exit},       {"walk out", ActionKind::Exit},
      {"head out of", ActionKind::Exit},
  };
  for (const auto& [phrase, kind] : table) lex.add(phrase, kind);
  return lex;
}

ActionLexicon ActionLexicon::from_table(const std::string& text) {
  ActionLexicon lex;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw SchemaError("lexicon line " + std::to_string(lineno) + ": missing tab");
    const std::string phrase = line.substr(0, tab);
    const std::string kind = normalize_phrase(line.substr(tab + 1));
    lex.add(phrase, action_kind_from_string(kind));
  }
  return lex;
}

std::vector<RawSubTask> chunk_heuristic(const std::string& instruction) {
  if (normalize_phrase(instruction).empty())
    throw EmptyInstructionError("instruction is empty");

  // Sentence split first, then token scan for connectives.
  std::vector<std::string> sentences;
  std::string cur;
  for (char c : instruction) {
    if (c == '.' || c == ';' || c == '!' || c == '?') {
      sentences.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  sentences.push_back(cur);

  std::vector<std::vector<std::string>> chunks;  // original-case tokens
  for (const auto& sentence : sentences) {
    std::istringstream in(sentence);
    std::vector<std::string> tokens;
    std::string tok;
    while (in >> tok) {
      const std::string clean = strip_edge_punct(tok);
      if (!clean.empty()) tokens.push_back(clean);
    }
    std::vector<std::string> chunk;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const std::string lc = lowercase(tokens[i]);
      auto next_lc = [&](std::size_t k) {
        return i + k < tokens.size() ? lowercase(tokens[i + k]) : std::string();
      };
      if ((lc == "and" && next_lc(1) == "then") || (lc == "after" && next_lc(1) == "that")) {
        chunks.push_back(chunk);
        chunk.clear();
        ++i;
        continue;
      }
      if (lc == "then" || lc == "next") {
        chunks.push_back(chunk);
        chunk.clear();
        continue;
      }
      chunk.push_back(tokens[i]);
    }
    chunks.push_back(chunk);
  }

  std::vector<RawSubTask> out;
  for (const auto& chunk : chunks) {
    if (chunk.empty()) continue;
    std::vector<std::string> action{lowercase(chunk[0])};
    std::size_t i = 1;
    while (i < chunk.size() && is_particle(lowercase(chunk[i]))) {
      action.push_back(lowercase(chunk[i]));
      ++i;
    }
    std::vector<std::string> landmark;
    for (; i < chunk.size(); ++i) {
      const std::string lc = lowercase(chunk[i]);
      if (is_article(lc)) continue;
      landmark.push_back(lc);
    }
    if (landmark.empty()) continue;  // e.g. bare "Stop."
    out.push_back(RawSubTask{join(action), join(landmark), join(chunk)});
  }
  return out;
}

ActionKind canonicalize_action(const std::string& action_phrase,
                               const TextEncoder& encoder,
                               const ActionLexicon& lexicon) {
  if (const auto hit = lexicon.lookup(action_phrase)) return *hit;

  const std::vector<double> target = encoder.encode(normalize_phrase(action_phrase));
  ActionKind best = ActionKind::GoTo;
  double best_score = -2.0;
  for (ActionKind kind : kAllActionKinds) {
    const double score =
        cosine_similarity(target, encoder.encode(canonical_phrase(kind)));
    if (score > best_score) {  // strict: ties keep the earlier kind
      best_score = score;
      best = kind;
    }
  }
  return best;
}

namespace {

const char* kDefinitionBlock =
    "Sub-task definitions:\n"
    "- (Go to, X): walk to the object X and stop right in front of it.\n"
    "- (Go past, X): walk up to the object X and keep going, leaving it behind.\n"
    "- (Go into, X): enter the region X through its doorway and stop inside.\n"
    "- (Go through, X): cross the region X from one entrance to another.\n"
    "- (Exit, X): leave the region X through its doorway and stop outside.\n";

const char* kExamplesBlock =
    "Examples:\n"
    "Instruction: Leave the bedroom and then walk to the lamp.\n"
    "Sub-tasks:\n"
    "1. (Exit, bedroom)\n"
    "2. (Go to, lamp)\n"
    "\n"
    "Instruction: Walk past the couch, go through the hallway and stop at the sink.\n"
    "Sub-tasks:\n"
    "1. (Go past, couch)\n"
    "2. (Go through, hallway)\n"
    "3. (Go to, sink)\n"
    "\n"
    "Instruction: Enter the kitchen and wait by the fridge.\n"
    "Sub-tasks:\n"
    "1. (Go into, kitchen)\n"
    "2. (Go to, fridge)\n";

}  // namespace

std::string prompt_definition_block() { return kDefinitionBlock; }
std::string prompt_examples_block() { return kExamplesBlock; }

std::string build_prompt(const std::string& instruction, PromptStyle style) {
  std::string prompt =
      "Decompose the navigation instruction into an ordered list of sub-tasks, "
      "one per line, each formatted as \"<index>. (<action>, <landmark>)\".\n\n";
  if (style == PromptStyle::Definition || style == PromptStyle::Both) {
    prompt += kDefinitionBlock;
    prompt += "\n";
  }
  if (style == PromptStyle::Examples || style == PromptStyle::Both) {
    prompt += kExamplesBlock;
    prompt += "\n";
  }
  prompt += "Instruction: " + instruction + "\nSub-tasks:\n";
  return prompt;
}

std::vector<RawSubTask> parse_llm_output(const std::string& completion) {
  static const std::regex line_re(
      R"(^\s*(?:\d+\s*[\.\):\]]?\s*)?\(\s*([^,()]+?)\s*,\s*([^()]+?)\s*\)\s*$)");
  std::vector<RawSubTask> out;
  std::istringstream in(completion);
  std::string line;
  while (std::getline(in, line)) {
    if (normalize_phrase(line).empty()) continue;
    std::smatch m;
    if (!std::regex_match(line, m, line_re))
      throw UnparseableError("cannot parse completion line: " + line);
    out.push_back(RawSubTask{m[1].str(), m[2].str(), line});
  }
  return out;
}

std::string format_subtasks(const std::vector<RawSubTask>& raw) {
  std::ostringstream out;
  for (std::size_t i = 0; i < raw.size(); ++i)
    out << (i + 1) << ". (" << raw[i].action_phrase << ", " << raw[i].landmark_phrase
        << ")\n";
  return out.str();
}

std::string format_subtasks(const std::vector<SubTask>& subtasks) {
  std::ostringstream out;
  for (const auto& st : subtasks)
    out << "(" << display_phrase(st.action) << ", " << st.landmark << ")\n";
  return out.str();
}

namespace {

std::string canonical_landmark(const std::string& phrase) {
  std::istringstream in(normalize_phrase(phrase));
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok)
    if (!is_article(tok)) tokens.push_back(tok);
  return join(tokens);
}

}  // namespace

ParsedInstruction parse_instruction(const std::string& instruction, ParserKind parser,
                                    std::optional<PromptStyle> style, LlmClient* llm,
                                    const TextEncoder& encoder,
                                    const ActionLexicon& lexicon) {
  ParsedInstruction parsed;
  parsed.instruction = instruction;
  parsed.parser = parser;

  if (parser == ParserKind::Heuristic) {
    parsed.raw = chunk_heuristic(instruction);
  } else {
    if (!llm) throw LlmUnavailableError("no completion client configured");
    parsed.prompt_style = style.value_or(PromptStyle::Examples);
    CompletionRequest request;
    request.prompt = build_prompt(instruction, *parsed.prompt_style);
    request.stop = {"Instruction:"};
    parsed.raw = parse_llm_output(llm->complete(request));
  }

  for (const auto& raw : parsed.raw) {
    SubTask st;
    st.action = canonicalize_action(raw.action_phrase, encoder, lexicon);
    st.landmark = canonical_landmark(raw.landmark_phrase);
    st.landmark_kind = landmark_kind_for(st.action);
    if (st.landmark.empty())
      throw UnparseableError("empty landmark in sub-task: " + raw.source_line);
    parsed.subtasks.push_back(std::move(st));
  }
  return parsed;
}

}  // namespace a2nav
