#include "saw/extraction.hpp"

#include <map>
#include <unordered_set>

#include "saw/errors.hpp"
#include "saw/http_client.hpp"
#include "saw/text.hpp"

namespace saw {

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> sentences;
  size_t start = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool terminator = (c == '.' || c == '!' || c == '?');
    const bool at_boundary =
        terminator && (i + 1 == text.size() || is_space_byte(text[i + 1]));
    if (!at_boundary) continue;
    std::string body = trim(std::string_view(text).substr(start, i - start));
    if (!body.empty()) sentences.push_back(std::move(body));
    start = i + 1;
  }
  std::string tail = trim(std::string_view(text).substr(start));
  if (!tail.empty()) sentences.push_back(std::move(tail));
  return sentences;
}

namespace {

const std::unordered_set<std::string>& verb_words() {
  // Auxiliaries, copulas, modals, and common irregular pasts. The suffix
  // heuristic below covers regular inflections.
  static const std::unordered_set<std::string> words = {
      "is",    "am",    "are",   "was",    "were",  "be",     "been",  "being",
      "has",   "have",  "had",   "do",     "does",  "did",    "can",   "could",
      "will",  "would", "shall", "should", "may",   "might",  "must",  "won",
      "went",  "made",  "gave",  "took",   "said",  "found",  "held",  "saw",
      "met",   "wrote", "became", "began", "knew",  "got",    "ran",   "came",
      "led",   "built", "kept",  "left",   "lost",  "paid",   "sent",  "sold",
      "told",  "thought", "felt", "brought", "bought", "taught", "stood",
      "spent", "meant", "read",  "lies",   "lie",   "lay"};
  return words;
}

const std::unordered_set<std::string>& nonverb_suffix_stop() {
  // Frequent words the -s/-ed/-ing endings would misclassify.
  static const std::unordered_set<std::string> words = {
      "its",     "his",      "hers",    "ours",    "yours",   "theirs",
      "news",    "means",    "series",  "species", "always",  "perhaps",
      "whereas", "towards",  "besides", "sometimes", "red",   "bed",
      "hundred", "indeed",   "instead", "sacred",  "naked",   "wicked",
      "thing",   "nothing",  "something", "anything", "everything",
      "morning", "evening",  "during",  "king",    "string",  "spring"};
  return words;
}

const std::unordered_set<std::string>& prepositions() {
  static const std::unordered_set<std::string> words = {
      "in",      "on",     "at",      "of",      "for",    "with",   "from",
      "by",      "to",     "as",      "into",    "onto",   "over",   "under",
      "about",   "after",  "before",  "between", "during", "without", "within",
      "through", "against", "toward", "towards", "upon",   "off",    "across",
      "along",   "behind", "beyond",  "near",    "since",  "until"};
  return words;
}

// Lowercased token with ASCII punctuation stripped from both ends.
std::string core_of(const std::string& token) {
  static const std::string edge = ".,!?;:'\"()[]{}<>";
  size_t b = 0;
  size_t e = token.size();
  while (b < e && edge.find(token[b]) != std::string::npos) ++b;
  while (e > b && edge.find(token[e - 1]) != std::string::npos) --e;
  return to_lower_ascii(std::string_view(token).substr(b, e - b));
}

bool all_lower_alpha(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < 'a' || c > 'z') return false;
  }
  return true;
}

// The token as written must be lowercase in the sentence; capitalized words
// are treated as names, never verbs.
bool token_is_lowercase_form(const std::string& token, const std::string& core) {
  return all_lower_alpha(core) && token.find(core) != std::string::npos;
}

bool suffix_says_verb(const std::string& w) {
  if (w.size() < 3 || nonverb_suffix_stop().count(w)) return false;
  if (ends_with(w, "ing") || ends_with(w, "ed")) return true;
  if (ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") &&
      !ends_with(w, "is") && !ends_with(w, "ics")) {
    return true;
  }
  return false;
}

bool is_verb_token(const std::string& token) {
  const std::string w = core_of(token);
  if (verb_words().count(w)) return true;
  return token_is_lowercase_form(token, w) && suffix_says_verb(w);
}

bool continues_verb_group(const std::string& token) {
  const std::string w = core_of(token);
  if (verb_words().count(w)) return true;
  if (w == "to" || w == "not") return true;
  if (!token_is_lowercase_form(token, w) || w.size() < 3) return false;
  return (ends_with(w, "ing") || ends_with(w, "ed")) && !nonverb_suffix_stop().count(w);
}

std::string trim_field_edges(const std::string& s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && (s[b] == ',' || is_space_byte(s[b]))) ++b;
  while (e > b && (s[e - 1] == ',' || is_space_byte(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string join_range(const std::vector<std::string>& tokens, size_t b, size_t e) {
  std::string out;
  for (size_t i = b; i < e; ++i) {
    if (i > b) out.push_back(' ');
    out.append(tokens[i]);
  }
  return trim_field_edges(out);
}

// One element per sentence: the first verb-like token splits subject from the
// verb group; a trailing preposition joins the relation; the rest is the
// object. Sentences where any part comes out empty are skipped.
std::vector<InformationElement> rule_extract(const std::vector<std::string>& sentences,
                                             const std::string& tokenizer_id) {
  std::vector<InformationElement> elements;
  for (size_t si = 0; si < sentences.size(); ++si) {
    const auto tokens = split_whitespace(sentences[si]);
    if (tokens.size() < 3) continue;

    size_t verb = 0;
    for (size_t i = 1; i < tokens.size(); ++i) {
      if (is_verb_token(tokens[i])) {
        verb = i;
        break;
      }
    }
    if (verb == 0) continue;

    size_t j = verb + 1;
    while (j < tokens.size() && continues_verb_group(tokens[j])) ++j;
    size_t rel_end = j;
    if (j < tokens.size() && prepositions().count(core_of(tokens[j]))) {
      rel_end = ++j;
    }

    const std::string subject = join_range(tokens, 0, verb);
    const std::string relation = join_range(tokens, verb, rel_end);
    const std::string object = join_range(tokens, j, tokens.size());
    if (subject.empty() || relation.empty() || object.empty()) continue;

    elements.push_back(InformationElement::make(subject, relation, object,
                                                static_cast<int>(si), tokenizer_id));
  }
  return elements;
}

}  // namespace

std::string build_extraction_prompt(const std::string& information) {
  static const char* kTemplate =
      "Example:\n"
      "Input:\n"
      "Deadpool 2 is scheduled to be released in the United States on May 18, "
      "2018.  A sequel, Deadpool 3, is in development.\n"
      "Output:\n"
      "<Deadpool 2; is scheduled to be released in; the United States on May 18, "
      "2018>\n"
      "<Deadpool 3; is in; development>\n"
      "Hint:\n"
      "- You should only respond the knowledge graph triplet and not contain "
      "other word.\n"
      "- The knowledge graph triplet is formulated as <s, r, o>, s and o should "
      "not be too long.\n"
      "- Please keep all the relations atomic and indivisible.\n"
      "Please generate the entity and relation triplets of the Input:\n"
      "Input:";
  return kTemplate + information;
}

ParsedTriplets parse_llm_triplets(const std::string& response,
                                  const std::string& tokenizer_id) {
  ParsedTriplets out;
  int next_index = 0;
  for (const auto& raw_line : split_lines(response)) {
    std::string line = trim(raw_line);
    if (line.empty()) continue;
    if (!line.empty() && line.front() == '<') line.erase(0, 1);
    if (!line.empty() && line.back() == '>') line.pop_back();

    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      size_t semi = line.find(';', start);
      if (semi == std::string::npos) {
        fields.push_back(trim(std::string_view(line).substr(start)));
        break;
      }
      fields.push_back(trim(std::string_view(line).substr(start, semi - start)));
      start = semi + 1;
    }

    const bool well_formed = fields.size() == 3 && !fields[0].empty() &&
                             !fields[1].empty() && !fields[2].empty();
    if (!well_formed) {
      ++out.skipped_lines;
      continue;
    }
    out.elements.push_back(InformationElement::make(fields[0], fields[1], fields[2],
                                                    next_index++, tokenizer_id));
  }
  if (out.elements.empty()) {
    throw extraction_empty_error("no parseable triplet line in extractor response (" +
                                 std::to_string(out.skipped_lines) +
                                 " malformed line(s))");
  }
  return out;
}

PromptGraph fuse_elements(const PromptGraph& graph, const std::string& tokenizer_id) {
  struct Group {
    std::string subject;
    std::string relation;
    std::vector<std::string> objects;
    int source_index;
  };
  std::vector<Group> groups;
  std::map<std::string, size_t> by_key;

  for (const auto& e : graph) {
    const std::string key =
        to_lower_ascii(e.subject()) + "\x1f" + to_lower_ascii(e.relation());
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      by_key.emplace(key, groups.size());
      groups.push_back({e.subject(), e.relation(), {e.object()}, e.source_index()});
    } else {
      groups[it->second].objects.push_back(e.object());
    }
  }

  std::vector<InformationElement> fused;
  fused.reserve(groups.size());
  for (const auto& g : groups) {
    fused.push_back(InformationElement::make(
        g.subject, g.relation, join(g.objects, ", "), g.source_index, tokenizer_id));
  }
  return PromptGraph(std::move(fused));
}

PromptGraph extract_graph(const Prompt& prompt, const ExtractionBackend& backend) {
  if (trim(prompt.information()).empty()) {
    throw input_error("information segment is empty");
  }

  std::vector<InformationElement> elements;
  if (backend.kind == ExtractorKind::rule_based) {
    elements =
        rule_extract(split_sentences(prompt.information()), prompt.tokenizer_id());
  } else {
    if (trim(backend.endpoint_url).empty()) {
      throw config_error("llm extractor requires an endpoint URL");
    }
    HttpJsonClient client{backend.endpoint_url, backend.timeout_seconds,
                          backend.retries};
    const nlohmann::json res =
        client.post_json({{"prompt", build_extraction_prompt(prompt.information())},
                          {"max_tokens", backend.max_tokens},
                          {"temperature", backend.temperature}});
    if (!res.is_object() || !res.contains("text") || !res["text"].is_string()) {
      throw transport_error("extractor endpoint response lacks a \"text\" string");
    }
    elements = parse_llm_triplets(res["text"].get<std::string>(), prompt.tokenizer_id())
                   .elements;
  }

  if (elements.empty()) {
    throw extraction_empty_error("no information element extracted");
  }
  return PromptGraph(std::move(elements));
}

}  // namespace saw
