#include "saw/prompt.hpp"

#include <algorithm>

#include "saw/errors.hpp"
#include "saw/text.hpp"
#include "saw/tokenizer.hpp"

namespace saw {

Prompt Prompt::make(std::string instruction, std::string information,
                    std::string question, const std::string& tokenizer_id) {
  Prompt p;
  p.instruction_ = std::move(instruction);
  p.information_ = std::move(information);
  p.question_ = std::move(question);
  p.tokenizer_id_ = tokenizer_id;
  p.instruction_tokens_ = count_tokens(p.instruction_, tokenizer_id);
  p.information_tokens_ = count_tokens(p.information_, tokenizer_id);
  p.question_tokens_ = count_tokens(p.question_, tokenizer_id);
  return p;
}

Prompt Prompt::from_json(const nlohmann::json& j, const std::string& tokenizer_id) {
  if (!j.is_object()) throw input_error("prompt JSON must be an object");
  auto field = [&](const char* key) -> std::string {
    if (!j.contains(key)) return "";
    if (!j[key].is_string()) {
      throw input_error(std::string("prompt JSON field must be a string: ") + key);
    }
    return j[key].get<std::string>();
  };
  return make(field("instruction"), field("information"), field("question"),
              tokenizer_id);
}

nlohmann::ordered_json Prompt::to_json() const {
  return nlohmann::ordered_json{{"instruction", instruction_},
                                {"information", information_},
                                {"question", question_}};
}

namespace {

// Field normalization: trim, collapse whitespace runs, drop reserved ';'.
std::string normalize_field(const std::string& raw) {
  std::string no_semi;
  no_semi.reserve(raw.size());
  for (char c : raw) {
    if (c != ';') no_semi.push_back(c);
  }
  return trim(collapse_whitespace(no_semi));
}

}  // namespace

InformationElement InformationElement::make(std::string subject, std::string relation,
                                            std::string object, int source_index,
                                            const std::string& tokenizer_id) {
  InformationElement e;
  e.subject_ = normalize_field(subject);
  e.relation_ = normalize_field(relation);
  e.object_ = normalize_field(object);
  if (e.subject_.empty() || e.relation_.empty() || e.object_.empty()) {
    throw input_error("information element field empty after normalization");
  }
  if (source_index < 0) {
    throw input_error("information element source_index must be >= 0");
  }
  e.source_index_ = source_index;
  e.token_length_ = count_tokens(e.rendered(), tokenizer_id);
  return e;
}

std::string InformationElement::rendered() const {
  return subject_ + " " + relation_ + " " + object_;
}

PromptGraph::PromptGraph(std::vector<InformationElement> elements)
    : elements_(std::move(elements)) {
  total_token_length_ = 0;
  for (const auto& e : elements_) total_token_length_ += e.token_length();
}

bool PromptGraph::is_source_ordered() const {
  for (size_t i = 1; i < elements_.size(); ++i) {
    if (elements_[i - 1].source_index() >= elements_[i].source_index()) return false;
  }
  return true;
}

PromptGraph PromptGraph::from_json(const nlohmann::json& j,
                                   const std::string& tokenizer_id) {
  if (!j.is_object() || !j.contains("elements") || !j["elements"].is_array()) {
    throw input_error("graph JSON must be an object with an \"elements\" array");
  }
  std::vector<InformationElement> elements;
  for (const auto& ej : j["elements"]) {
    if (!ej.is_object() || !ej.contains("s") || !ej.contains("r") || !ej.contains("o") ||
        !ej.contains("source_index")) {
      throw input_error("graph element JSON needs s, r, o, source_index");
    }
    elements.push_back(InformationElement::make(
        ej["s"].get<std::string>(), ej["r"].get<std::string>(),
        ej["o"].get<std::string>(), ej["source_index"].get<int>(), tokenizer_id));
  }
  return PromptGraph(std::move(elements));
}

nlohmann::ordered_json PromptGraph::to_json() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : elements_) {
    arr.push_back(nlohmann::ordered_json{{"s", e.subject()},
                                         {"r", e.relation()},
                                         {"o", e.object()},
                                         {"source_index", e.source_index()}});
  }
  return nlohmann::ordered_json{{"elements", std::move(arr)}};
}

std::string mode_to_string(Mode mode) {
  switch (mode) {
    case Mode::task_aware:
      return "task-aware";
    case Mode::task_agnostic:
      return "task-agnostic";
    case Mode::adaptive:
      return "adaptive";
  }
  return "task-agnostic";
}

Mode mode_from_string(const std::string& s) {
  if (s == "task-aware") return Mode::task_aware;
  if (s == "task-agnostic") return Mode::task_agnostic;
  if (s == "adaptive") return Mode::adaptive;
  throw config_error("unknown mode: " + s);
}

void CompressionConfig::validate() const {
  if (!(target_rate > 0.0 && target_rate <= 1.0)) {
    throw config_error("target_rate must be in (0, 1]");
  }
  if (!(interval_threshold > 0.0 && interval_threshold < 1.0)) {
    throw config_error("interval_threshold must be in (0, 1)");
  }
  if (!TokenizerRegistry::instance().has(tokenizer_id)) {
    throw config_error("unknown tokenizer: " + tokenizer_id);
  }
}

void CompressionConfig::validate(const Prompt& prompt) const {
  validate();
  if (mode == Mode::task_aware && trim(prompt.question()).empty()) {
    throw config_error("task-aware mode requires a non-empty question");
  }
}

double compression_rate(int compressed_len, int original_len) {
  if (original_len == 0) {
    throw domain_error("compression_rate: original length is zero");
  }
  if (original_len < 0 || compressed_len < 0 || compressed_len > original_len) {
    throw domain_error("compression_rate: compressed length outside [0, original]");
  }
  return static_cast<double>(compressed_len) / static_cast<double>(original_len);
}

}  // namespace saw
