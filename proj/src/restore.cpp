#include "saw/restore.hpp"

#include "saw/errors.hpp"

namespace saw {

std::string render_element(const InformationElement& element) {
  return element.rendered();
}

std::string restore_text(const PromptGraph& graph, DelimiterMode mode) {
  if (graph.empty()) {
    throw empty_output_error("cannot restore text from an empty graph");
  }
  const char* sep = mode == DelimiterMode::strict ? "; " : ".";
  std::string out;
  for (size_t i = 0; i < graph.size(); ++i) {
    if (i) out.append(sep);
    out.append(render_element(graph[i]));
  }
  return out;
}

std::string assemble_prompt(const std::string& instruction, const std::string& body,
                            const std::string& question) {
  std::string out;
  for (const std::string* seg : {&instruction, &body, &question}) {
    if (seg->empty()) continue;
    if (!out.empty()) out.push_back('\n');
    out.append(*seg);
  }
  return out;
}

nlohmann::ordered_json result_envelope(const CompressionResult& result, Mode mode) {
  nlohmann::ordered_json j{
      {"compressed_prompt", result.compressed_text},
      {"rate", result.achieved_rate},
      {"ratio", nullptr},
      {"mode", mode_to_string(mode)},
      {"delta", nullptr},
  };
  if (result.achieved_rate > 0.0) j["ratio"] = 1.0 / result.achieved_rate;
  if (result.threshold_used) j["delta"] = *result.threshold_used;
  return j;
}

}  // namespace saw
