#include "saw/compress.hpp"

namespace saw {

CompressionResult compress(const Prompt& prompt, const CompressionConfig& config,
                           const Encoder& encoder, const ExtractionBackend& backend) {
  switch (config.mode) {
    case Mode::task_aware:
      return compress_task_aware(prompt, config, encoder, backend);
    case Mode::adaptive:
      return compress_adaptive(prompt, config, encoder, backend);
    case Mode::task_agnostic:
      break;
  }
  return compress_task_agnostic(prompt, config, encoder, backend);
}

}  // namespace saw
