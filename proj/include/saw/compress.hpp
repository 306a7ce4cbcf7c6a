#pragma once

#include "saw/adaptive.hpp"
#include "saw/task_agnostic.hpp"
#include "saw/task_aware.hpp"

namespace saw {

// Dispatches on config.mode.
CompressionResult compress(const Prompt& prompt, const CompressionConfig& config,
                           const Encoder& encoder, const ExtractionBackend& backend);

}  // namespace saw
