#pragma once

#include <string>

namespace lexrag {

enum class Backend { logical, hybrid };
enum class ToolDescriptionVariant { full, syntax_only };

const char* backend_name(Backend backend);

// Tool-description prompt for a backend/variant pair. The variant only
// affects the logical tool; the hybrid tool has a single description.
const std::string& tool_description(Backend backend, ToolDescriptionVariant variant);

} // namespace lexrag
