#pragma once

#include <string>

namespace lexrag {

/// A retrievable passage. Either field may be empty, but not both.
struct Document {
    std::string doc_id;
    std::string title;
    std::string content;
};

enum class Field { title, content };

inline const char* field_name(Field f) {
    return f == Field::title ? "title" : "content";
}

} // namespace lexrag
