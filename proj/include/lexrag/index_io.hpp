#pragma once

#include "lexrag/index.hpp"

#include <filesystem>
#include <stdexcept>
#include <vector>

namespace lexrag {

class IndexIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads a corpus from JSONL: one object per line with string fields
/// id / title / contents. Line order is preserved. Throws IndexIoError with a
/// line number on malformed input and on an empty corpus.
std::vector<Document> ingest_jsonl(const std::filesystem::path& path);

/// Persists a sealed snapshot into `dir` as a manifest (manifest.json) plus a
/// checksummed binary postings file (index.bin). Identical snapshots produce
/// byte-identical files.
void save_index(const IndexSnapshot& snapshot, const std::filesystem::path& dir);

/// Loads a snapshot saved by save_index. Throws IndexIoError on a version
/// mismatch or on corruption (with the failing byte offset).
IndexSnapshot load_index(const std::filesystem::path& dir);

} // namespace lexrag
