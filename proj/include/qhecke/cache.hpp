#pragma once

#include "qhecke/classes.hpp"
#include "qhecke/split.hpp"

#include <optional>
#include <string>

namespace qhecke {

struct CacheError : Error {
    using Error::Error;
};

struct CachedData {
    ClassSet C;
    SplitStore splits;
};

// QHECKE_CACHE_DIR if set, else the given default.
std::string cache_dir(const std::string& fallback);
std::string cache_path(const std::string& dir, i64 p);

// Canonical JSON text (sorted keys, fixed indentation, trailing newline).
std::string serialize_cache(const ClassSet& C, const SplitStore& splits);
// Parses and validates: algebra and order must match, the class set is rebuilt from
// the stored bases (no neighbour search) and every stored splitting is re-verified.
CachedData parse_cache(const std::string& text, i64 expected_p);

// Missing file -> nullopt; unreadable or invalid file -> CacheError.
std::optional<CachedData> load_cache(const std::string& dir, i64 p);
// Writes to a temporary file in the same directory, then renames over the target.
void save_cache(const std::string& dir, const ClassSet& C, const SplitStore& splits);

// Throws CacheError unless the cache file for p exists and validates.
CachedData verify_cache(const std::string& dir, i64 p);
// Recomputes the class set and every splitting listed in a readable old file.
CachedData rebuild_cache(const std::string& dir, i64 p);

}  // namespace qhecke
