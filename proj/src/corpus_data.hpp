#pragma once

#include <cstddef>

namespace miniproof::corpus_data {

struct EmbeddedFile {
  const char* path;  // relative to the corpus directory
  const char* text;
};

extern const EmbeddedFile kFiles[];
extern const std::size_t kFileCount;

}  // namespace miniproof::corpus_data
