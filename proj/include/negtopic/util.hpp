#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace negtopic {

// SHA-256 as lowercase hex.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary sibling and renames, so readers never see a partial artifact.
void write_file(const std::filesystem::path& path, std::string_view contents);

// Non-empty, trimmed lines of a UTF-8 word-list file; lines starting with '#' are comments.
std::vector<std::string> read_word_list(const std::filesystem::path& path);
std::vector<std::string> parse_word_list(std::string_view text);

// "[Name]" sections followed by one term per line.
struct Section {
  std::string name;
  std::vector<std::string> terms;
};
std::vector<Section> parse_sections(std::string_view text, std::string_view source);

std::string_view trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);

// Resolves a worker-count knob: 0 means hardware concurrency.
unsigned resolve_workers(unsigned requested);

/// Runs fn(begin, end) over contiguous chunks of [0, n). Chunk boundaries
/// depend only on n and workers, so callers that write into per-index slots
/// get identical results for every worker count.
template <typename Fn>
void parallel_for(size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, workers);
  if (workers == 1 || n < 2) {
    fn(size_t{0}, n);
    return;
  }
  const size_t chunks = std::min<size_t>(workers, n);
  const size_t step = (n + chunks - 1) / chunks;
  std::vector<std::exception_ptr> errors(chunks);
  {
    std::vector<std::jthread> threads;
    threads.reserve(chunks);
    size_t slot = 0;
    for (size_t begin = 0; begin < n; begin += step, ++slot) {
      const size_t end = std::min(n, begin + step);
      threads.emplace_back([&fn, &errors, slot, begin, end] {
        try {
          fn(begin, end);
        } catch (...) {
          errors[slot] = std::current_exception();
        }
      });
    }
  }
  for (auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
}

}  // namespace negtopic
