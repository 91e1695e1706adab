#pragma once

#include <string>
#include <string_view>

#include "dpslab/errors.hpp"

namespace dps {

// Which pipeline produced a summary. Human marks corpus reference texts.
enum class Generator { NLG, SWUM, LLM, Human };

// Prompt variant used for LLM generations. Deterministic generators always
// use Default.
enum class Variant {
  Default,
  Concise,
  NonConcise,
  Len20,
  Len40,
  Len60,
  Len80,
};

std::string to_string(Generator g);
Generator generator_from_string(const std::string& s);

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct Summary {
  std::string file_id;
  Generator generator = Generator::NLG;
  Variant variant = Variant::Default;
  int iteration = 1;
  std::string text;
  int word_count = 0;

  bool operator==(const Summary&) const = default;
};

// Number of whitespace-delimited tokens in `text`.
int count_words(std::string_view text);

// Builds a Summary with word_count filled in. Throws Error on empty text.
Summary make_summary(std::string file_id, Generator generator, Variant variant,
                     int iteration, std::string text);

}  // namespace dps
