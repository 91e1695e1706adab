#include "dpslab/summary.hpp"

#include <cctype>

namespace dps {

std::string to_string(Generator g) {
  switch (g) {
    case Generator::NLG:
      return "NLG";
    case Generator::SWUM:
      return "SWUM";
    case Generator::LLM:
      return "LLM";
    case Generator::Human:
      return "Human";
  }
  return "NLG";
}

Generator generator_from_string(const std::string& s) {
  if (s == "NLG") return Generator::NLG;
  if (s == "SWUM") return Generator::SWUM;
  if (s == "LLM") return Generator::LLM;
  if (s == "Human") return Generator::Human;
  throw Error("unknown generator: " + s);
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Default:
      return "default";
    case Variant::Concise:
      return "concise";
    case Variant::NonConcise:
      return "non_concise";
    case Variant::Len20:
      return "len20";
    case Variant::Len40:
      return "len40";
    case Variant::Len60:
      return "len60";
    case Variant::Len80:
      return "len80";
  }
  return "default";
}

Variant variant_from_string(const std::string& s) {
  if (s == "default") return Variant::Default;
  if (s == "concise") return Variant::Concise;
  if (s == "non_concise") return Variant::NonConcise;
  if (s == "len20") return Variant::Len20;
  if (s == "len40") return Variant::Len40;
  if (s == "len60") return Variant::Len60;
  if (s == "len80") return Variant::Len80;
  throw Error("unknown variant: " + s);
}

int count_words(std::string_view text) {
  int count = 0;
  bool in_word = false;
  for (char c : text) {
    bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++count;
    in_word = !space;
  }
  return count;
}

Summary make_summary(std::string file_id, Generator generator, Variant variant,
                     int iteration, std::string text) {
  Summary s;
  s.file_id = std::move(file_id);
  s.generator = generator;
  s.variant = variant;
  s.iteration = iteration;
  s.word_count = count_words(text);
  s.text = std::move(text);
  if (s.text.empty()) throw Error("summary text must be non-empty");
  return s;
}

}  // namespace dps
