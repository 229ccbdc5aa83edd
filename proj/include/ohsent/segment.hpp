#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ohsent {

/// Collapses whitespace runs to a single space and trims both ends.
std::string normalize_whitespace(std::string_view text);

/// Number of whitespace-delimited tokens.
std::size_t word_count(std::string_view text);

/// Rule-based sentence splitter used for raw transcript preprocessing.
///
/// A boundary is placed after a run of terminal punctuation (. ! ?), optionally
/// followed by closing quotes or brackets, when the next token starts with an
/// upper-case letter, a digit or an opening quote. A period closing a token
/// listed in the abbreviation set never ends a sentence.
class SentenceSegmenter {
 public:
  static std::vector<std::string> default_abbreviations();

  SentenceSegmenter();
  explicit SentenceSegmenter(std::vector<std::string> abbreviations);

  /// Throws Error(EmptyText) when the text is blank after normalization.
  std::vector<std::string> segment(std::string_view text) const;

  const std::vector<std::string>& abbreviations() const noexcept { return abbreviations_; }

 private:
  bool is_abbreviation(std::string_view token) const;

  std::vector<std::string> abbreviations_;
};

}  // namespace ohsent
