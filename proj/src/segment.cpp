#include "ohsent/segment.hpp"

#include <algorithm>
#include <cctype>

#include "ohsent/error.hpp"

namespace ohsent {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }
bool is_opener(char c) { return c == '"' || c == '\'' || c == '(' || c == '['; }

bool starts_sentence(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isupper(u) || std::isdigit(u) || is_opener(c);
}

}  // namespace

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::size_t word_count(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

std::vector<std::string> SentenceSegmenter::default_abbreviations() {
  return {"Mr.", "Mrs.", "Ms.", "Dr.", "St.", "vs.", "etc.", "e.g.", "i.e.", "No."};
}

SentenceSegmenter::SentenceSegmenter() : SentenceSegmenter(default_abbreviations()) {}

SentenceSegmenter::SentenceSegmenter(std::vector<std::string> abbreviations)
    : abbreviations_(std::move(abbreviations)) {}

bool SentenceSegmenter::is_abbreviation(std::string_view token) const {
  // Leading openers such as '(' or '"' do not belong to the abbreviation.
  while (!token.empty() && is_opener(token.front())) token.remove_prefix(1);
  return std::find(abbreviations_.begin(), abbreviations_.end(), token) != abbreviations_.end();
}

std::vector<std::string> SentenceSegmenter::segment(std::string_view raw) const {
  const std::string text = normalize_whitespace(raw);
  if (text.empty()) throw Error(ErrorCode::EmptyText, "text is empty after normalization");

  std::vector<std::string> sentences;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminal(text[i])) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && is_terminal(text[end])) ++end;
    const bool single_period = end - i == 1 && text[i] == '.';
    while (end < text.size() && is_closer(text[end])) ++end;

    // Boundary needs "<punct><space><starter>".
    if (end + 1 < text.size() && text[end] == ' ' && starts_sentence(text[end + 1])) {
      bool suppressed = false;
      if (single_period) {
        const std::size_t token_start = text.rfind(' ', i);
        const std::size_t from = token_start == std::string::npos ? 0 : token_start + 1;
        suppressed = is_abbreviation(std::string_view(text).substr(from, i + 1 - from));
      }
      if (!suppressed) {
        sentences.emplace_back(text.substr(start, end - start));
        start = end + 1;
      }
    }
    i = end;
  }
  if (start < text.size()) sentences.emplace_back(text.substr(start));
  return sentences;
}

}  // namespace ohsent
