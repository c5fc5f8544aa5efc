#pragma once

#include <string>
#include <vector>

namespace didots {

// Whitespace-delimited tokens, punctuation left attached.
std::vector<std::string> tokenize(const std::string& text);

// Lowercased tokens with surrounding (not internal) punctuation stripped;
// tokens that are pure punctuation are dropped. Used for overlap and
// bag-of-words style comparisons.
std::vector<std::string> word_tokens(const std::string& text);

std::string to_lower(const std::string& s);
std::string trim(const std::string& s);
bool contains_ci(const std::string& haystack, const std::string& needle);

std::string join(const std::vector<std::string>& parts, const std::string& sep);
std::vector<std::string> split_lines(const std::string& text);

// Count of contiguous vowel groups, minimum 1 per word with any letters.
int syllable_count(const std::string& word);

// Longest contiguous run of tokens shared by the two sequences.
std::size_t longest_common_run(const std::vector<std::string>& a,
                               const std::vector<std::string>& b);

}  // namespace didots
