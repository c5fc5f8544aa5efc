#pragma once

#include <map>
#include <string>
#include <vector>

namespace didots {

// Word-level vocabulary over whitespace tokens (punctuation stays attached).
// Ids 0..3 are reserved for <pad>, <bos>, <eos>, <unk>.
class WordTokenizer {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;

  WordTokenizer();
  static WordTokenizer fit(const std::vector<std::string>& texts);

  int vocab_size() const { return static_cast<int>(tokens_.size()); }
  int id_of(const std::string& token) const;
  const std::string& token_of(int id) const { return tokens_[static_cast<std::size_t>(id)]; }

  std::vector<int> encode(const std::string& text) const;
  std::string decode(const std::vector<int>& ids) const;  // special ids skipped

  const std::vector<std::string>& tokens() const { return tokens_; }
  static WordTokenizer from_tokens(std::vector<std::string> tokens);

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, int> ids_;
};

}  // namespace didots
