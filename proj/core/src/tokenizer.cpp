#include "didots/tokenizer.hpp"

#include <algorithm>
#include <set>

#include "didots/common.hpp"
#include "didots/text.hpp"

namespace didots {

WordTokenizer::WordTokenizer() {
  tokens_ = {"<pad>", "<bos>", "<eos>", "<unk>"};
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    ids_[tokens_[i]] = static_cast<int>(i);
  }
}

WordTokenizer WordTokenizer::fit(const std::vector<std::string>& texts) {
  std::set<std::string> vocab;
  for (const auto& text : texts) {
    for (const auto& tok : tokenize(text)) vocab.insert(tok);
  }
  WordTokenizer t;
  for (const auto& tok : vocab) {
    t.ids_[tok] = static_cast<int>(t.tokens_.size());
    t.tokens_.push_back(tok);
  }
  return t;
}

WordTokenizer WordTokenizer::from_tokens(std::vector<std::string> tokens) {
  WordTokenizer t;
  t.tokens_ = std::move(tokens);
  t.ids_.clear();
  for (std::size_t i = 0; i < t.tokens_.size(); ++i) {
    t.ids_[t.tokens_[i]] = static_cast<int>(i);
  }
  return t;
}

int WordTokenizer::id_of(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

std::vector<int> WordTokenizer::encode(const std::string& text) const {
  std::vector<int> out;
  for (const auto& tok : tokenize(text)) out.push_back(id_of(tok));
  return out;
}

std::string WordTokenizer::decode(const std::vector<int>& ids) const {
  std::vector<std::string> toks;
  for (int id : ids) {
    if (id <= kUnk) continue;
    if (id < vocab_size()) toks.push_back(tokens_[static_cast<std::size_t>(id)]);
  }
  return join(toks, " ");
}

}  // namespace didots
