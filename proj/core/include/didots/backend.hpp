#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "didots/adapter.hpp"
#include "didots/autodiff.hpp"
#include "didots/tokenizer.hpp"

namespace didots {

// Sequence-to-sequence student surface: tokenizer, an enumerable registry of
// named weight matrices, teacher-forced per-token distributions, and the
// loss/gradient hooks the trainer drives.
class StudentBackend {
 public:
  virtual ~StudentBackend() = default;

  virtual const WordTokenizer& tokenizer() const = 0;
  virtual ShapeRegistry matrix_registry() const = 0;
  virtual std::size_t total_param_count() const = 0;

  virtual std::vector<Parameter*> trainable_params() = 0;
  virtual void zero_grads() = 0;
  virtual void scale_grads(double s) = 0;

  // Teacher-forced logits (rows = target positions, cols = vocab).
  virtual Matrix forward_logits(const std::vector<int>& src_ids,
                                const std::vector<int>& tgt_in_ids) = 0;

  // Mean token cross-entropy of target given source; accumulates gradients
  // when train_mode, forward-only otherwise.
  virtual double sequence_loss(const std::vector<int>& src_ids,
                               const std::vector<int>& tgt_ids, bool train_mode) = 0;

  // Logits of the next token after `prefix` (no gradients).
  virtual std::vector<double> next_token_logits(const std::vector<int>& src_ids,
                                                const std::vector<int>& prefix_ids) = 0;
};

struct MicroConfig {
  int d_model = 64;
  int ffn_dim = 128;
  int enc_layers = 2;
  int dec_layers = 2;
  int max_positions = 256;
  std::uint64_t seed = 1;
};

// Desk-scale reference backend: a small encoder-decoder transformer
// (pre-norm, single-head attention) trained from scratch in double
// precision. A pretrained production model plugs in behind the same
// StudentBackend surface.
class MicroTransformer : public StudentBackend {
 public:
  MicroTransformer(WordTokenizer tokenizer, MicroConfig config);

  const WordTokenizer& tokenizer() const override { return tokenizer_; }
  const MicroConfig& config() const { return config_; }
  ShapeRegistry matrix_registry() const override;
  std::size_t total_param_count() const override;

  std::vector<Parameter*> trainable_params() override;
  void zero_grads() override;
  void scale_grads(double s) override;

  Matrix forward_logits(const std::vector<int>& src_ids,
                        const std::vector<int>& tgt_in_ids) override;
  double sequence_loss(const std::vector<int>& src_ids, const std::vector<int>& tgt_ids,
                       bool train_mode) override;
  std::vector<double> next_token_logits(const std::vector<int>& src_ids,
                                        const std::vector<int>& prefix_ids) override;

  // Adapter lifecycle. attach freezes every base weight and adds trainable
  // adapter tensors (LORA: A gaussian, B zero; IA3: ones; BOTTLENECK: zero
  // up-projection), so the adapted model is extensionally equal to the base
  // at init. merge folds W' = W + (alpha/r) * A * B into the stored weights
  // (LORA only) and detaches the adapter.
  void attach_adapter(const AdapterSpec& spec, std::uint64_t seed = 7);
  void merge_adapter();
  bool has_adapter() const { return adapter_.has_value(); }
  const AdapterSpec& adapter_spec() const;
  std::vector<Parameter*> adapter_params();

  // named access (base and adapter tensors) for checkpoints and tests
  Parameter& param(const std::string& name);
  const Parameter& param(const std::string& name) const;
  std::vector<std::string> param_names() const;
  bool has_param(const std::string& name) const;

  // source/target encodings used across training and decoding
  std::vector<int> encode_source(const std::string& text) const;
  std::vector<int> encode_target(const std::string& text) const;

 private:
  ad::Var param_var(const std::string& name);
  ad::Var proj(const ad::Var& x, const std::string& name);
  ad::Var apply_output_adapter(ad::Var y, const std::string& name);
  ad::Var embed(const std::vector<int>& ids, const std::string& pos_kind);
  ad::Var encoder_stack(const std::vector<int>& src_ids);
  ad::Var decoder_stack(const ad::Var& enc_out, const std::vector<int>& tgt_in_ids);
  ad::Var attention(const ad::Var& q_in, const ad::Var& kv_in, const std::string& prefix,
                    bool causal);
  ad::Var ffn(const ad::Var& x, const std::string& prefix);
  Matrix positional_encoding(int len) const;
  void add_param(const std::string& name, Matrix value);

  WordTokenizer tokenizer_;
  MicroConfig config_;
  std::vector<Parameter> params_;
  std::map<std::string, std::size_t> index_;
  std::optional<AdapterSpec> adapter_;
  bool grad_enabled_ = true;
};

}  // namespace didots
