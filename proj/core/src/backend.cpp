#include "didots/backend.hpp"

#include <algorithm>
#include <cmath>

#include "didots/common.hpp"

namespace didots {

namespace {

std::string lora_a(const std::string& target) { return "adapter." + target + ".A"; }
std::string lora_b(const std::string& target) { return "adapter." + target + ".B"; }
std::string ia3_scale(const std::string& target) { return "adapter." + target + ".scale"; }
std::string bn_down(const std::string& target) { return "adapter." + target + ".down"; }
std::string bn_down_b(const std::string& target) { return "adapter." + target + ".down_b"; }
std::string bn_up(const std::string& target) { return "adapter." + target + ".up"; }
std::string bn_up_b(const std::string& target) { return "adapter." + target + ".up_b"; }

bool is_adapter_param(const std::string& name) {
  return name.rfind("adapter.", 0) == 0;
}

}  // namespace

MicroTransformer::MicroTransformer(WordTokenizer tokenizer, MicroConfig config)
    : tokenizer_(std::move(tokenizer)), config_(config) {
  Rng rng(config_.seed);
  int d = config_.d_model, f = config_.ffn_dim, v = tokenizer_.vocab_size();
  double std_w = 0.08;

  add_param("embed.tok", Matrix::gaussian(v, d, rng, std_w));
  auto add_attention = [&](const std::string& prefix) {
    for (const char* m : {"q", "k", "v", "o"}) {
      add_param(prefix + "." + std::string(m), Matrix::gaussian(d, d, rng, std_w));
    }
  };
  auto add_norm = [&](const std::string& name) {
    add_param(name + ".g", Matrix::filled(1, d, 1.0));
    add_param(name + ".b", Matrix::zeros(1, d));
  };
  for (int i = 0; i < config_.enc_layers; ++i) {
    std::string p = "enc." + std::to_string(i);
    add_attention(p + ".self");
    add_param(p + ".ffn.w1", Matrix::gaussian(d, f, rng, std_w));
    add_param(p + ".ffn.b1", Matrix::zeros(1, f));
    add_param(p + ".ffn.w2", Matrix::gaussian(f, d, rng, std_w));
    add_param(p + ".ffn.b2", Matrix::zeros(1, d));
    add_norm(p + ".ln1");
    add_norm(p + ".ln2");
  }
  add_norm("enc.ln_final");
  for (int i = 0; i < config_.dec_layers; ++i) {
    std::string p = "dec." + std::to_string(i);
    add_attention(p + ".self");
    add_attention(p + ".cross");
    add_param(p + ".ffn.w1", Matrix::gaussian(d, f, rng, std_w));
    add_param(p + ".ffn.b1", Matrix::zeros(1, f));
    add_param(p + ".ffn.w2", Matrix::gaussian(f, d, rng, std_w));
    add_param(p + ".ffn.b2", Matrix::zeros(1, d));
    add_norm(p + ".ln1");
    add_norm(p + ".ln2");
    add_norm(p + ".ln3");
  }
  add_norm("dec.ln_final");
  add_param("out.proj", Matrix::gaussian(d, v, rng, std_w));
  add_param("out.bias", Matrix::zeros(1, v));
}

void MicroTransformer::add_param(const std::string& name, Matrix value) {
  index_[name] = params_.size();
  params_.emplace_back(name, std::move(value));
}

Parameter& MicroTransformer::param(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error(ErrorCode::UNKNOWN_TARGET, "no parameter '" + name + "'");
  return params_[it->second];
}

const Parameter& MicroTransformer::param(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error(ErrorCode::UNKNOWN_TARGET, "no parameter '" + name + "'");
  return params_[it->second];
}

bool MicroTransformer::has_param(const std::string& name) const {
  return index_.count(name) > 0;
}

std::vector<std::string> MicroTransformer::param_names() const {
  std::vector<std::string> names;
  names.reserve(params_.size());
  for (const auto& p : params_) names.push_back(p.name);
  return names;
}

ShapeRegistry MicroTransformer::matrix_registry() const {
  ShapeRegistry reg;
  for (const auto& p : params_) {
    if (is_adapter_param(p.name)) continue;
    if (p.value.rows > 1 && p.value.cols > 1) {
      reg.push_back({p.name, {p.value.rows, p.value.cols}});
    }
  }
  return reg;
}

std::size_t MicroTransformer::total_param_count() const {
  std::size_t total = 0;
  for (const auto& p : params_) {
    if (!is_adapter_param(p.name)) total += p.value.size();
  }
  return total;
}

std::vector<Parameter*> MicroTransformer::trainable_params() {
  std::vector<Parameter*> out;
  for (auto& p : params_) {
    if (p.trainable) out.push_back(&p);
  }
  return out;
}

void MicroTransformer::zero_grads() {
  for (auto& p : params_) p.zero_grad();
}

void MicroTransformer::scale_grads(double s) {
  for (auto& p : params_) {
    for (double& g : p.grad.data) g *= s;
  }
}

// ---------------------------------------------------------------------------
// Adapters

void MicroTransformer::attach_adapter(const AdapterSpec& spec, std::uint64_t seed) {
  if (adapter_.has_value()) {
    throw Error(ErrorCode::CONFIG_INVALID, "an adapter is already attached");
  }
  AdapterSpec resolved = spec;
  if (resolved.targets.empty()) resolved.targets = default_lora_targets(matrix_registry());
  // validates targets and the rank bound
  adapter_param_count(resolved, matrix_registry());

  Rng rng(seed);
  for (auto& p : params_) p.trainable = false;
  for (const auto& target : resolved.targets) {
    const Parameter& base = param(target);
    int d = base.value.rows, k = base.value.cols, r = resolved.rank;
    switch (resolved.kind) {
      case AdapterKind::LORA:
        add_param(lora_a(target), Matrix::gaussian(d, r, rng, 0.02));
        add_param(lora_b(target), Matrix::zeros(r, k));
        break;
      case AdapterKind::IA3:
        add_param(ia3_scale(target), Matrix::filled(1, k, 1.0));
        break;
      case AdapterKind::BOTTLENECK:
        add_param(bn_down(target), Matrix::gaussian(k, r, rng, 0.02));
        add_param(bn_down_b(target), Matrix::zeros(1, r));
        add_param(bn_up(target), Matrix::zeros(r, k));
        add_param(bn_up_b(target), Matrix::zeros(1, k));
        break;
    }
  }
  adapter_ = std::move(resolved);
}

void MicroTransformer::merge_adapter() {
  if (!adapter_.has_value()) {
    throw Error(ErrorCode::NO_ADAPTER, "no adapter attached; merging twice is rejected");
  }
  if (adapter_->kind != AdapterKind::LORA) {
    throw Error(ErrorCode::UNSUPPORTED_KIND,
                std::string(adapter_kind_name(adapter_->kind)) +
                    " adapters stay runtime-composed");
  }
  double s = adapter_->scaling();
  for (const auto& target : adapter_->targets) {
    Matrix delta = matmul(param(lora_a(target)).value, param(lora_b(target)).value);
    add_scaled_in_place(param(target).value, delta, s);
  }
  // drop adapter tensors, unfreeze the merged weights
  std::vector<Parameter> kept;
  index_.clear();
  for (auto& p : params_) {
    if (is_adapter_param(p.name)) continue;
    p.trainable = true;
    index_[p.name] = kept.size();
    kept.push_back(std::move(p));
  }
  params_ = std::move(kept);
  adapter_.reset();
}

const AdapterSpec& MicroTransformer::adapter_spec() const {
  if (!adapter_.has_value()) throw Error(ErrorCode::NO_ADAPTER, "no adapter attached");
  return *adapter_;
}

std::vector<Parameter*> MicroTransformer::adapter_params() {
  std::vector<Parameter*> out;
  for (auto& p : params_) {
    if (is_adapter_param(p.name)) out.push_back(&p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Forward graph

ad::Var MicroTransformer::param_var(const std::string& name) {
  Parameter& p = param(name);
  return grad_enabled_ ? ad::leaf(p) : ad::constant(p.value);
}

ad::Var MicroTransformer::apply_output_adapter(ad::Var y, const std::string& name) {
  if (!adapter_.has_value()) return y;
  const auto& targets = adapter_->targets;
  if (std::find(targets.begin(), targets.end(), name) == targets.end()) return y;
  switch (adapter_->kind) {
    case AdapterKind::LORA:
      return y;  // handled on the input path
    case AdapterKind::IA3:
      return ad::mul_rowvec(y, param_var(ia3_scale(name)));
    case AdapterKind::BOTTLENECK: {
      ad::Var h = ad::tanh_op(
          ad::add_rowvec(ad::matmul(y, param_var(bn_down(name))), param_var(bn_down_b(name))));
      return ad::add(y, ad::add_rowvec(ad::matmul(h, param_var(bn_up(name))),
                                       param_var(bn_up_b(name))));
    }
  }
  return y;
}

ad::Var MicroTransformer::proj(const ad::Var& x, const std::string& name) {
  ad::Var y = ad::matmul(x, param_var(name));
  if (adapter_.has_value() && adapter_->kind == AdapterKind::LORA) {
    const auto& targets = adapter_->targets;
    if (std::find(targets.begin(), targets.end(), name) != targets.end()) {
      ad::Var low = ad::matmul(ad::matmul(x, param_var(lora_a(name))), param_var(lora_b(name)));
      y = ad::add_scaled(y, low, adapter_->scaling());
    }
  }
  return apply_output_adapter(std::move(y), name);
}

Matrix MicroTransformer::positional_encoding(int len) const {
  int d = config_.d_model;
  Matrix pos(len, d);
  for (int p = 0; p < len; ++p) {
    for (int i = 0; i < d; i += 2) {
      double angle = p / std::pow(10000.0, static_cast<double>(i) / d);
      pos.at(p, i) = std::sin(angle);
      if (i + 1 < d) pos.at(p, i + 1) = std::cos(angle);
    }
  }
  return pos;
}

ad::Var MicroTransformer::embed(const std::vector<int>& ids, const std::string&) {
  ad::Var e = ad::gather_rows(param_var("embed.tok"), ids);
  if (adapter_.has_value() && adapter_->kind == AdapterKind::LORA) {
    const auto& targets = adapter_->targets;
    if (std::find(targets.begin(), targets.end(), "embed.tok") != targets.end()) {
      ad::Var low = ad::matmul(ad::gather_rows(param_var(lora_a("embed.tok")), ids),
                               param_var(lora_b("embed.tok")));
      e = ad::add_scaled(e, low, adapter_->scaling());
    }
  }
  e = apply_output_adapter(std::move(e), "embed.tok");
  e = ad::scale(e, std::sqrt(static_cast<double>(config_.d_model)));
  return ad::add(e, ad::constant(positional_encoding(static_cast<int>(ids.size()))));
}

ad::Var MicroTransformer::attention(const ad::Var& q_in, const ad::Var& kv_in,
                                    const std::string& prefix, bool causal) {
  ad::Var q = proj(q_in, prefix + ".q");
  ad::Var k = proj(kv_in, prefix + ".k");
  ad::Var v = proj(kv_in, prefix + ".v");
  ad::Var scores = ad::scale(ad::matmul_nt(q, k),
                             1.0 / std::sqrt(static_cast<double>(config_.d_model)));
  if (causal) {
    Matrix mask(scores->value.rows, scores->value.cols);
    for (int i = 0; i < mask.rows; ++i) {
      for (int j = i + 1; j < mask.cols; ++j) mask.at(i, j) = -1e9;
    }
    scores = ad::add(scores, ad::constant(std::move(mask)));
  }
  ad::Var attn = ad::softmax_rows(scores);
  return proj(ad::matmul(attn, v), prefix + ".o");
}

ad::Var MicroTransformer::ffn(const ad::Var& x, const std::string& prefix) {
  ad::Var h = ad::tanh_op(
      ad::add_rowvec(ad::matmul(x, param_var(prefix + ".ffn.w1")), param_var(prefix + ".ffn.b1")));
  return ad::add_rowvec(ad::matmul(h, param_var(prefix + ".ffn.w2")),
                        param_var(prefix + ".ffn.b2"));
}

ad::Var MicroTransformer::encoder_stack(const std::vector<int>& src_ids) {
  ad::Var x = embed(src_ids, "enc");
  for (int i = 0; i < config_.enc_layers; ++i) {
    std::string p = "enc." + std::to_string(i);
    ad::Var normed = ad::layer_norm(x, param_var(p + ".ln1.g"), param_var(p + ".ln1.b"));
    x = ad::add(x, attention(normed, normed, p + ".self", false));
    ad::Var normed2 = ad::layer_norm(x, param_var(p + ".ln2.g"), param_var(p + ".ln2.b"));
    x = ad::add(x, ffn(normed2, p));
  }
  return ad::layer_norm(x, param_var("enc.ln_final.g"), param_var("enc.ln_final.b"));
}

ad::Var MicroTransformer::decoder_stack(const ad::Var& enc_out,
                                        const std::vector<int>& tgt_in_ids) {
  ad::Var y = embed(tgt_in_ids, "dec");
  for (int i = 0; i < config_.dec_layers; ++i) {
    std::string p = "dec." + std::to_string(i);
    ad::Var n1 = ad::layer_norm(y, param_var(p + ".ln1.g"), param_var(p + ".ln1.b"));
    y = ad::add(y, attention(n1, n1, p + ".self", true));
    ad::Var n2 = ad::layer_norm(y, param_var(p + ".ln2.g"), param_var(p + ".ln2.b"));
    y = ad::add(y, attention(n2, enc_out, p + ".cross", false));
    ad::Var n3 = ad::layer_norm(y, param_var(p + ".ln3.g"), param_var(p + ".ln3.b"));
    y = ad::add(y, ffn(n3, p));
  }
  y = ad::layer_norm(y, param_var("dec.ln_final.g"), param_var("dec.ln_final.b"));
  return ad::add_rowvec(proj(y, "out.proj"), param_var("out.bias"));
}

Matrix MicroTransformer::forward_logits(const std::vector<int>& src_ids,
                                        const std::vector<int>& tgt_in_ids) {
  grad_enabled_ = false;
  ad::Var logits = decoder_stack(encoder_stack(src_ids), tgt_in_ids);
  grad_enabled_ = true;
  return logits->value;
}

double MicroTransformer::sequence_loss(const std::vector<int>& src_ids,
                                       const std::vector<int>& tgt_ids, bool train_mode) {
  std::vector<int> tgt_in, tgt_out;
  tgt_in.push_back(WordTokenizer::kBos);
  for (int id : tgt_ids) {
    tgt_in.push_back(id);
    tgt_out.push_back(id);
  }
  tgt_out.push_back(WordTokenizer::kEos);

  grad_enabled_ = train_mode;
  ad::Var logits = decoder_stack(encoder_stack(src_ids), tgt_in);
  ad::Var loss = ad::cross_entropy(logits, tgt_out, WordTokenizer::kPad);
  grad_enabled_ = true;
  if (train_mode) ad::backward(loss);
  return loss->value.at(0, 0);
}

std::vector<double> MicroTransformer::next_token_logits(const std::vector<int>& src_ids,
                                                        const std::vector<int>& prefix_ids) {
  std::vector<int> tgt_in;
  tgt_in.push_back(WordTokenizer::kBos);
  for (int id : prefix_ids) tgt_in.push_back(id);
  Matrix logits = forward_logits(src_ids, tgt_in);
  std::vector<double> out(static_cast<std::size_t>(logits.cols));
  int last = logits.rows - 1;
  for (int c = 0; c < logits.cols; ++c) out[static_cast<std::size_t>(c)] = logits.at(last, c);
  return out;
}

std::vector<int> MicroTransformer::encode_source(const std::string& text) const {
  std::vector<int> ids = tokenizer_.encode(text);
  ids.push_back(WordTokenizer::kEos);
  if (static_cast<int>(ids.size()) > config_.max_positions) {
    ids.resize(static_cast<std::size_t>(config_.max_positions));
  }
  return ids;
}

std::vector<int> MicroTransformer::encode_target(const std::string& text) const {
  std::vector<int> ids = tokenizer_.encode(text);
  if (static_cast<int>(ids.size()) > config_.max_positions - 1) {
    ids.resize(static_cast<std::size_t>(config_.max_positions - 1));
  }
  return ids;
}

}  // namespace didots
