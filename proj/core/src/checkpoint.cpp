#include "didots/checkpoint.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "didots/common.hpp"

namespace didots {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void write_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

void save_checkpoint(const MicroTransformer& model, const std::string& dir,
                     const std::map<std::string, std::string>& metadata) {
  fs::create_directories(dir);

  json meta;
  meta["schema_version"] = 1;
  meta["config"]["d_model"] = model.config().d_model;
  meta["config"]["ffn_dim"] = model.config().ffn_dim;
  meta["config"]["enc_layers"] = model.config().enc_layers;
  meta["config"]["dec_layers"] = model.config().dec_layers;
  meta["config"]["max_positions"] = model.config().max_positions;
  meta["config"]["seed"] = model.config().seed;
  meta["vocab"] = model.tokenizer().tokens();
  if (model.has_adapter()) {
    const AdapterSpec& spec = model.adapter_spec();
    meta["adapter"]["kind"] = adapter_kind_name(spec.kind);
    meta["adapter"]["rank"] = spec.rank;
    meta["adapter"]["alpha"] = spec.alpha;
    meta["adapter"]["scaling"] = spec.scaling();
    meta["adapter"]["targets"] = spec.targets;
  }
  for (const auto& [k, v] : metadata) meta["metadata"][k] = v;

  std::ofstream mj(fs::path(dir) / "model.json", std::ios::binary);
  if (!mj) throw Error(ErrorCode::IO_ERROR, "cannot write model.json in " + dir);
  mj << meta.dump(2) << "\n";

  std::ofstream wb(fs::path(dir) / "weights.bin", std::ios::binary);
  if (!wb) throw Error(ErrorCode::IO_ERROR, "cannot write weights.bin in " + dir);
  std::vector<std::string> names = model.param_names();
  write_u32(wb, static_cast<std::uint32_t>(names.size()));
  for (const auto& name : names) {
    const Parameter& p = model.param(name);
    write_u32(wb, static_cast<std::uint32_t>(name.size()));
    wb.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(wb, static_cast<std::uint32_t>(p.value.rows));
    write_u32(wb, static_cast<std::uint32_t>(p.value.cols));
    wb.write(reinterpret_cast<const char*>(p.value.data.data()),
             static_cast<std::streamsize>(p.value.data.size() * sizeof(double)));
  }
}

MicroTransformer load_checkpoint(const std::string& dir) {
  std::ifstream mj(fs::path(dir) / "model.json");
  if (!mj) throw Error(ErrorCode::MISSING_ARTIFACT, "no model.json in " + dir);
  json meta = json::parse(mj);

  MicroConfig config;
  config.d_model = meta["config"]["d_model"].get<int>();
  config.ffn_dim = meta["config"]["ffn_dim"].get<int>();
  config.enc_layers = meta["config"]["enc_layers"].get<int>();
  config.dec_layers = meta["config"]["dec_layers"].get<int>();
  config.max_positions = meta["config"]["max_positions"].get<int>();
  config.seed = meta["config"]["seed"].get<std::uint64_t>();

  WordTokenizer tokenizer =
      WordTokenizer::from_tokens(meta["vocab"].get<std::vector<std::string>>());
  MicroTransformer model(std::move(tokenizer), config);

  if (meta.contains("adapter")) {
    AdapterSpec spec;
    spec.kind = parse_adapter_kind(meta["adapter"]["kind"].get<std::string>());
    spec.rank = meta["adapter"]["rank"].get<int>();
    spec.alpha = meta["adapter"]["alpha"].get<double>();
    spec.targets = meta["adapter"]["targets"].get<std::vector<std::string>>();
    model.attach_adapter(spec);
  }

  std::ifstream wb(fs::path(dir) / "weights.bin", std::ios::binary);
  if (!wb) throw Error(ErrorCode::MISSING_ARTIFACT, "no weights.bin in " + dir);
  std::uint32_t count = read_u32(wb);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t name_len = read_u32(wb);
    std::string name(name_len, '\0');
    wb.read(name.data(), name_len);
    std::uint32_t rows = read_u32(wb), cols = read_u32(wb);
    if (!model.has_param(name)) {
      throw Error(ErrorCode::MALFORMED_RECORD, "unexpected tensor '" + name + "'");
    }
    Parameter& p = model.param(name);
    if (p.value.rows != static_cast<int>(rows) || p.value.cols != static_cast<int>(cols)) {
      throw Error(ErrorCode::MALFORMED_RECORD, "shape mismatch for '" + name + "'");
    }
    wb.read(reinterpret_cast<char*>(p.value.data.data()),
            static_cast<std::streamsize>(p.value.data.size() * sizeof(double)));
    if (!wb) throw Error(ErrorCode::MALFORMED_RECORD, "weights.bin truncated at '" + name + "'");
  }
  return model;
}

std::map<std::string, std::string> checkpoint_metadata(const std::string& dir) {
  std::ifstream mj(fs::path(dir) / "model.json");
  if (!mj) throw Error(ErrorCode::MISSING_ARTIFACT, "no model.json in " + dir);
  json meta = json::parse(mj);
  std::map<std::string, std::string> out;
  if (meta.contains("metadata")) {
    for (auto& [k, v] : meta["metadata"].items()) out[k] = v.get<std::string>();
  }
  return out;
}

}  // namespace didots
