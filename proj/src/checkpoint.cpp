#include "deid/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload assumes a little-endian host");

namespace deid {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'D', 'E', 'I', 'D', 'C', 'K', 'P', '1'};

std::string encoder_name(EncoderKind k) {
  switch (k) {
    case EncoderKind::BiLstm: return "bilstm";
    case EncoderKind::Transformer: return "transformer";
    case EncoderKind::TransformerBiLstm: return "transformer-bilstm";
  }
  return "bilstm";
}

EncoderKind encoder_from_name(const std::string& s) {
  if (s == "bilstm") return EncoderKind::BiLstm;
  if (s == "transformer") return EncoderKind::Transformer;
  if (s == "transformer-bilstm") return EncoderKind::TransformerBiLstm;
  throw std::runtime_error("checkpoint: unknown encoder kind " + s);
}

json config_to_json(const ModelConfig& c) {
  return json{{"name", c.name},
              {"use_char", c.use_char},
              {"encoder", encoder_name(c.encoder)},
              {"decoder", c.decoder == DecoderKind::Crf ? "crf" : "softmax"},
              {"freeze_char", c.freeze_char},
              {"d", c.d},
              {"d_char", c.d_char},
              {"char_hidden", c.char_hidden},
              {"h", c.h},
              {"heads", c.heads},
              {"layers", c.layers},
              {"m", c.m},
              {"c_max", c.c_max}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.name = j.at("name").get<std::string>();
  c.use_char = j.at("use_char").get<bool>();
  c.encoder = encoder_from_name(j.at("encoder").get<std::string>());
  c.decoder = j.at("decoder").get<std::string>() == "crf" ? DecoderKind::Crf
                                                          : DecoderKind::Softmax;
  c.freeze_char = j.at("freeze_char").get<bool>();
  c.d = j.at("d").get<std::size_t>();
  c.d_char = j.at("d_char").get<std::size_t>();
  c.char_hidden = j.at("char_hidden").get<std::size_t>();
  c.h = j.at("h").get<std::size_t>();
  c.heads = j.at("heads").get<std::size_t>();
  c.layers = j.at("layers").get<std::size_t>();
  c.m = j.at("m").get<std::size_t>();
  c.c_max = j.at("c_max").get<std::size_t>();
  return c;
}

}  // namespace

void save_checkpoint(Model& model, const std::string& path) {
  json header;
  header["format"] = "deid-checkpoint-1";
  header["config"] = config_to_json(model.config());

  const Vocabulary& v = model.vocabulary();
  header["vocab"]["tokens"] = v.tokens;
  std::vector<std::uint32_t> chars(v.chars.begin(), v.chars.end());
  header["vocab"]["chars"] = chars;

  // Store the phi types; the label inventory is a pure function of them.
  std::vector<std::string> types;
  for (const auto& l : model.label_set().labels())
    if (l.size() > 2 && l[0] == 'B') types.push_back(l.substr(2));
  header["phi_types"] = types;

  auto params = model.parameters();
  json index = json::array();
  std::size_t offset = 0;
  for (const Parameter* p : params) {
    index.push_back({{"name", p->name},
                     {"shape", p->value.shape()},
                     {"offset", offset}});
    offset += p->value.size() * sizeof(double);
  }
  header["params"] = index;

  const std::string header_str = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t hlen = header_str.size();
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
  for (const Parameter* p : params)
    out.write(reinterpret_cast<const char*>(p->value.data()),
              static_cast<std::streamsize>(p->value.size() * sizeof(double)));
  if (!out)
    throw std::runtime_error("save_checkpoint: write failed for " + path);
}

Model load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("load_checkpoint: " + path +
                             " is not a checkpoint file");
  std::uint64_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  std::string header_str(hlen, '\0');
  in.read(header_str.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw std::runtime_error("load_checkpoint: truncated header");
  const json header = json::parse(header_str);

  const ModelConfig cfg = config_from_json(header.at("config"));

  Vocabulary vocab;
  vocab.tokens = header.at("vocab").at("tokens").get<std::vector<std::string>>();
  for (std::uint32_t c :
       header.at("vocab").at("chars").get<std::vector<std::uint32_t>>())
    vocab.chars.push_back(static_cast<char32_t>(c));
  for (std::size_t i = 2; i < vocab.tokens.size(); ++i)
    vocab.token_to_id[vocab.tokens[i]] = static_cast<int>(i);
  for (std::size_t i = 2; i < vocab.chars.size(); ++i)
    vocab.char_to_id[vocab.chars[i]] = static_cast<int>(i);

  LabelSet labels = LabelSet::from_phi_types(
      header.at("phi_types").get<std::vector<std::string>>());

  Model model(cfg, std::move(vocab), std::move(labels), 0);

  std::unordered_map<std::string, Parameter*> by_name;
  for (Parameter* p : model.parameters()) by_name[p->name] = p;
  const std::streampos payload_start = in.tellg();
  for (const auto& entry : header.at("params")) {
    const std::string name = entry.at("name").get<std::string>();
    auto it = by_name.find(name);
    if (it == by_name.end())
      throw std::runtime_error("load_checkpoint: parameter " + name +
                               " does not exist in model " + cfg.name);
    Parameter* p = it->second;
    const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
    if (shape != p->value.shape())
      throw std::runtime_error("load_checkpoint: shape mismatch for " + name);
    in.seekg(payload_start +
             static_cast<std::streamoff>(entry.at("offset").get<std::size_t>()));
    in.read(reinterpret_cast<char*>(p->value.data()),
            static_cast<std::streamsize>(p->value.size() * sizeof(double)));
    if (!in) throw std::runtime_error("load_checkpoint: truncated payload");
  }
  return model;
}

}  // namespace deid
