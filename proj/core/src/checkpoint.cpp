#include "gmatch/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "gmatch/conllu.hpp"
#include "json.hpp"

namespace gmatch {

namespace {

constexpr char kMagic[8] = {'G', 'M', 'C', 'H', 'K', 'P', 'T', '1'};
constexpr int kFormatVersion = 1;

const char* dtype_name() { return sizeof(ad::real) == 8 ? "f64" : "f32"; }

// In-place little-endian conversion; a no-op on little-endian hosts.
void to_little_endian(std::vector<ad::real>& data) {
  if constexpr (std::endian::native == std::endian::big) {
    for (ad::real& x : data) {
      auto* bytes = reinterpret_cast<unsigned char*>(&x);
      for (std::size_t i = 0; i < sizeof(ad::real) / 2; ++i) {
        std::swap(bytes[i], bytes[sizeof(ad::real) - 1 - i]);
      }
    }
  }
}

void write_u64_le(std::ostream& os, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(bytes), 8);
}

std::uint64_t read_u64_le(std::istream& is) {
  unsigned char bytes[8];
  is.read(reinterpret_cast<char*>(bytes), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

const NamedArray* CheckpointData::find(const std::string& name) const {
  for (const NamedArray& a : arrays) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

void save_checkpoint(const std::string& path, const CheckpointData& data) {
  nlohmann::json header;
  header["format_version"] = kFormatVersion;
  header["dtype"] = dtype_name();
  header["config"] = nlohmann::json::parse(config_to_json(data.config));
  header["strategy"] = {
      {"strategy", strategy_name(data.strategy.strategy)},
      {"alpha", data.strategy.alpha},
      {"stopwords",
       std::vector<std::string>(data.strategy.stopwords.begin(), data.strategy.stopwords.end())},
      {"resample_each_epoch", data.strategy.resample_each_epoch}};
  header["vocab"] = data.vocab_words;
  header["relations"] = data.relation_labels;
  header["labels"] = data.label_names;
  header["extra"] = {{"epoch", data.epoch},
                     {"adam_t", data.adam_t},
                     {"best_val_acc", data.best_val_acc},
                     {"seed", data.seed}};
  auto& manifest = header["arrays"] = nlohmann::json::array();
  for (const NamedArray& a : data.arrays) {
    if (a.data.size() != ad::numel(a.shape)) {
      throw FormatError("array '" + a.name + "' data does not match its shape");
    }
    manifest.push_back({{"name", a.name}, {"shape", a.shape}});
  }
  const std::string header_text = header.dump();

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot write checkpoint: " + path);
  os.write(kMagic, sizeof(kMagic));
  write_u64_le(os, header_text.size());
  os.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  for (const NamedArray& a : data.arrays) {
    std::vector<ad::real> buf = a.data;
    to_little_endian(buf);
    os.write(reinterpret_cast<const char*>(buf.data()),
             static_cast<std::streamsize>(buf.size() * sizeof(ad::real)));
  }
  if (!os) throw FormatError("write failed: " + path);
}

CheckpointData load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open checkpoint: " + path);

  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not a checkpoint file: " + path);
  }
  const std::uint64_t header_len = read_u64_le(is);
  std::string header_text(header_len, '\0');
  is.read(header_text.data(), static_cast<std::streamsize>(header_len));
  if (!is) throw FormatError("truncated checkpoint header: " + path);

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("bad checkpoint header: " + std::string(e.what()));
  }
  if (header.value("format_version", -1) != kFormatVersion) {
    throw FormatError("unsupported checkpoint format version");
  }
  if (header.value("dtype", "") != dtype_name()) {
    throw FormatError("checkpoint dtype is '" + header.value("dtype", std::string()) +
                      "', this build uses '" + dtype_name() + "'");
  }

  CheckpointData data;
  data.config = config_from_json(header.at("config").dump());
  const auto& strat = header.at("strategy");
  data.strategy.strategy = strategy_from_name(strat.at("strategy").get<std::string>());
  data.strategy.alpha = strat.at("alpha").get<double>();
  const auto stopwords = strat.at("stopwords").get<std::vector<std::string>>();
  data.strategy.stopwords.insert(stopwords.begin(), stopwords.end());
  data.strategy.resample_each_epoch = strat.at("resample_each_epoch").get<bool>();
  data.vocab_words = header.at("vocab").get<std::vector<std::string>>();
  data.relation_labels = header.at("relations").get<std::vector<std::string>>();
  data.label_names = header.at("labels").get<std::vector<std::string>>();
  const auto& extra = header.at("extra");
  data.epoch = extra.at("epoch").get<int>();
  data.adam_t = extra.at("adam_t").get<std::int64_t>();
  data.best_val_acc = extra.at("best_val_acc").get<double>();
  data.seed = extra.at("seed").get<std::uint64_t>();

  for (const auto& entry : header.at("arrays")) {
    NamedArray a;
    a.name = entry.at("name").get<std::string>();
    a.shape = entry.at("shape").get<ad::Shape>();
    a.data.resize(ad::numel(a.shape));
    is.read(reinterpret_cast<char*>(a.data.data()),
            static_cast<std::streamsize>(a.data.size() * sizeof(ad::real)));
    if (!is) throw FormatError("truncated checkpoint array '" + a.name + "': " + path);
    to_little_endian(a.data);  // symmetric swap back on big-endian hosts
    data.arrays.push_back(std::move(a));
  }
  return data;
}

}  // namespace gmatch
