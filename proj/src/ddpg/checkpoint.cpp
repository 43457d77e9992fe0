#include "mmho/ddpg/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mmho::ddpg {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'M', 'M', 'H', 'O', 'C', 'K', 'P', 'T'};

template <typename T>
void put(std::string& out, const T& v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool at_end() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw std::runtime_error("checkpoint truncated");
  }
  std::string data_;
  std::size_t pos_ = 0;
};

nlohmann::json describe(const DenseNet& net) {
  nlohmann::json j;
  j["side_layer"] = net.side_layer();
  j["side_dim"] = net.side_dim();
  j["layers"] = nlohmann::json::array();
  for (const auto& l : net.layers())
    j["layers"].push_back({{"rows", l.weight.rows()}, {"cols", l.weight.cols()}, {"activation", to_string(l.activation)}});
  return j;
}

void put_params(std::string& out, const DenseNet& net) {
  for (const auto& l : net.layers()) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) put(out, l.weight(r, c));
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) put(out, l.bias(r));
  }
}

DenseNet read_net(const nlohmann::json& desc, Reader& in) {
  std::vector<DenseLayer> layers;
  for (const auto& ld : desc.at("layers")) {
    DenseLayer l;
    const auto rows = ld.at("rows").get<Eigen::Index>();
    const auto cols = ld.at("cols").get<Eigen::Index>();
    if (rows <= 0 || cols <= 0 || rows > (1 << 20) || cols > (1 << 20))
      throw std::runtime_error("checkpoint: implausible layer shape");
    l.activation = activation_from_string(ld.at("activation").get<std::string>());
    l.weight.resize(rows, cols);
    l.bias.resize(rows);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) l.weight(r, c) = in.get<double>();
    for (Eigen::Index r = 0; r < rows; ++r) l.bias(r) = in.get<double>();
    layers.push_back(std::move(l));
  }
  return DenseNet(std::move(layers), desc.at("side_layer").get<int>(), desc.at("side_dim").get<int>());
}

const char* const kNetNames[4] = {"actor", "critic", "actor_target", "critic_target"};

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void save_checkpoint(const PolicyCheckpoint& ckpt, const std::filesystem::path& path) {
  const DenseNet* nets[4] = {&ckpt.actor, &ckpt.critic, &ckpt.actor_target, &ckpt.critic_target};
  nlohmann::json header;
  header["format"] = "mmho-policy";
  header["version"] = kCheckpointVersion;
  header["rng_seed"] = ckpt.rng_seed;
  header["training_episodes"] = ckpt.training_episodes;
  header["dtype"] = "f64-le";
  header["metadata"] = ckpt.metadata;
  header["nets"] = nlohmann::json::array();
  for (int k = 0; k < 4; ++k) {
    auto d = describe(*nets[k]);
    d["name"] = kNetNames[k];
    header["nets"].push_back(std::move(d));
  }
  const std::string header_text = header.dump();

  std::string out(kMagic, sizeof(kMagic));
  put(out, kCheckpointVersion);
  put(out, static_cast<std::uint64_t>(header_text.size()));
  out += header_text;
  for (const DenseNet* n : nets) put_params(out, *n);
  write_file_atomic(path, out);
}

PolicyCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint not found: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  Reader r(ss.str());

  if (r.bytes(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic)))
    throw std::runtime_error("not a policy checkpoint: " + path.string());
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  const auto header_len = r.get<std::uint64_t>();
  const nlohmann::json header = nlohmann::json::parse(r.bytes(static_cast<std::size_t>(header_len)));

  PolicyCheckpoint ckpt;
  ckpt.rng_seed = header.at("rng_seed").get<std::uint64_t>();
  ckpt.training_episodes = header.at("training_episodes").get<int>();
  ckpt.metadata = header.value("metadata", nlohmann::json::object());
  DenseNet* nets[4] = {&ckpt.actor, &ckpt.critic, &ckpt.actor_target, &ckpt.critic_target};
  const auto& descs = header.at("nets");
  if (descs.size() != 4) throw std::runtime_error("checkpoint must hold four nets");
  for (int k = 0; k < 4; ++k) {
    if (descs[static_cast<std::size_t>(k)].at("name") != kNetNames[k]) throw std::runtime_error("checkpoint net order mismatch");
    *nets[k] = read_net(descs[static_cast<std::size_t>(k)], r);
  }
  if (!r.at_end()) throw std::runtime_error("checkpoint has trailing bytes");
  return ckpt;
}

}  // namespace mmho::ddpg
