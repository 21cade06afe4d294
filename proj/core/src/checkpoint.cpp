#include "xmvae/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>

#include "xmvae/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

namespace xmvae {

namespace {

constexpr char kMagic[6] = {'X', 'M', 'V', 'A', 'E', '1'};

template <typename T>
void write_pod(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool read_pod(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return in.gcount() == sizeof(T);
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelSet& models) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  for (const Parameter* p : models.all_parameters()) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(p->value.rank()));
    for (std::size_t e : p->value.shape()) {
      write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(e));
    }
    out.write(reinterpret_cast<const char*>(p->value.data()),
              static_cast<std::streamsize>(p->value.size() * sizeof(double)));
  }
  if (!out) throw IoError("checkpoint write failed: " + path);
}

std::map<std::string, Tensor> read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  char magic[6];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic) || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw FormatError("bad checkpoint magic in " + path);
  }
  std::map<std::string, Tensor> records;
  for (;;) {
    std::uint32_t name_len;
    if (!read_pod(in, name_len)) break;  // clean end of file
    if (name_len == 0 || name_len > 4096) {
      throw FormatError("checkpoint: implausible name length");
    }
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    std::uint32_t rank;
    if (in.gcount() != name_len || !read_pod(in, rank) || rank > 8) {
      throw FormatError("checkpoint: truncated or corrupt record for " + name);
    }
    std::vector<std::size_t> shape(rank);
    std::size_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
      std::uint64_t e;
      if (!read_pod(in, e) || e == 0 || e > (1ull << 32)) {
        throw FormatError("checkpoint: bad extent in record " + name);
      }
      shape[i] = static_cast<std::size_t>(e);
      count *= shape[i];
    }
    std::vector<double> data(count);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(count * sizeof(double))) {
      throw FormatError("checkpoint: truncated data in record " + name);
    }
    if (!records.emplace(name, Tensor(std::move(shape), std::move(data))).second) {
      throw FormatError("checkpoint: duplicate parameter " + name);
    }
  }
  return records;
}

void apply_checkpoint(const std::map<std::string, Tensor>& records,
                      ModelSet& models) {
  for (Parameter* p : models.all_parameters()) {
    auto it = records.find(p->name);
    if (it == records.end()) {
      throw FormatError("checkpoint: missing parameter " + p->name);
    }
    if (!it->second.same_shape(p->value)) {
      throw FormatError("checkpoint: shape mismatch for " + p->name + ", file " +
                        shape_string(it->second) + " vs model " +
                        shape_string(p->value));
    }
    p->value = it->second;
  }
}

ModelSet model_set_from_checkpoint(const std::map<std::string, Tensor>& records) {
  // Collect model prefixes ("enc_2d", "dec_3d", ...).
  std::set<std::string> prefixes;
  for (const auto& [name, t] : records) {
    auto slash = name.find('/');
    if (slash == std::string::npos) throw FormatError("checkpoint: unstructured name " + name);
    prefixes.insert(name.substr(0, slash));
  }

  auto required = [&](const std::string& key) -> const Tensor& {
    auto it = records.find(key);
    if (it == records.end()) throw FormatError("checkpoint: missing " + key);
    return it->second;
  };

  auto hidden_of = [&](const std::string& prefix) {
    std::vector<std::size_t> hidden;
    for (std::size_t i = 0;; ++i) {
      auto it = records.find(prefix + "/h" + std::to_string(i) + "/W");
      if (it == records.end()) break;
      hidden.push_back(it->second.extent(1));
    }
    if (hidden.empty()) throw FormatError("checkpoint: no hidden layers under " + prefix);
    return hidden;
  };

  ModelSet models;
  bool latent_known = false;
  for (const std::string& prefix : prefixes) {
    const bool is_enc = prefix.rfind("enc_", 0) == 0;
    const bool is_dec = prefix.rfind("dec_", 0) == 0;
    if (!is_enc && !is_dec) throw FormatError("checkpoint: unknown model prefix " + prefix);
    const std::string modality = prefix.substr(4);

    MlpShape shape{hidden_of(prefix)};
    if (is_enc) {
      const Tensor& mu_w = required(prefix + "/mu/W");
      const std::size_t latent = mu_w.extent(1);
      const std::size_t in_dim = required(prefix + "/h0/W").extent(0);
      ModalitySpec spec = ModalitySpec::named(modality);
      if (in_dim == spec.flat_dim + 1) {
        spec.handedness_flag = true;
      } else if (in_dim != spec.flat_dim) {
        throw FormatError("checkpoint: input width " + std::to_string(in_dim) +
                          " does not match modality " + modality);
      }
      if (latent_known && models.latent.latent_dim != latent) {
        throw FormatError("checkpoint: inconsistent latent dimensions");
      }
      models.latent.latent_dim = latent;
      latent_known = true;
      models.encoders.emplace(modality,
                              KeypointEncoder(spec, {latent}, shape));
    } else {
      const Tensor& out_w = required(prefix + "/out/W");
      const std::size_t latent = required(prefix + "/h0/W").extent(0);
      ModalitySpec spec = ModalitySpec::named(modality);
      if (out_w.extent(1) != spec.flat_dim) {
        throw FormatError("checkpoint: output width does not match modality " + modality);
      }
      if (latent_known && models.latent.latent_dim != latent) {
        throw FormatError("checkpoint: inconsistent latent dimensions");
      }
      models.latent.latent_dim = latent;
      latent_known = true;
      models.decoders.emplace(modality,
                              KeypointDecoder(spec, {latent}, shape));
    }
  }
  apply_checkpoint(records, models);
  return models;
}

}  // namespace xmvae
