#include "segraph/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>

namespace segraph::nn {

namespace {

constexpr char kMagic[4] = {'S', 'G', 'R', 'F'};

void write_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }
void write_u64(std::ostream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); }

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const std::vector<ParamRef>& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kMagic, 4);
  write_u32(out, kCheckpointVersion);
  write_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const ParamRef& p : params) {
    write_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    write_u32(out, static_cast<std::uint32_t>(p.dims.size()));
    for (std::size_t d : p.dims) write_u64(out, d);
    out.write(reinterpret_cast<const char*>(p.value), static_cast<std::streamsize>(p.size() * sizeof(Scalar)));
  }
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

void load_checkpoint(const std::string& path, const std::vector<ParamRef>& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("not a checkpoint file: " + path);
  const std::uint32_t version = read_u32(in);
  if (version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version) + ": " + path);
  }
  const std::uint32_t count = read_u32(in);

  std::map<std::string, const ParamRef*> by_name;
  for (const ParamRef& p : params) by_name[p.name] = &p;
  std::size_t matched = 0;

  for (std::uint32_t e = 0; e < count; ++e) {
    const std::uint32_t name_len = read_u32(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const std::uint32_t rank = read_u32(in);
    std::vector<std::size_t> dims(rank);
    std::size_t total = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      dims[d] = static_cast<std::size_t>(read_u64(in));
      total *= dims[d];
    }
    if (!in) throw std::runtime_error("truncated checkpoint: " + path);
    const auto it = by_name.find(name);
    if (it == by_name.end()) throw std::runtime_error("checkpoint entry '" + name + "' has no matching parameter");
    if (it->second->dims != dims) throw std::runtime_error("checkpoint entry '" + name + "' has mismatched shape");
    in.read(reinterpret_cast<char*>(it->second->value), static_cast<std::streamsize>(total * sizeof(Scalar)));
    if (!in) throw std::runtime_error("truncated checkpoint: " + path);
    ++matched;
  }
  if (matched != params.size()) {
    throw std::runtime_error("checkpoint is missing " + std::to_string(params.size() - matched) + " parameters");
  }
}

}  // namespace segraph::nn
