#include "tiltlab/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace tiltlab::nn {

using nlohmann::json;

namespace {
constexpr char kMagic[7] = {'T', 'B', 'N', 'E', 'T', '0', '1'};
}

void save_checkpoint(const std::filesystem::path& path, const std::string& arch, const json& config,
                     const std::vector<std::pair<std::string, Tensor<Scalar>*>>& params) {
    json tensors = json::array();
    for (const auto& [name, t] : params) tensors.push_back({{"name", name}, {"shape", t->shape}});
    json header{{"arch", arch}, {"config", config}, {"tensors", tensors}};
    std::string header_str = header.dump();

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_checkpoint: cannot open " + path.string());
    f.write(kMagic, sizeof(kMagic));
    uint32_t len = static_cast<uint32_t>(header_str.size());
    f.write(reinterpret_cast<const char*>(&len), 4);
    f.write(header_str.data(), len);
    for (const auto& [name, t] : params)
        f.write(reinterpret_cast<const char*>(t->values.data()),
                static_cast<std::streamsize>(t->values.size() * sizeof(Scalar)));
    if (!f) throw std::runtime_error("save_checkpoint: write failed for " + path.string());
}

namespace {

json read_header_json(std::ifstream& f, const std::filesystem::path& path) {
    char magic[7];
    f.read(magic, sizeof(magic));
    if (!f || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path.string());
    uint32_t len = 0;
    f.read(reinterpret_cast<char*>(&len), 4);
    std::string header_str(len, '\0');
    f.read(header_str.data(), len);
    if (!f) throw std::runtime_error("checkpoint: truncated header in " + path.string());
    return json::parse(header_str);
}

}  // namespace

CheckpointHeader read_checkpoint_header(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("checkpoint: cannot open " + path.string());
    json header = read_header_json(f, path);
    return {header.at("arch"), header.at("config")};
}

CheckpointHeader load_checkpoint(const std::filesystem::path& path,
                                 const std::vector<std::pair<std::string, Tensor<Scalar>*>>& params) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("checkpoint: cannot open " + path.string());
    json header = read_header_json(f, path);

    const auto& tensors = header.at("tensors");
    if (tensors.size() != params.size())
        throw std::runtime_error("checkpoint: tensor count mismatch in " + path.string());
    for (size_t i = 0; i < params.size(); ++i) {
        const auto& [name, t] = params[i];
        if (tensors[i].at("name") != name)
            throw std::runtime_error("checkpoint: tensor order mismatch at " + name);
        auto shape = tensors[i].at("shape").get<std::vector<long>>();
        if (shape != t->shape)
            throw std::runtime_error("checkpoint: shape mismatch for " + name + " in " + path.string());
        f.read(reinterpret_cast<char*>(t->values.data()),
               static_cast<std::streamsize>(t->values.size() * sizeof(Scalar)));
    }
    if (!f) throw std::runtime_error("checkpoint: truncated blobs in " + path.string());
    return {header.at("arch"), header.at("config")};
}

}  // namespace tiltlab::nn
