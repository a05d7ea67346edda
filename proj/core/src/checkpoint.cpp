#include "gluco/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace gluco {

static_assert(std::endian::native == std::endian::little,
              "checkpoint container assumes a little-endian host");

const std::string* Checkpoint::find_config(const std::string& key) const {
    for (const auto& [k, v] : config) {
        if (k == key) return &v;
    }
    return nullptr;
}

const Tensor* Checkpoint::find_block(const std::string& name) const {
    for (const auto& [n, t] : blocks) {
        if (n == name) return &t;
    }
    return nullptr;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("cannot open " + path + " for writing");

    out << "gluco-checkpoint 1\n";
    out << "model " << ckpt.model << "\n";
    for (const auto& [k, v] : ckpt.config) out << "config " << k << " " << v << "\n";
    out << "blocks " << ckpt.blocks.size() << "\n";

    for (const auto& [name, tensor] : ckpt.blocks) {
        out << "block " << name << " " << tensor.ndim();
        for (int i = 0; i < tensor.ndim(); ++i) out << " " << tensor.dim(i);
        out << "\n";
        for (std::size_t i = 0; i < tensor.size(); ++i) {
            const auto bits = std::bit_cast<std::uint64_t>(tensor.data()[i]);
            char buf[8];
            for (int b = 0; b < 8; ++b) buf[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
            out.write(buf, 8);
        }
    }
    if (!out) throw CheckpointError("write to " + path + " failed");
}

namespace {

std::string read_header_line(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw CheckpointError(path + ": truncated header");
    return line;
}

}  // namespace

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open " + path);

    if (read_header_line(in, path) != "gluco-checkpoint 1") {
        throw CheckpointError(path + ": not a gluco-checkpoint version 1 file");
    }

    Checkpoint ckpt;
    std::size_t n_blocks = 0;
    bool saw_blocks = false;
    while (!saw_blocks) {
        std::istringstream ls(read_header_line(in, path));
        std::string tag;
        ls >> tag;
        if (tag == "model") {
            ls >> ckpt.model;
        } else if (tag == "config") {
            std::string k, v;
            ls >> k >> v;
            if (k.empty()) throw CheckpointError(path + ": malformed config line");
            ckpt.config.emplace_back(k, v);
        } else if (tag == "blocks") {
            ls >> n_blocks;
            saw_blocks = true;
        } else {
            throw CheckpointError(path + ": unexpected header line starting with '" + tag + "'");
        }
    }
    if (ckpt.model.empty()) throw CheckpointError(path + ": header names no model");

    for (std::size_t b = 0; b < n_blocks; ++b) {
        std::istringstream ls(read_header_line(in, path));
        std::string tag, name;
        int ndim = 0;
        ls >> tag >> name >> ndim;
        if (tag != "block" || name.empty() || ndim < 1) {
            throw CheckpointError(path + ": malformed block header");
        }
        Shape shape(ndim);
        for (int i = 0; i < ndim; ++i) {
            if (!(ls >> shape[i])) throw CheckpointError(path + ": block " + name + " missing dims");
        }
        Tensor t{shape};
        const std::size_t n = t.size();
        for (std::size_t i = 0; i < n; ++i) {
            char buf[8];
            if (!in.read(buf, 8)) throw CheckpointError(path + ": block " + name + " truncated");
            std::uint64_t bits = 0;
            for (int bb = 0; bb < 8; ++bb) {
                bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[bb])) << (8 * bb);
            }
            t.data()[i] = std::bit_cast<double>(bits);
        }
        ckpt.blocks.emplace_back(name, std::move(t));
    }
    return ckpt;
}

}  // namespace gluco
