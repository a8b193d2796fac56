#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "lcstf/errors.hpp"
#include "lcstf/nn.hpp"

namespace lcstf {

namespace {

constexpr char kMagic[4] = {'L', 'C', 'S', 'Q'};

class ByteWriter {
public:
    void u32(std::uint32_t v) {
        for (int k = 0; k < 4; ++k) bytes_.push_back(static_cast<char>((v >> (8 * k)) & 0xFFu));
    }
    void u64(std::uint64_t v) {
        for (int k = 0; k < 8; ++k) bytes_.push_back(static_cast<char>((v >> (8 * k)) & 0xFFu));
    }
    void f32(float f) { u32(std::bit_cast<std::uint32_t>(f)); }
    void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
    const std::vector<char>& bytes() const { return bytes_; }

private:
    std::vector<char> bytes_;
};

class ByteReader {
public:
    explicit ByteReader(std::vector<char> bytes) : bytes_(std::move(bytes)) {}

    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) {
            throw CheckpointError(CheckpointError::Kind::truncated,
                                  "checkpoint truncated at byte " + std::to_string(pos_));
        }
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) {
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_++])) << (8 * k);
        }
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int k = 0; k < 8; ++k) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_++])) << (8 * k);
        }
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    bool match(const char* p, std::size_t n) {
        need(n);
        const bool ok = std::memcmp(bytes_.data() + pos_, p, n) == 0;
        pos_ += n;
        return ok;
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    std::vector<char> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const DenseNet& net, const std::filesystem::path& path) {
    const auto& layers = net.mlp().layers();
    ByteWriter w;
    w.raw(kMagic, sizeof(kMagic));
    w.u32(kCheckpointVersion);
    w.u32(static_cast<std::uint32_t>(layers.size()));
    for (const DenseLayer<float>& layer : layers) {
        w.u32(static_cast<std::uint32_t>(layer.outputs));
        w.u32(static_cast<std::uint32_t>(layer.inputs));
    }
    for (const DenseLayer<float>& layer : layers) {
        for (float x : layer.weights) w.f32(x);
    }
    for (const DenseLayer<float>& layer : layers) {
        for (float x : layer.biases) w.f32(x);
    }
    w.u64(net.step_count());

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

DenseNet load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CheckpointError(CheckpointError::Kind::io, "cannot open checkpoint " + path.string());
    }
    ByteReader r(std::vector<char>(std::istreambuf_iterator<char>(in), {}));

    if (!r.match(kMagic, sizeof(kMagic))) {
        throw CheckpointError(CheckpointError::Kind::format, path.string() + ": bad magic, not an LCSQ checkpoint");
    }
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion) {
        throw CheckpointError(CheckpointError::Kind::version,
                              path.string() + ": unsupported checkpoint version " + std::to_string(version));
    }
    const std::uint32_t layer_count = r.u32();
    if (layer_count == 0 || layer_count > 64) {
        throw CheckpointError(CheckpointError::Kind::format,
                              path.string() + ": implausible layer count " + std::to_string(layer_count));
    }
    std::vector<int> sizes;
    for (std::uint32_t l = 0; l < layer_count; ++l) {
        const std::uint32_t rows = r.u32();
        const std::uint32_t cols = r.u32();
        if (rows == 0 || cols == 0 || rows > (1u << 20) || cols > (1u << 20)) {
            throw CheckpointError(CheckpointError::Kind::dimension,
                                  path.string() + ": bad shape of layer " + std::to_string(l));
        }
        if (l == 0) {
            sizes.push_back(static_cast<int>(cols));
        } else if (static_cast<int>(cols) != sizes.back()) {
            throw CheckpointError(CheckpointError::Kind::dimension,
                                  path.string() + ": layer " + std::to_string(l) + " expects " +
                                      std::to_string(cols) + " inputs, previous layer has " +
                                      std::to_string(sizes.back()) + " outputs");
        }
        sizes.push_back(static_cast<int>(rows));
    }

    Mlp<float> mlp(sizes);
    for (DenseLayer<float>& layer : mlp.layers()) {
        r.need(layer.weights.size() * 4);
        for (float& x : layer.weights) x = r.f32();
    }
    for (DenseLayer<float>& layer : mlp.layers()) {
        r.need(layer.biases.size() * 4);
        for (float& x : layer.biases) x = r.f32();
    }
    const std::uint64_t steps = r.u64();
    if (r.remaining() != 0) {
        throw CheckpointError(CheckpointError::Kind::format,
                              path.string() + ": " + std::to_string(r.remaining()) + " trailing bytes");
    }
    DenseNet net(std::move(mlp));
    net.set_step_count(steps);
    return net;
}

DenseNet load_checkpoint(const std::filesystem::path& path, const std::vector<int>& expected) {
    DenseNet net = load_checkpoint(path);
    if (net.layer_sizes() != expected) {
        std::string got;
        for (int s : net.layer_sizes()) got += (got.empty() ? "" : ",") + std::to_string(s);
        std::string want;
        for (int s : expected) want += (want.empty() ? "" : ",") + std::to_string(s);
        throw CheckpointError(CheckpointError::Kind::dimension,
                              path.string() + ": architecture " + got + " does not match configured " + want);
    }
    return net;
}

}  // namespace lcstf
