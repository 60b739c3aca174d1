#include "win/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "win/errors.hpp"

namespace win {
namespace {

constexpr char kMagic[7] = {'W', 'I', 'N', 'C', 'K', 'P', 'T'};
constexpr unsigned char kVersion = 1;

using nlohmann::json;

// Model state arrays in file order: per layer weights, bias, then the BN
// block (gamma, beta, running_mean, running_var) when present.
template <class ModelT, class Fn>
void for_each_state_array(ModelT& m, Fn&& fn) {
    for (auto& layer : m.layers) {
        fn(layer.conv.weights.data);
        fn(layer.conv.bias);
        if (m.config.has_bn()) {
            fn(layer.bn.gamma);
            fn(layer.bn.beta);
            fn(layer.bn.running_mean);
            fn(layer.bn.running_var);
        }
    }
}

json header_json(const Model& m, const OptState* opt, const TrainMeta* meta) {
    json h;
    h["config"] = {{"variant", to_string(m.config.variant)},
                   {"layers", m.config.layers},
                   {"width", m.config.width},
                   {"kernel", m.config.kernel},
                   {"input_channels", m.config.input_channels}};
    TrainMeta def;
    const TrainMeta& mm = meta ? *meta : def;
    h["meta"] = {{"step", mm.step}, {"epoch", mm.epoch}, {"sigma_regime", mm.sigma_regime}, {"seed", mm.seed}};
    h["optimizer"] = {{"present", opt != nullptr}, {"step", opt ? opt->step : 0}};
    return h;
}

void write_u32le(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

// Array payloads are raw IEEE-754 single precision, little-endian (the
// native layout on every platform this targets).
void write_floats(std::ostream& os, const std::vector<float>& v) {
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(float)));
}

class Reader {
  public:
    Reader(std::vector<char> bytes, std::size_t pos) : bytes_(std::move(bytes)), pos_(pos) {}

    void read_floats(std::vector<float>& out) {
        const std::size_t need = out.size() * sizeof(float);
        if (pos_ + need > bytes_.size()) {
            throw CheckpointTruncatedError("checkpoint truncated: expected " + std::to_string(need) +
                                           " more bytes at offset " + std::to_string(pos_));
        }
        std::memcpy(out.data(), bytes_.data() + pos_, need);
        pos_ += need;
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }

  private:
    std::vector<char> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const Model& m, const std::string& path, const OptState* opt, const TrainMeta* meta) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");

    const std::string header = header_json(m, opt, meta).dump();
    os.write(kMagic, sizeof(kMagic));
    os.put(static_cast<char>(kVersion));
    write_u32le(os, static_cast<std::uint32_t>(header.size()));
    os.write(header.data(), static_cast<std::streamsize>(header.size()));

    for_each_state_array(m, [&](const std::vector<float>& arr) { write_floats(os, arr); });
    if (opt) {
        for (const auto& arr : opt->m) write_floats(os, arr);
        for (const auto& arr : opt->v) write_floats(os, arr);
    }
    if (!os) throw IoError("write failed for '" + path + "'");
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open checkpoint '" + path + "'");
    std::vector<char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());

    if (bytes.size() < sizeof(kMagic) + 1 + 4) {
        throw CheckpointTruncatedError("checkpoint '" + path + "' is too short to hold a header");
    }
    if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
        throw CheckpointCorruptError("'" + path + "' is not a checkpoint file (bad magic)");
    }
    const unsigned char version = static_cast<unsigned char>(bytes[sizeof(kMagic)]);
    if (version != kVersion) {
        throw CheckpointVersionError("checkpoint version " + std::to_string(version) + " is not supported (want " +
                                     std::to_string(kVersion) + ")");
    }
    std::size_t pos = sizeof(kMagic) + 1;
    std::uint32_t header_len = 0;
    for (int i = 0; i < 4; ++i) {
        header_len |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
    }
    pos += 4;
    if (pos + header_len > bytes.size()) {
        throw CheckpointTruncatedError("checkpoint header extends past end of file");
    }

    json h;
    try {
        h = json::parse(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                        bytes.begin() + static_cast<std::ptrdiff_t>(pos + header_len));
    } catch (const json::parse_error& e) {
        throw CheckpointCorruptError(std::string("checkpoint header is not valid JSON: ") + e.what());
    }
    pos += header_len;

    LoadedCheckpoint out;
    try {
        const json& c = h.at("config");
        out.model.config.variant = variant_from_string(c.at("variant").get<std::string>());
        out.model.config.layers = c.at("layers").get<int>();
        out.model.config.width = c.at("width").get<int>();
        out.model.config.kernel = c.at("kernel").get<int>();
        out.model.config.input_channels = c.at("input_channels").get<int>();
        out.model.config.validate();

        const json& meta = h.at("meta");
        out.meta.step = meta.at("step").get<std::int64_t>();
        out.meta.epoch = meta.at("epoch").get<std::int64_t>();
        out.meta.sigma_regime = meta.at("sigma_regime").get<std::string>();
        out.meta.seed = meta.at("seed").get<std::uint64_t>();
    } catch (const std::exception& e) {
        throw CheckpointCorruptError(std::string("checkpoint header malformed: ") + e.what());
    }

    const ModelConfig& cfg = out.model.config;
    for (int l = 0; l < cfg.layers; ++l) {
        const int c_in = l == 0 ? cfg.input_channels : cfg.width;
        const int c_out = l == cfg.layers - 1 ? cfg.input_channels : cfg.width;
        Model::Layer layer;
        layer.conv = ConvParams::make(c_out, c_in, cfg.kernel);
        if (cfg.has_bn()) layer.bn = BnParams::make(c_out);
        out.model.layers.push_back(std::move(layer));
    }

    Reader reader(std::move(bytes), pos);
    for_each_state_array(out.model, [&](std::vector<float>& arr) { reader.read_floats(arr); });

    const bool opt_present = h.at("optimizer").at("present").get<bool>();
    if (opt_present) {
        OptState st = OptState::like(out.model);
        st.step = h.at("optimizer").at("step").get<std::int64_t>();
        for (auto& arr : st.m) reader.read_floats(arr);
        for (auto& arr : st.v) reader.read_floats(arr);
        out.opt = std::move(st);
    }
    if (reader.remaining() != 0) {
        throw CheckpointCorruptError("checkpoint has " + std::to_string(reader.remaining()) +
                                     " unexpected trailing bytes");
    }
    return out;
}

}  // namespace win
