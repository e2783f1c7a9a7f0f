#include "tsf/training/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>
#include <type_traits>

#include "tsf/numkit/errors.hpp"

namespace tsf {

namespace {

constexpr char magic[4] = {'T', 'S', 'F', 'C'};

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

class Writer {
public:
    template <typename T>
    void put(T value) {
        std::uint64_t bits;
        if constexpr (std::is_same_v<T, double>) {
            bits = std::bit_cast<std::uint64_t>(value);
        } else {
            bits = static_cast<std::uint64_t>(value);
        }
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            buf_.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
        }
    }
    void put_u32(std::size_t value) {
        if (value > 0xFFFFFFFFULL) {
            throw ArgumentError("checkpoint field " + std::to_string(value) + " exceeds 32 bits");
        }
        put(static_cast<std::uint32_t>(value));
    }
    void raw(const char* data, std::size_t n) { buf_.append(data, n); }
    std::string& bytes() { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    template <typename T>
    T get() {
        need(sizeof(T));
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
                    << (8 * i);
        }
        pos_ += sizeof(T);
        if constexpr (std::is_same_v<T, double>) {
            return std::bit_cast<double>(bits);
        } else {
            return static_cast<T>(bits);
        }
    }
    std::string_view take(std::size_t n) {
        need(n);
        auto out = bytes_.substr(pos_, n);
        pos_ += n;
        return out;
    }
    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) {
            throw CorruptPayloadError("checkpoint truncated at byte " + std::to_string(pos_));
        }
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

} // namespace

void write_checkpoint(const Checkpoint& c, std::ostream& out) {
    const ModelState& m = c.model;
    Writer w;
    w.raw(magic, sizeof magic);
    w.put(checkpoint_version);
    w.put(static_cast<std::uint8_t>(m.kind() == CellKind::lstm ? 0 : 1));
    w.put_u32(m.window());
    w.put_u32(m.horizon());
    w.put_u32(m.units());
    w.put(c.bounds.min);
    w.put(c.bounds.max);
    w.put_u32(c.config.epochs);
    w.put_u32(c.config.batch_size);
    w.put(static_cast<std::uint64_t>(c.config.seed));
    w.put(static_cast<std::uint8_t>(c.config.shuffle ? 1 : 0));
    w.put(c.config.adam.learning_rate);
    w.put(c.config.adam.beta1);
    w.put(c.config.adam.beta2);
    w.put(c.config.adam.epsilon);
    w.put(c.config.clip_norm);
    const auto tensors = m.parameter_tensors();
    w.put_u32(tensors.size());
    for (const Matrix* t : tensors) {
        w.put_u32(t->rows());
        w.put_u32(t->cols());
        for (double v : t->data()) {
            w.put(v);
        }
    }
    w.put(fnv1a(w.bytes()));
    out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
}

Checkpoint read_checkpoint(std::istream& in) {
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    Reader r(bytes);
    if (r.take(sizeof magic) != std::string_view(magic, sizeof magic)) {
        throw CorruptPayloadError("not a checkpoint: bad magic bytes");
    }
    const auto version = r.get<std::uint16_t>();
    if (version != checkpoint_version) {
        throw VersionMismatchError("checkpoint version " + std::to_string(version) +
                                   " is not supported (expected " +
                                   std::to_string(checkpoint_version) + ")");
    }
    if (bytes.size() < sizeof(std::uint64_t) + r.position()) {
        throw CorruptPayloadError("checkpoint truncated before checksum");
    }
    const std::size_t body = bytes.size() - sizeof(std::uint64_t);
    {
        Reader tail(std::string_view(bytes).substr(body));
        if (tail.get<std::uint64_t>() != fnv1a(std::string_view(bytes).substr(0, body))) {
            throw CorruptPayloadError("checkpoint checksum mismatch (truncated or modified file)");
        }
    }

    const auto kind_tag = r.get<std::uint8_t>();
    if (kind_tag > 1) {
        throw CorruptPayloadError("unknown model kind tag " + std::to_string(kind_tag));
    }
    const auto window = r.get<std::uint32_t>();
    const auto horizon = r.get<std::uint32_t>();
    const auto units = r.get<std::uint32_t>();
    Bounds bounds;
    bounds.min = r.get<double>();
    bounds.max = r.get<double>();
    TrainConfig config;
    config.epochs = r.get<std::uint32_t>();
    config.batch_size = r.get<std::uint32_t>();
    config.seed = r.get<std::uint64_t>();
    config.shuffle = r.get<std::uint8_t>() != 0;
    config.units = units;
    config.adam.learning_rate = r.get<double>();
    config.adam.beta1 = r.get<double>();
    config.adam.beta2 = r.get<double>();
    config.adam.epsilon = r.get<double>();
    config.clip_norm = r.get<double>();

    if (window == 0 || horizon == 0 || units == 0) {
        throw CorruptPayloadError("checkpoint has a zero model dimension");
    }
    ModelState model(kind_tag == 0 ? CellKind::lstm : CellKind::gru, units, window, horizon);
    const auto tensors = model.parameter_tensors();
    const auto names = model.tensor_names();
    const auto count = r.get<std::uint32_t>();
    if (count != tensors.size()) {
        throw CorruptPayloadError("checkpoint holds " + std::to_string(count) + " tensors, expected " +
                                  std::to_string(tensors.size()));
    }
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        const auto rows = r.get<std::uint32_t>();
        const auto cols = r.get<std::uint32_t>();
        Matrix& t = *tensors[i];
        if (rows != t.rows() || cols != t.cols()) {
            throw CorruptPayloadError("tensor " + names[i] + " has shape (" + std::to_string(rows) +
                                      "x" + std::to_string(cols) + "), expected " +
                                      t.shape_string());
        }
        for (double& v : t.data()) {
            v = r.get<double>();
            if (!std::isfinite(v)) {
                throw CorruptPayloadError("tensor " + names[i] + " holds a non-finite value");
            }
        }
    }
    if (r.position() != body) {
        throw CorruptPayloadError("checkpoint has " + std::to_string(body - r.position()) +
                                  " unexpected trailing bytes");
    }
    return Checkpoint{std::move(model), bounds, config};
}

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    write_checkpoint(c, out);
    out.flush();
    if (!out) {
        throw IoError("failed writing checkpoint '" + path.string() + "'");
    }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open checkpoint '" + path.string() + "'");
    }
    try {
        return read_checkpoint(in);
    } catch (const Error& e) {
        rethrow_with_context(e, path.string() + ": ");
    }
}

} // namespace tsf
