#include "difrec/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "difrec/errors.hpp"

namespace difrec {

namespace {

constexpr char kMagic[8] = {'D', 'I', 'F', 'R', 'E', 'C', '1', '\0'};

void put_bytes(std::string& out, const void* p, std::size_t n) {
    out.append(static_cast<const char*>(p), n);
}

void put_u32(std::string& out, std::uint32_t v) { put_bytes(out, &v, sizeof v); }
void put_u64(std::string& out, std::uint64_t v) { put_bytes(out, &v, sizeof v); }
void put_i32(std::string& out, std::int32_t v) { put_bytes(out, &v, sizeof v); }

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;
    const std::string& path;

    void take(void* dst, std::size_t n) {
        if (pos + n > buf.size()) {
            throw IntegrityError("checkpoint " + path + " is truncated");
        }
        std::memcpy(dst, buf.data() + pos, n);
        pos += n;
    }
    std::uint32_t u32() {
        std::uint32_t v;
        take(&v, sizeof v);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v;
        take(&v, sizeof v);
        return v;
    }
    std::int32_t i32() {
        std::int32_t v;
        take(&v, sizeof v);
        return v;
    }
    std::string str(std::uint32_t n) {
        if (pos + n > buf.size()) {
            throw IntegrityError("checkpoint " + path + " is truncated");
        }
        std::string s(buf.data() + pos, n);
        pos += n;
        return s;
    }
};

std::string block_payload(const CheckpointBlock& b) {
    std::string payload;
    put_u32(payload, static_cast<std::uint32_t>(b.name.size()));
    put_bytes(payload, b.name.data(), b.name.size());
    put_u32(payload, static_cast<std::uint32_t>(b.value.shape.size()));
    for (int d : b.value.shape) put_i32(payload, d);
    put_bytes(payload, b.value.data.data(), b.value.data.size() * sizeof(double));
    return payload;
}

}  // namespace

const CheckpointBlock* Checkpoint::find(const std::string& name) const {
    for (const auto& b : blocks) {
        if (b.name == name) return &b;
    }
    return nullptr;
}

const CheckpointBlock& Checkpoint::require(const std::string& name) const {
    const CheckpointBlock* b = find(name);
    if (!b) throw IntegrityError("checkpoint is missing block '" + name + "'");
    return *b;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    std::string out;
    put_bytes(out, kMagic, sizeof kMagic);
    put_u32(out, static_cast<std::uint32_t>(ckpt.component.size()));
    put_bytes(out, ckpt.component.data(), ckpt.component.size());
    put_u64(out, ckpt.config_hash);
    put_u32(out, static_cast<std::uint32_t>(ckpt.blocks.size()));
    for (const auto& b : ckpt.blocks) {
        const std::string payload = block_payload(b);
        put_bytes(out, payload.data(), payload.size());
        put_u64(out, bytes_checksum(payload.data(), payload.size()));
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("failed to write " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IntegrityError("cannot open checkpoint " + path);
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    Reader r{buf, 0, path};

    char magic[8];
    r.take(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof magic) != 0) {
        throw IntegrityError("checkpoint " + path + " has a bad magic header");
    }

    Checkpoint ckpt;
    ckpt.component = r.str(r.u32());
    ckpt.config_hash = r.u64();
    const std::uint32_t n_blocks = r.u32();
    ckpt.blocks.reserve(n_blocks);
    for (std::uint32_t i = 0; i < n_blocks; ++i) {
        const std::size_t payload_start = r.pos;
        CheckpointBlock b;
        b.name = r.str(r.u32());
        const std::uint32_t ndim = r.u32();
        std::vector<int> shape(ndim);
        std::size_t numel = 1;
        for (std::uint32_t d = 0; d < ndim; ++d) {
            const std::int32_t dim = r.i32();
            if (dim < 0) {
                throw IntegrityError("checkpoint " + path + " block '" + b.name +
                                     "' has a negative dimension");
            }
            shape[d] = dim;
            numel *= static_cast<std::size_t>(dim);
        }
        std::vector<double> data(numel);
        r.take(data.data(), numel * sizeof(double));
        const std::size_t payload_end = r.pos;
        const std::uint64_t stored = r.u64();
        const std::uint64_t actual =
            bytes_checksum(buf.data() + payload_start, payload_end - payload_start);
        if (stored != actual) {
            throw IntegrityError("checkpoint " + path + " block '" + b.name +
                                 "' failed its checksum");
        }
        b.value = NumericArray(shape, std::move(data));
        ckpt.blocks.push_back(std::move(b));
    }
    if (r.pos != buf.size()) {
        throw IntegrityError("checkpoint " + path + " has trailing bytes");
    }
    return ckpt;
}

Checkpoint load_checkpoint(const std::string& path, const std::string& expect_component,
                           std::uint64_t expect_config_hash) {
    Checkpoint ckpt = load_checkpoint(path);
    if (ckpt.component != expect_component) {
        throw IntegrityError("checkpoint " + path + " holds component '" + ckpt.component +
                             "', expected '" + expect_component + "'");
    }
    if (ckpt.config_hash != expect_config_hash) {
        throw IntegrityError("checkpoint " + path +
                             " was produced under a different configuration");
    }
    return ckpt;
}

std::vector<CheckpointBlock> parameter_blocks(const std::vector<const Parameter*>& params) {
    std::vector<CheckpointBlock> blocks;
    blocks.reserve(params.size());
    for (const Parameter* p : params) {
        blocks.push_back(CheckpointBlock{p->name, p->value});
    }
    return blocks;
}

void assign_parameters(const Checkpoint& ckpt, const std::vector<Parameter*>& params) {
    for (Parameter* p : params) {
        const CheckpointBlock& b = ckpt.require(p->name);
        if (b.value.shape != p->value.shape) {
            throw IntegrityError("checkpoint block '" + p->name + "' has shape " +
                                 b.value.shape_str() + ", expected " + p->value.shape_str());
        }
        p->value = b.value;
        p->ema_value = b.value;
        p->grad.fill(0.0);
    }
}

}  // namespace difrec
