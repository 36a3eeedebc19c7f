#include "illusion/core/binary_io.hpp"

#include <cstring>
#include <fstream>

#include "illusion/core/errors.hpp"

namespace illusion {

namespace {

constexpr uint64_t kMagic = 0x31544B43554C4C49ull;  // "ILLUCKT1"
constexpr uint32_t kVersion = 1;

uint64_t fnv1a_bytes(const void* data, size_t n, uint64_t h = 0xCBF29CE484222325ull) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ull;
    }
    return h;
}

template <class T>
void append(std::vector<char>& buf, const T& v) {
    const char* p = reinterpret_cast<const char*>(&v);
    buf.insert(buf.end(), p, p + sizeof(T));
}

}  // namespace

void BinaryWriter::begin_section(const std::string& name) {
    sections_.push_back({name, {}});
}

void BinaryWriter::put_bytes(const void* data, size_t n) {
    if (sections_.empty()) throw IoError("no open section");
    const char* p = static_cast<const char*>(data);
    sections_.back().payload.insert(sections_.back().payload.end(), p, p + n);
}

void BinaryWriter::put_u32(uint32_t v) { put_bytes(&v, sizeof(v)); }
void BinaryWriter::put_u64(uint64_t v) { put_bytes(&v, sizeof(v)); }
void BinaryWriter::put_i64(int64_t v) { put_bytes(&v, sizeof(v)); }
void BinaryWriter::put_f64(double v) { put_bytes(&v, sizeof(v)); }

void BinaryWriter::put_string(const std::string& s) {
    put_u64(s.size());
    put_bytes(s.data(), s.size());
}

void BinaryWriter::put_f64_array(std::span<const double> v) {
    put_u64(v.size());
    put_bytes(v.data(), v.size() * sizeof(double));
}

void BinaryWriter::save(const std::string& path) const {
    std::vector<char> buf;
    append(buf, kMagic);
    append(buf, kVersion);
    append(buf, static_cast<uint64_t>(sections_.size()));
    for (const auto& s : sections_) {
        append(buf, static_cast<uint64_t>(s.name.size()));
        buf.insert(buf.end(), s.name.begin(), s.name.end());
        append(buf, static_cast<uint64_t>(s.payload.size()));
        buf.insert(buf.end(), s.payload.begin(), s.payload.end());
    }
    uint64_t checksum = fnv1a_bytes(buf.data(), buf.size());
    append(buf, checksum);

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path);
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!os) throw IoError("write failed: " + path);
}

BinaryReader::BinaryReader(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    std::vector<char> buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());

    size_t pos = 0;
    auto take = [&](void* out, size_t n) {
        if (pos + n > buf.size()) throw IoError("corrupt container (truncated): " + path);
        std::memcpy(out, buf.data() + pos, n);
        pos += n;
    };

    if (buf.size() < sizeof(uint64_t) * 2) throw IoError("corrupt container (too small): " + path);
    uint64_t stored_checksum;
    std::memcpy(&stored_checksum, buf.data() + buf.size() - sizeof(uint64_t), sizeof(uint64_t));
    uint64_t actual = fnv1a_bytes(buf.data(), buf.size() - sizeof(uint64_t));
    if (stored_checksum != actual) throw IoError("corrupt container (checksum mismatch): " + path);

    uint64_t magic;
    uint32_t version;
    uint64_t nsections;
    take(&magic, sizeof(magic));
    if (magic != kMagic) throw IoError("not a checkpoint container: " + path);
    take(&version, sizeof(version));
    if (version != kVersion) throw IoError("unsupported container version in " + path);
    take(&nsections, sizeof(nsections));
    for (uint64_t i = 0; i < nsections; ++i) {
        uint64_t name_len;
        take(&name_len, sizeof(name_len));
        if (pos + name_len > buf.size()) throw IoError("corrupt container (bad section name): " + path);
        std::string name(buf.data() + pos, name_len);
        pos += name_len;
        uint64_t payload_len;
        take(&payload_len, sizeof(payload_len));
        if (pos + payload_len > buf.size()) throw IoError("corrupt container (bad section size): " + path);
        sections_[name] = std::vector<char>(buf.data() + pos, buf.data() + pos + payload_len);
        pos += payload_len;
    }
}

bool BinaryReader::has_section(const std::string& name) const { return sections_.count(name) > 0; }

void BinaryReader::open_section(const std::string& name) {
    if (!has_section(name)) throw IoError("missing container section: " + name);
    open_ = name;
    cursor_ = 0;
}

const std::vector<char>& BinaryReader::current() const {
    auto it = sections_.find(open_);
    if (it == sections_.end()) throw IoError("no open section");
    return it->second;
}

void BinaryReader::need(size_t n) const {
    if (cursor_ + n > current().size()) throw IoError("corrupt container (section overrun): " + open_);
}

void BinaryReader::get_bytes(void* data, size_t n) {
    need(n);
    std::memcpy(data, current().data() + cursor_, n);
    cursor_ += n;
}

uint32_t BinaryReader::get_u32() {
    uint32_t v;
    get_bytes(&v, sizeof(v));
    return v;
}
uint64_t BinaryReader::get_u64() {
    uint64_t v;
    get_bytes(&v, sizeof(v));
    return v;
}
int64_t BinaryReader::get_i64() {
    int64_t v;
    get_bytes(&v, sizeof(v));
    return v;
}
double BinaryReader::get_f64() {
    double v;
    get_bytes(&v, sizeof(v));
    return v;
}

std::string BinaryReader::get_string() {
    uint64_t n = get_u64();
    need(n);
    std::string s(current().data() + cursor_, n);
    cursor_ += n;
    return s;
}

std::vector<double> BinaryReader::get_f64_array() {
    uint64_t n = get_u64();
    std::vector<double> v(n);
    get_bytes(v.data(), n * sizeof(double));
    return v;
}

}  // namespace illusion
