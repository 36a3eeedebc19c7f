#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace illusion {

// Versioned sectioned binary container used for checkpoints and parameter
// files. Layout: magic, version, section count, then per section a name,
// payload size and payload, then an FNV-1a checksum of everything before it.
class BinaryWriter {
public:
    void begin_section(const std::string& name);

    void put_u32(uint32_t v);
    void put_u64(uint64_t v);
    void put_i64(int64_t v);
    void put_f64(double v);
    void put_string(const std::string& s);
    void put_bytes(const void* data, size_t n);
    void put_f64_array(std::span<const double> v);

    void save(const std::string& path) const;

private:
    struct Section {
        std::string name;
        std::vector<char> payload;
    };
    std::vector<Section> sections_;
};

class BinaryReader {
public:
    // Loads and verifies the whole container; throws IoError on any damage.
    explicit BinaryReader(const std::string& path);

    bool has_section(const std::string& name) const;
    // Positions the cursor at the start of the named section.
    void open_section(const std::string& name);

    uint32_t get_u32();
    uint64_t get_u64();
    int64_t get_i64();
    double get_f64();
    std::string get_string();
    void get_bytes(void* data, size_t n);
    std::vector<double> get_f64_array();

private:
    const std::vector<char>& current() const;
    void need(size_t n) const;

    std::map<std::string, std::vector<char>> sections_;
    std::string open_;
    size_t cursor_ = 0;
};

}  // namespace illusion
