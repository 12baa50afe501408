#include "graspmaps/stack_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <vector>

#include "json.hpp"

#include "graspmaps/errors.hpp"

namespace graspmaps {

namespace {

using ordered_json = nlohmann::ordered_json;

std::uint32_t to_le(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
    }
    return v;
}

int positive_int(const ordered_json& header, const char* field) {
    if (!header.contains(field)) throw FormatError(field, "missing");
    const auto& v = header.at(field);
    if (!v.is_number_integer() || v.get<long long>() <= 0 || v.get<long long>() > (1 << 24)) {
        throw FormatError(field, "must be a positive integer");
    }
    return v.get<int>();
}

void expect_string(const ordered_json& header, const char* field, const char* value) {
    if (!header.contains(field)) throw FormatError(field, "missing");
    const auto& v = header.at(field);
    if (!v.is_string() || v.get<std::string>() != value) {
        throw FormatError(field, std::string("expected \"") + value + "\"");
    }
}

}  // namespace

std::string stack_header(const GraspMapStack& stack) {
    ordered_json header;
    header["height"] = stack.height();
    header["width"] = stack.width();
    header["bins"] = stack.bins();
    header["channels"] = stack.channel_names();
    header["dtype"] = "f32";
    header["layout"] = "row-major";
    header["version"] = kStackFormatVersion;
    return header.dump();
}

void write_stack(std::ostream& out, const GraspMapStack& stack) {
    out << stack_header(stack) << '\n';
    const auto data = stack.data();
    std::vector<char> bytes(data.size() * 4);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::uint32_t word = to_le(std::bit_cast<std::uint32_t>(data[i]));
        std::memcpy(bytes.data() + 4 * i, &word, 4);
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_stack(const std::filesystem::path& path, const GraspMapStack& stack) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_stack(out, stack);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

GraspMapStack read_stack(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || in.eof()) throw FormatError("header", "missing newline-terminated JSON header");
    ordered_json header;
    try {
        header = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("header", std::string("invalid JSON: ") + e.what());
    }
    if (!header.is_object()) throw FormatError("header", "not a JSON object");

    if (!header.contains("version")) throw FormatError("version", "missing");
    if (!header["version"].is_number_integer() || header["version"].get<int>() != kStackFormatVersion) {
        throw FormatError("version", "unsupported version");
    }
    expect_string(header, "dtype", "f32");
    expect_string(header, "layout", "row-major");
    const int height = positive_int(header, "height");
    const int width = positive_int(header, "width");
    const int bins = positive_int(header, "bins");

    GraspMapStack stack(bins, height, width);
    if (!header.contains("channels")) throw FormatError("channels", "missing");
    const auto& channels = header["channels"];
    const auto expected = stack.channel_names();
    if (!channels.is_array() || channels.size() != expected.size()) {
        throw FormatError("channels", "expected " + std::to_string(expected.size()) + " channel names");
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (!channels[i].is_string() || channels[i].get<std::string>() != expected[i]) {
            throw FormatError("channels", "entry " + std::to_string(i) + " should be \"" + expected[i] + "\"");
        }
    }

    auto data = stack.data();
    std::vector<char> bytes(data.size() * 4);
    in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
        throw FormatError("channels", "payload shorter than the declared planes");
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw FormatError("channels", "payload longer than the declared planes");
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::uint32_t word;
        std::memcpy(&word, bytes.data() + 4 * i, 4);
        data[i] = std::bit_cast<float>(to_le(word));
    }
    return stack;
}

GraspMapStack read_stack(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_stack(in);
}

}  // namespace graspmaps
