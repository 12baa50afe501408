#include <gtest/gtest.h>

#include <cstring>
#include <sstream>

#include "graspmaps/errors.hpp"
#include "graspmaps/stack_io.hpp"

using namespace graspmaps;

namespace {

GraspMapStack sample_stack() {
    BuilderConfig cfg;
    cfg.bins = 2;
    cfg.out_width = 7;
    cfg.out_height = 5;
    return build_orange_maps({"s", 7, 5, {{3.5, 2.5, 0.6, 5, 3}, {1.2, 1.7, -1.2, 3, 2}}}, cfg);
}

std::string serialize(const GraspMapStack& s) {
    std::ostringstream out(std::ios::binary);
    write_stack(out, s);
    return out.str();
}

// Replaces the header line and keeps the payload.
std::string with_header(const std::string& bytes, const std::string& header) {
    return header + bytes.substr(bytes.find('\n'));
}

std::string field_of(const std::string& bytes) {
    std::istringstream in(bytes, std::ios::binary);
    try {
        read_stack(in);
    } catch (const FormatError& e) {
        return e.field();
    }
    return "";
}

}  // namespace

TEST(StackIo, HeaderText) {
    GraspMapStack s(1, 2, 3);
    EXPECT_EQ(stack_header(s),
              R"({"height":2,"width":3,"bins":1,"channels":["q0","cos0","sin0","omega0","o0","gamma"],)"
              R"("dtype":"f32","layout":"row-major","version":1})");
}

TEST(StackIo, PayloadIsLittleEndianRowMajor) {
    GraspMapStack s(1, 2, 3);
    s.plane(0)[4] = 1.5f;  // q0 at row 1, col 1
    const std::string bytes = serialize(s);
    const std::size_t start = bytes.find('\n') + 1;
    ASSERT_EQ(bytes.size() - start, 6u * 6u * 4u);
    const unsigned char expected[4] = {0x00, 0x00, 0xc0, 0x3f};
    EXPECT_EQ(std::memcmp(bytes.data() + start + 16, expected, 4), 0);
}

TEST(StackIo, Roundtrip) {
    const GraspMapStack s = sample_stack();
    std::istringstream in(serialize(s), std::ios::binary);
    EXPECT_TRUE(read_stack(in) == s);
}

TEST(StackIo, FileRoundtrip) {
    const auto path = std::filesystem::temp_directory_path() / "graspmaps_stack_io_test.gmap";
    const GraspMapStack s = sample_stack();
    write_stack(path, s);
    EXPECT_TRUE(read_stack(path) == s);
    std::filesystem::remove(path);
}

TEST(StackIo, CorruptionNamesField) {
    const std::string good = serialize(sample_stack());
    const std::string header = good.substr(0, good.find('\n'));
    auto replace = [&](const std::string& from, const std::string& to) {
        std::string h = header;
        h.replace(h.find(from), from.size(), to);
        return with_header(good, h);
    };
    EXPECT_EQ(field_of(good), "");
    EXPECT_EQ(field_of(replace("\"dtype\":\"f32\"", "\"dtype\":\"f64\"")), "dtype");
    EXPECT_EQ(field_of(replace("\"version\":1", "\"version\":2")), "version");
    EXPECT_EQ(field_of(replace("\"layout\":\"row-major\"", "\"layout\":\"col-major\"")), "layout");
    EXPECT_EQ(field_of(replace("\"height\":5", "\"height\":-5")), "height");
    EXPECT_EQ(field_of(replace("\"width\":7", "\"width\":\"7\"")), "width");
    EXPECT_EQ(field_of(replace("\"bins\":2", "\"bins\":0")), "bins");
    EXPECT_EQ(field_of(replace("\"q0\"", "\"q9\"")), "channels");
    EXPECT_EQ(field_of(replace("\"height\":5", "\"height\":6")), "channels");  // payload too short
    EXPECT_EQ(field_of(good + "x"), "channels");
    EXPECT_EQ(field_of(good.substr(0, good.size() - 1)), "channels");
    EXPECT_EQ(field_of(with_header(good, "{not json")), "header");
    EXPECT_EQ(field_of(with_header(good, "[1,2]")), "header");
    EXPECT_EQ(field_of(""), "header");
    EXPECT_EQ(field_of(header), "header");
}
