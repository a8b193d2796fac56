#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "lcstf/errors.hpp"
#include "lcstf/nn.hpp"

using namespace lcstf;
namespace fs = std::filesystem;

namespace {

class CheckpointTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("lcstf_ckpt_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        Rng rng(31);
        net_ = DenseNet::init(kDefaultLayerSizes, rng);
        for (auto& layer : net_.mlp().layers())
            for (float& b : layer.biases) b = static_cast<float>(rng.uniform(-1, 1));
        net_.set_step_count(1234567890123ull);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::vector<char> bytes(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), {}};
    }
    void write(const fs::path& p, const std::vector<char>& b) {
        std::ofstream out(p, std::ios::binary);
        out.write(b.data(), static_cast<std::streamsize>(b.size()));
    }
    CheckpointError::Kind load_error(const fs::path& p) {
        try {
            load_checkpoint(p);
        } catch (const CheckpointError& e) {
            return e.kind();
        }
        ADD_FAILURE() << "load succeeded";
        return CheckpointError::Kind::io;
    }

    fs::path dir_;
    DenseNet net_;
};

std::uint32_t u32_at(const std::vector<char>& b, std::size_t off) {
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + k])) << (8 * k);
    return v;
}

}  // namespace

TEST_F(CheckpointTest, RoundTripIsBitwise) {
    const fs::path p = dir_ / "a.lcsq";
    save_checkpoint(net_, p);
    const DenseNet back = load_checkpoint(p);
    EXPECT_TRUE(back.same_parameters(net_));
    EXPECT_EQ(back.step_count(), net_.step_count());
    Rng rng(32);
    for (int i = 0; i < 100; ++i) {
        std::vector<float> x(40);
        for (float& v : x) v = static_cast<float>(rng.uniform(-1, 1));
        const auto a = net_.forward(x), b = back.forward(x);
        ASSERT_EQ(std::memcmp(a.data(), b.data(), a.size() * sizeof(float)), 0);
    }
}

TEST_F(CheckpointTest, FileLayout) {
    const fs::path p = dir_ / "a.lcsq";
    save_checkpoint(net_, p);
    const auto b = bytes(p);
    ASSERT_EQ(std::string(b.data(), 4), "LCSQ");
    EXPECT_EQ(u32_at(b, 4), 1u);
    EXPECT_EQ(u32_at(b, 8), 5u);
    // rows, cols of the first and last layer
    EXPECT_EQ(u32_at(b, 12), 32u);
    EXPECT_EQ(u32_at(b, 16), 40u);
    EXPECT_EQ(u32_at(b, 12 + 8 * 4), 5u);
    EXPECT_EQ(u32_at(b, 16 + 8 * 4), 512u);
    const std::size_t header = 12 + 8 * 5;
    EXPECT_EQ(b.size(), header + 4 * net_.parameter_count() + 8);
    float first;
    std::memcpy(&first, b.data() + header, 4);
    EXPECT_EQ(first, net_.mlp().layers()[0].weights[0]);
    // Biases follow all weight matrices.
    std::size_t weights = 0;
    for (const auto& l : net_.mlp().layers()) weights += l.weights.size();
    float bias0;
    std::memcpy(&bias0, b.data() + header + 4 * weights, 4);
    EXPECT_EQ(bias0, net_.mlp().layers()[0].biases[0]);
    std::uint64_t steps = 0;
    std::memcpy(&steps, b.data() + b.size() - 8, 8);
    EXPECT_EQ(steps, net_.step_count());
}

TEST_F(CheckpointTest, TruncatedFile) {
    const fs::path p = dir_ / "a.lcsq";
    save_checkpoint(net_, p);
    auto b = bytes(p);
    for (std::size_t keep : {b.size() - 1, b.size() / 2, std::size_t{10}}) {
        write(p, std::vector<char>(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(keep)));
        EXPECT_EQ(load_error(p), CheckpointError::Kind::truncated) << keep;
    }
}

TEST_F(CheckpointTest, WrongMagic) {
    const fs::path p = dir_ / "a.lcsq";
    save_checkpoint(net_, p);
    auto b = bytes(p);
    b[0] = 'X';
    write(p, b);
    EXPECT_EQ(load_error(p), CheckpointError::Kind::format);
}

TEST_F(CheckpointTest, WrongVersion) {
    const fs::path p = dir_ / "a.lcsq";
    save_checkpoint(net_, p);
    auto b = bytes(p);
    b[4] = 2;
    write(p, b);
    EXPECT_EQ(load_error(p), CheckpointError::Kind::version);
}

TEST_F(CheckpointTest, InconsistentShapes) {
    const fs::path p = dir_ / "a.lcsq";
    save_checkpoint(net_, p);
    auto b = bytes(p);
    b[16 + 8] = 33;  // second layer cols no longer equal first layer rows
    write(p, b);
    EXPECT_EQ(load_error(p), CheckpointError::Kind::dimension);
}

TEST_F(CheckpointTest, TrailingBytes) {
    const fs::path p = dir_ / "a.lcsq";
    save_checkpoint(net_, p);
    auto b = bytes(p);
    b.push_back(0);
    write(p, b);
    EXPECT_EQ(load_error(p), CheckpointError::Kind::format);
}

TEST_F(CheckpointTest, ArchitectureMismatchAgainstExpected) {
    const fs::path p = dir_ / "a.lcsq";
    save_checkpoint(net_, p);
    EXPECT_NO_THROW(load_checkpoint(p, kDefaultLayerSizes));
    try {
        load_checkpoint(p, {36, 32, 64, 64, 512, 5});
        FAIL();
    } catch (const CheckpointError& e) {
        EXPECT_EQ(e.kind(), CheckpointError::Kind::dimension);
    }
}

TEST_F(CheckpointTest, MissingFileIsCheckpointError) {
    EXPECT_EQ(load_error(dir_ / "none.lcsq"), CheckpointError::Kind::io);
}

TEST_F(CheckpointTest, UnwritablePathIsIoError) {
    EXPECT_THROW(save_checkpoint(net_, dir_ / "no_such_dir" / "a.lcsq"), IoError);
}
