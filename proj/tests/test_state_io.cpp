#include <filesystem>

#include <gtest/gtest.h>

#include "totcorr/errors.hpp"
#include "totcorr/measures.hpp"
#include "totcorr/state_io.hpp"

using namespace totcorr;

TEST(StateIo, PureRoundTripIsExact) {
    const auto psi = random_pure(RegisterShape({2, 3}), 4);
    const auto back = std::get<PureState>(parse_state(serialize_state(psi)));
    EXPECT_EQ(back.shape(), psi.shape());
    EXPECT_EQ((back.amplitudes() - psi.amplitudes()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(StateIo, MatrixRoundTripIsExact) {
    const auto rho = random_density(RegisterShape::qubits(2), 3, 8);
    const auto back = std::get<DensityMatrix>(parse_state(serialize_state(rho)));
    EXPECT_EQ((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(StateIo, ParsesHandWrittenDocument) {
    const auto s = parse_state(R"({"dims": [2, 2], "amplitudes": [[0.7071067811865476, 0], [0, 0], [0, 0],
                                   [0.7071067811865476, 0]]})");
    EXPECT_NEAR(measure_M(s), 1.0, 1e-12);
}

TEST(StateIo, RejectsMalformed) {
    EXPECT_THROW(parse_state("not json"), ArgumentError);
    EXPECT_THROW(parse_state(R"({"amplitudes": [[1, 0]]})"), ArgumentError);
    EXPECT_THROW(parse_state(R"({"dims": [2], "amplitudes": [[1, 0]]})"), ArgumentError);
    EXPECT_THROW(parse_state(R"({"dims": [2], "amplitudes": [[1, 0], [0]]})"), ArgumentError);
    EXPECT_THROW(parse_state(R"({"dims": [2], "amplitudes": [[1, 0], [1, 0]]})"), ArgumentError);
    EXPECT_THROW(parse_state(R"({"dims": [2], "amplitudes": [[1, 0], [0, 0]],
                                 "matrix": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]})"),
                 ArgumentError);
    EXPECT_THROW(parse_state(R"({"dims": [2], "matrix": [[[1, 0], [0, 0]]]})"), ArgumentError);
}

TEST(StateIo, Files) {
    const auto path = std::filesystem::temp_directory_path() / "totcorr_state_io_test.json";
    write_state_file(path, ghz(3));
    EXPECT_NEAR(measure_M(read_state_file(path)), 1.5, 1e-12);
    std::filesystem::remove(path);
    EXPECT_THROW(read_state_file(path), ArgumentError);
    EXPECT_THROW(write_state_file("/nonexistent-dir/x.json", ghz(2)), ArgumentError);
}
