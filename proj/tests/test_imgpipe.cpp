#include "gsdie/imgpipe.hpp"

#include "gsdie/errors.hpp"
#include "gsdie/graph.hpp"
#include "gsdie/image.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace gsdie;

namespace {

// The 3x3 std-1 Gaussian patch kernel, normalised to sum 1 (independent
// reconstruction for the tests).
double kernel_at(int dr, int dc) {
  double sum = 0.0;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) sum += std::exp(-(a * a + b * b) / 2.0);
  return std::exp(-(dr * dr + dc * dc) / 2.0) / sum;
}

}  // namespace

TEST_SUITE_BEGIN("imgpipe");

TEST_CASE("constant image features") {
  const double c = 0.4;
  ImageTensor img = ImageTensor::create(4, 5, 1, c);
  const FeatureMatrix fm = extract_features(img, PixelScale::unit);
  CHECK(fm.ell == 9);
  CHECK(fm.z.rows() == 20);
  for (int dr = -1; dr <= 1; ++dr)
    for (int dc = -1; dc <= 1; ++dc) {
      const double expected = 9.0 * kernel_at(dr, dc) * c;
      const Index col = (dr + 1) * 3 + (dc + 1);
      CHECK(fm.z(7, col) == doctest::Approx(expected).epsilon(1e-14));
    }
  // All feature vectors coincide, so every similarity is 1.
  GaussianSimilarity sim{10.0, fm.ell};
  CHECK(gaussian_similarity(fm.z.row(0), fm.z.row(19), sim) == doctest::Approx(1.0));
}

TEST_CASE("replication padding at the corner") {
  ImageTensor img = ImageTensor::create(3, 3, 1);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) img.at(r, c, 0) = (r * 3 + c) / 10.0;
  // Hand-padded 5x5 copy: the (0,0) patch of `img` is the (1,1) patch here.
  ImageTensor padded = ImageTensor::create(5, 5, 1);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c)
      padded.at(r, c, 0) = img.at(std::clamp(r - 1, 0, 2), std::clamp(c - 1, 0, 2), 0);

  const FeatureMatrix fm = extract_features(img, PixelScale::unit);
  for (int dr = -1; dr <= 1; ++dr)
    for (int dc = -1; dc <= 1; ++dc) {
      const double expected =
          9.0 * kernel_at(dr, dc) * padded.at(1 + dr, 1 + dc, 0);
      CHECK(fm.z(0, (dr + 1) * 3 + (dc + 1)) ==
            doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("rgb features have 27 entries") {
  ImageTensor img = ImageTensor::create(2, 2, 3, 0.5);
  img.at(1, 1, 2) = 0.25;
  const FeatureMatrix fm = extract_features(img, PixelScale::byte);
  CHECK(fm.ell == 27);
  // Byte scale multiplies all features by 255.
  const FeatureMatrix unit = extract_features(img, PixelScale::unit);
  CHECK((fm.z - 255.0 * unit.z).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("assemble_problem on the single white pixel pair") {
  ImageTensor white = ImageTensor::create(1, 1, 1, 1.0);
  ImageTensor label = ImageTensor::create(1, 1, 1, 1.0);
  const Problem p = assemble_problem(white, label, white, 30.0, 35.0, PixelScale::byte);
  CHECK(p.n == 2);
  CHECK(p.z_indices == IndexList{0});
  CHECK(p.u0(0) == 1.0);
  CHECK(p.u0(1) == 0.49);
  CHECK(p.weight(0, 1) == doctest::Approx(1.0));
  CHECK(p.weight(0, 0) == 0.0);  // no self-loops even with identical features
  CHECK(p.fid.mu(0) == 30.0);
  CHECK(p.fid.mu(1) == 0.0);
}

TEST_CASE("assemble_problem keeps Z when labels are all zero") {
  ImageTensor img = synthetic_two_tone(8);
  ImageTensor zeros = ImageTensor::create(8, 8, 1, 0.0);
  const Problem p = assemble_problem(img, zeros, img, 5.0, 35.0, PixelScale::byte);
  CHECK(p.z_indices.size() == 64);
  CHECK(p.fid.f_tilde.cwiseAbs().maxCoeff() == 0.0);
  CHECK(p.fid.mu.head(64).minCoeff() == 5.0);
}

TEST_CASE("assemble_problem input validation") {
  ImageTensor img = synthetic_two_tone(8);
  ImageTensor labels = synthetic_disk_labels(8);
  ImageTensor bad_labels = labels;
  bad_labels.at(0, 0, 0) = 0.5;  // not binary
  CHECK_THROWS_AS(assemble_problem(img, bad_labels, img, 30, 35, PixelScale::byte),
                  InputError);
  CHECK_THROWS_AS(assemble_problem(img, labels, img, -1, 35, PixelScale::byte),
                  InputError);
  ImageTensor small = synthetic_two_tone(4);
  CHECK_THROWS_AS(assemble_problem(img, synthetic_disk_labels(4), img, 30, 35,
                                   PixelScale::byte),
                  InputError);
  (void)small;
}

TEST_CASE("weight accessor agrees with direct similarity evaluation") {
  ImageTensor ref = synthetic_two_tone(8);
  ImageTensor target = synthetic_two_tone(8, 0.05, 3);
  const Problem p = assemble_problem(ref, synthetic_disk_labels(8), target, 30.0, 35.0,
                                     PixelScale::byte);
  for (Index i = 0; i < p.n; ++i)
    for (Index j = 0; j < p.n; ++j) {
      const double w = p.weight(i, j);
      CHECK(w == p.weight(j, i));
      if (i == j) {
        CHECK(w == 0.0);
      } else {
        const double expected =
            gaussian_similarity(p.features->z.row(i), p.features->z.row(j), p.sim);
        CHECK(w == doctest::Approx(expected).epsilon(1e-13));
      }
    }
}

TEST_CASE("feature extraction is deterministic") {
  ImageTensor img = synthetic_two_tone(16, 0.1, 7);
  const FeatureMatrix a = extract_features(img, PixelScale::byte);
  const FeatureMatrix b = extract_features(img, PixelScale::byte);
  CHECK((a.z - b.z).cwiseAbs().maxCoeff() == 0.0);

  const ImageTensor again = synthetic_two_tone(16, 0.1, 7);
  CHECK(img.data == again.data);
  const ImageTensor other_noise = synthetic_two_tone(16, 0.1, 8);
  CHECK(img.data != other_noise.data);
}

TEST_CASE("builtin specs") {
  const ImageTensor img = load_image_spec("builtin:16:0.05:4");
  CHECK(img.height == 16);
  const ImageTensor labels = load_labels_spec("builtin:16:0.05:4");
  for (double v : labels.data) CHECK((v == 0.0 || v == 1.0));
  CHECK(is_builtin_spec("builtin:16"));
  CHECK_FALSE(is_builtin_spec("image.png"));
  CHECK_THROWS_AS(load_image_spec("builtin:4"), InputError);
  CHECK_THROWS_AS(load_image_spec("builtin:abc"), InputError);
}

TEST_CASE("pnm round trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "gsdie_imgio";
  fs::create_directories(dir);

  ImageTensor img = ImageTensor::create(5, 7, 3);
  for (std::size_t i = 0; i < img.data.size(); ++i)
    img.data[i] = static_cast<double>((i * 37) % 256) / 255.0;
  const std::string ppm = (dir / "tmp.ppm").string();
  write_pnm(img, ppm);
  const ImageTensor back = read_pnm(ppm);
  CHECK(back.channels == 3);
  CHECK(back.height == 5);
  REQUIRE(back.data.size() == img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i)
    CHECK(back.data[i] == doctest::Approx(img.data[i]).epsilon(1e-12));

  // 16-bit ascii grey.
  const std::string pgm16 = (dir / "tmp16.pgm").string();
  {
    FILE* f = std::fopen(pgm16.c_str(), "wb");
    std::fputs("P2\n# comment\n2 2\n65535\n0 32768 65535 12345\n", f);
    std::fclose(f);
  }
  const ImageTensor deep = read_pnm(pgm16);
  CHECK(deep.data[1] == doctest::Approx(32768.0 / 65535.0).epsilon(1e-12));
  CHECK(deep.data[2] == doctest::Approx(1.0));
}

TEST_CASE("png round trip through the stored-deflate writer") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "gsdie_imgio";
  fs::create_directories(dir);
  for (int channels : {1, 3}) {
    ImageTensor img = ImageTensor::create(9, 4, channels);
    for (std::size_t i = 0; i < img.data.size(); ++i)
      img.data[i] = static_cast<double>((i * 101) % 256) / 255.0;
    const std::string path = (dir / "tmp.png").string();
    write_png(img, path);
    const ImageTensor back = read_png(path);
    CHECK(back.channels == channels);
    REQUIRE(back.data.size() == img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i)
      CHECK(back.data[i] == doctest::Approx(img.data[i]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(read_image("nonexistent.png"), InputError);
  CHECK_THROWS_AS(read_image("noext"), InputError);
}

TEST_SUITE_END();
