#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "shadow/texture_sr.hpp"

using namespace shadow;

namespace {

GreyImage random_grey(std::mt19937& rng, int w, int h, int lo = 0, int hi = 255) {
  std::uniform_int_distribution<int> v(lo, hi);
  GreyImage g(w, h);
  for (auto& p : g.data()) p = static_cast<std::uint8_t>(v(rng));
  return g;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Projection computed directly from the kernel weights on a patch of doubles.
std::vector<double> explicit_projection(const std::vector<double>& patch, const GaborBank& bank) {
  std::vector<double> out;
  for (const GaborKernel& k : bank.kernels) out.push_back(dot(k.weights, patch));
  return out;
}

}  // namespace

TEST(GaborBank, KernelCounts) {
  EXPECT_EQ(build_bank(GaborBankConfig::full()).count(), 48u);
  EXPECT_EQ(build_bank(GaborBankConfig::reduced()).count(), 16u);
  EXPECT_EQ(GaborBankConfig::full().kernel_count(), 48u);
}

TEST(GaborBank, ZeroMeanUnitNorm) {
  for (const GaborKernel& k : build_bank().kernels) {
    ASSERT_EQ(k.weights.size(), 81u);
    double sum = 0.0;
    for (double w : k.weights) sum += w;
    EXPECT_NEAR(sum, 0.0, 1e-9);
    EXPECT_NEAR(dot(k.weights, k.weights), 1.0, 1e-6);
  }
}

TEST(GaborBank, RejectsEvenSize) {
  GaborBankConfig c;
  c.size = 8;
  EXPECT_THROW(build_bank(c), std::invalid_argument);
}

TEST(GaborBank, ReproducibleBitExact) {
  const GaborBank a = build_bank(), b = build_bank();
  for (std::size_t k = 0; k < a.count(); ++k) EXPECT_EQ(a.kernels[k].weights, b.kernels[k].weights);
}

TEST(Projection, MatchesExplicitDotProducts) {
  std::mt19937 rng(1);
  const GreyImage g = random_grey(rng, 15, 15);
  const GaborBank bank = build_bank();
  std::vector<double> patch;
  for (int y = 3; y < 12; ++y) {
    for (int x = 2; x < 11; ++x) patch.push_back(g(x, y));
  }
  const std::vector<double> want = explicit_projection(patch, bank);
  const std::vector<double> got = project_patch(g, 6, 7, bank);
  for (std::size_t k = 0; k < want.size(); ++k) EXPECT_NEAR(got[k], want[k], 1e-9);
}

TEST(Projection, LinearAndOffsetFree) {
  std::mt19937 rng(2);
  const GaborBank bank = build_bank();
  const GreyImage base = random_grey(rng, 9, 9, 0, 100);
  GreyImage doubled(9, 9), shifted(9, 9);
  for (std::size_t i = 0; i < base.size(); ++i) {
    doubled[i] = static_cast<std::uint8_t>(2 * base[i]);
    shifted[i] = static_cast<std::uint8_t>(base[i] + 37);
  }
  const auto a = project_patch(base, 4, 4, bank);
  const auto b = project_patch(doubled, 4, 4, bank);
  const auto c = project_patch(shifted, 4, 4, bank);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_NEAR(b[k], 2.0 * a[k], 1e-6);
    EXPECT_NEAR(c[k], a[k], 1e-6);
  }
}

TEST(GainCandidates, Examples) {
  GreyImage f(3, 1), b(3, 1, 100);
  f[0] = 100;  // equal
  f[1] = 50;   // half
  f[2] = 150;  // brighter
  const BinaryMask fg(3, 1, 1);
  const BinaryMask c = photometric_gain_candidates(f, b, fg, 0.1);
  EXPECT_EQ(c[0], 0);
  EXPECT_EQ(c[1], 1);
  EXPECT_EQ(c[2], 0);
  GreyImage zero(3, 1, 0);
  const BinaryMask none = photometric_gain_candidates(f, zero, fg, 0.1);
  for (auto v : none.data()) EXPECT_EQ(v, 0);
  const BinaryMask outside = photometric_gain_candidates(f, b, BinaryMask(3, 1, 0), 0.1);
  for (auto v : outside.data()) EXPECT_EQ(v, 0);
}

TEST(TextureDistance, HalfScaledPatch) {
  std::mt19937 rng(5);
  const GaborBank bank = build_bank();
  GreyImage b(9, 9), f(9, 9);
  for (std::size_t i = 0; i < b.size(); ++i) {
    b[i] = static_cast<std::uint8_t>(2 * (rng() % 100 + 20));
    f[i] = static_cast<std::uint8_t>(b[i] / 2);
  }
  const auto fb = project_patch(b, 4, 4, bank), ff = project_patch(f, 4, 4, bank);
  EXPECT_NEAR(texture_distance(ff, fb, 0.0), 0.5, 1e-9);
  EXPECT_NEAR(texture_distance(fb, fb, 1e-6), 0.0, 1e-12);

  const BinaryMask fg(9, 9, 1);
  SrTextureParams p;
  p.distance = 0.5 + 1e-6;
  EXPECT_EQ(classify_texture_sr(f, b, fg, bank, p)(4, 4), Label::Shadow);
  p.distance = 0.5 - 1e-6;
  EXPECT_EQ(classify_texture_sr(f, b, fg, bank, p)(4, 4), Label::Object);
}

TEST(TextureDistance, FlatFrameOverCheckerboard) {
  const GaborBank bank = build_bank();
  GreyImage b(9, 9), f(9, 9, 60);
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 9; ++x) b(x, y) = (x / 2 + y / 2) % 2 ? 200 : 100;
  }
  // explicit oracle: the flat patch projects to zero, so the distance is
  // |feat_B| / (|feat_B| + eps)
  std::vector<double> patch_b;
  for (auto v : b.data()) patch_b.push_back(v);
  const auto want_b = explicit_projection(patch_b, bank);
  const double norm_b = std::sqrt(dot(want_b, want_b));
  ASSERT_GT(norm_b, 10.0);
  const double d = texture_distance(project_patch(f, 4, 4, bank), project_patch(b, 4, 4, bank), 1e-6);
  EXPECT_NEAR(d, norm_b / (norm_b + 1e-6), 1e-9);
  EXPECT_EQ(classify_texture_sr(f, b, BinaryMask(9, 9, 1), bank, {})(4, 4), Label::Object);
}

TEST(ClassifySr, IdenticalTextureIsShadowBorderIsObject) {
  std::mt19937 rng(9);
  const GreyImage b = random_grey(rng, 20, 20, 100, 200);
  GreyImage f(20, 20);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<std::uint8_t>(b[i] * 7 / 10);
  const BinaryMask fg(20, 20, 1);
  const TriMask out = classify_texture_sr(f, b, fg, build_bank(), {});
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) {
      const bool inside = x >= 4 && y >= 4 && x < 16 && y < 16;
      EXPECT_EQ(out(x, y), inside ? Label::Shadow : Label::Object) << x << "," << y;
    }
  }
}

TEST(ClassifySr, TooSmallFrameThrows) {
  EXPECT_THROW(classify_texture_sr(GreyImage(8, 20), GreyImage(8, 20), BinaryMask(8, 20, 1), build_bank(), {}),
               std::invalid_argument);
}

TEST(ClassifySr, OutputPartitionsForeground) {
  std::mt19937 rng(10);
  const GreyImage f = random_grey(rng, 24, 24), b = random_grey(rng, 24, 24);
  const BinaryMask fg = testing_support::random_mask(rng, 24, 24, 0.5);
  EXPECT_EQ(foreground_of(classify_texture_sr(f, b, fg, build_bank(GaborBankConfig::reduced()), {})), fg);
}

TEST(SelectKernels, KeepsHighestEnergyInBankOrder) {
  // Vertical stripes of period 4 excite the wavelength-4, orientation-0 pair.
  GreyImage g(30, 30);
  for (int y = 0; y < 30; ++y) {
    for (int x = 0; x < 30; ++x) g(x, y) = static_cast<std::uint8_t>(128 + 100 * std::cos(2 * std::numbers::pi * x / 4.0));
  }
  const GaborBank bank = build_bank();
  const GaborBank picked = select_kernels(bank, g, BinaryMask(30, 30, 1), 16);
  ASSERT_EQ(picked.count(), 16u);
  bool has_match = false;
  for (const GaborKernel& k : picked.kernels) {
    if (k.wavelength == 4.0 && k.orientation == 0.0) has_match = true;
  }
  EXPECT_TRUE(has_match);
  for (std::size_t k = 1; k < picked.count(); ++k) {
    const auto& a = picked.kernels[k - 1];
    const auto& b = picked.kernels[k];
    EXPECT_TRUE(a.wavelength < b.wavelength || (a.wavelength == b.wavelength && a.orientation <= b.orientation));
  }
}
