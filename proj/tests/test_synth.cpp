#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/SVD>
#include <gtest/gtest.h>

#include "skintone/error.hpp"
#include "skintone/random.hpp"
#include "skintone/synth.hpp"

using namespace skintone;

TEST(Synth, DiffuseOnlyPatch) {
  DichromaticScene s;
  s.body_color = skin_body_color(0.2);
  s.diffuse_level = 0.5;
  s.highlight.peak = 0;
  const SyntheticPatch p = generate_patch(s, 100);
  for (Eigen::Index i = 0; i < p.pixels.rows(); ++i) {
    EXPECT_EQ(p.pixels.row(i), (0.5 * s.body_color).transpose());
  }
  EXPECT_EQ(p.specular_magnitude.maxCoeff(), 0.0);
}

TEST(Synth, CollinearBasesRankOne) {
  DichromaticScene s;
  s.body_color = s.interface_color = Eigen::Vector3d(0.6, 0.5, 0.4).normalized();
  s.highlight.peak = 0.6;
  const SyntheticPatch p = generate_patch(s, 400);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(p.pixels);
  EXPECT_LE(svd.singularValues()(1), 1e-12 * svd.singularValues()(0));
}

TEST(Synth, NoiselessRankAtMostTwo) {
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const SyntheticPatch p = generate_patch(random_scene(rng), 256);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(p.pixels);
    EXPECT_LE(svd.singularValues()(2), 1e-9 * svd.singularValues()(0));
    EXPECT_GE(p.diffuse_magnitude.minCoeff(), 0.0);
    EXPECT_GE(p.specular_magnitude.minCoeff(), 0.0);
    EXPECT_EQ(p.clipped_fraction, 0.0);
  }
}

TEST(Synth, Reproducible) {
  DichromaticScene s;
  s.noise_sigma = 0.01;
  s.highlight.peak = 0.5;
  s.seed = 77;
  EXPECT_EQ(generate_patch(s, 300).pixels, generate_patch(s, 300).pixels);
  DichromaticScene t = s;
  t.seed = 78;
  EXPECT_NE(generate_patch(s, 300).pixels, generate_patch(t, 300).pixels);
}

TEST(Synth, ClippingGuard) {
  DichromaticScene s;
  s.diffuse_level = 2.0;  // 2/sqrt(3) > 1 in every channel
  try {
    generate_patch(s, 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kClipping);
  }
  EXPECT_THROW(generate_patch(DichromaticScene{}, 63), Error);
}

TEST(Synth, SweepEnergyPeaksAtZero) {
  DichromaticScene s;
  s.body_color = skin_body_color(0.5);
  s.highlight.peak = 0.6;
  const std::vector<double> angles = {-45, -30, -15, 0, 15, 30, 45};
  const auto sweep = generate_illumination_sweep(s, angles, 400);
  ASSERT_EQ(sweep.size(), 7u);
  std::vector<double> energy;
  for (const auto& p : sweep) energy.push_back(p.specular_magnitude.sum());
  for (std::size_t i = 0; i < energy.size(); ++i) {
    if (i != 3) EXPECT_LT(energy[i], energy[3]);
    EXPECT_EQ(sweep[i].diffuse_magnitude, sweep[3].diffuse_magnitude);
  }
  EXPECT_NEAR(energy[2] / energy[3], std::pow(std::cos(15 * std::numbers::pi / 180), 4), 1e-12);
}

TEST(Synth, SingleAngleSweep) {
  DichromaticScene s;
  s.highlight.peak = 0.4;
  s.incidence_angle = 30;
  s.seed = 3;
  const std::vector<double> one = {30};
  const auto sweep = generate_illumination_sweep(s, one, 200);
  ASSERT_EQ(sweep.size(), 1u);
  EXPECT_EQ(sweep[0].pixels, generate_patch(s, 200).pixels);
  EXPECT_THROW(generate_illumination_sweep(s, std::span<const double>{}, 200), Error);
}

TEST(Synth, RandomSceneStaysInRegime) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const DichromaticScene s = random_scene(rng);
    EXPECT_NEAR(s.body_color.norm(), 1.0, 1e-12);
    EXPECT_GT(s.interface_color.sum(), s.body_color.sum());
    const double top = (s.diffuse_level * s.body_color + s.highlight.peak * s.interface_color).maxCoeff();
    EXPECT_LE(top, 1.0);
  }
}

TEST(Synth, RenderedFaceIsDeterministic) {
  const FaceScene scene{0.7, Eigen::Vector3d::Ones().normalized(), 15, 42};
  const RenderedFace a = render_face(scene), b = render_face(scene);
  ASSERT_EQ(a.image.width(), 256);
  for (int y = 0; y < 256; y += 7) {
    for (int x = 0; x < 256; x += 7) EXPECT_EQ(a.image.at(x, y).vec(), b.image.at(x, y).vec());
  }
  EXPECT_NEAR(a.highlight_peak, render_face({0.7, scene.interface_color, 0, 42}).highlight_peak *
                                    std::pow(std::cos(15 * std::numbers::pi / 180), 4),
              1e-12);
}
