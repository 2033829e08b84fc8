#include "oracles.hpp"

#include "sadapt/config.hpp"
#include "sadapt/error.hpp"
#include "sadapt/rng.hpp"
#include "sadapt/simulator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace {

using namespace sadapt;

// Tip compliance ∫₀ˡ s² / (E I(s)) ds by the midpoint rule on each constant
// section, s from the tip.
double compliance_oracle(double e, double l, double w, double t, double depth, double loc) {
  const double edges[] = {0.0, std::max(0.0, loc - t), std::min(l, loc + t), l};
  double sum = 0.0;
  for (int seg = 0; seg < 3; ++seg) {
    const double a = edges[seg];
    const double b = edges[seg + 1];
    const double width = seg == 1 ? w - depth : w;
    const int steps = 20000;
    const double h = (b - a) / steps;
    double part = 0.0;
    for (int i = 0; i < steps; ++i) {
      const double s = a + (i + 0.5) * h;
      part += s * s;
    }
    sum += part * h / (e * width * t * t * t / 12.0);
  }
  return sum;
}

TEST(Beam, TipStiffnessFormula) {
  EXPECT_NEAR(beam_tip_stiffness(210e9, 0.3, 0.04, 0.008), 3.0 * 210e9 * (0.04 * 0.008 * 0.008 * 0.008 / 12.0) / 0.027,
              1e-6);
}

TEST(Beam, DamagedStiffnessMatchesQuadrature) {
  for (const StructureSpec& s : {StructureSpec::three_storey_source(), StructureSpec::three_storey_target()}) {
    const double e = s.elastic_modulus.mean;
    const double got = damaged_beam_stiffness(e, s.beam_length, s.beam_width, s.beam_thickness, s.crack_depth,
                                              s.crack_location);
    const double want =
        1.0 / compliance_oracle(e, s.beam_length, s.beam_width, s.beam_thickness, s.crack_depth, s.crack_location);
    EXPECT_NEAR(got / want, 1.0, 1e-8) << s.name;
    EXPECT_LT(got, beam_tip_stiffness(e, s.beam_length, s.beam_width, s.beam_thickness));
  }
  EXPECT_EQ(damaged_beam_stiffness(1e9, 0.3, 0.04, 0.008, 0.0, 0.15), beam_tip_stiffness(1e9, 0.3, 0.04, 0.008));
  EXPECT_THROW((void)damaged_beam_stiffness(1e9, 0.3, 0.04, 0.008, 0.05, 0.15), Error);
  EXPECT_THROW((void)damaged_beam_stiffness(1e9, 0.3, 0.04, 0.008, 0.01, 0.4), Error);
}

TEST(System, ShearBuildingAssembly) {
  const StructureSpec spec = StructureSpec::three_storey_source();
  const SampleDraw draw{2e11, 7800.0, 5.0, 2};
  const StructuralSystem sys = build_system(spec, draw);
  const double kb = beam_tip_stiffness(2e11, spec.beam_length, spec.beam_width, spec.beam_thickness);
  const double kd = damaged_beam_stiffness(2e11, spec.beam_length, spec.beam_width, spec.beam_thickness,
                                           spec.crack_depth, spec.crack_location);
  const double k1 = 4 * kb;
  const double k2 = kd + 3 * kb;
  const double k3 = 4 * kb;
  EXPECT_NEAR(sys.stiffness(0, 0), k1 + k2, 1e-6);
  EXPECT_NEAR(sys.stiffness(0, 1), -k2, 1e-6);
  EXPECT_NEAR(sys.stiffness(1, 1), k2 + k3, 1e-6);
  EXPECT_NEAR(sys.stiffness(2, 2), k3, 1e-6);
  EXPECT_EQ(sys.stiffness(0, 2), 0.0);
  EXPECT_DOUBLE_EQ(sys.mass(1, 1), 7800.0 * spec.mass_length * spec.mass_width * spec.mass_thickness);
  EXPECT_DOUBLE_EQ(sys.damping(2, 2), 5.0);
  EXPECT_THROW((void)build_system(spec, SampleDraw{2e11, 7800.0, 5.0, 4}), Error);
}

TEST(DampedFrequencies, OverdampedModeIsReported) {
  const Matrix m = Matrix::Constant(1, 1, 1.0);
  const Matrix k = Matrix::Constant(1, 1, 1.0);
  try {
    (void)damped_frequencies(m, Matrix::Constant(1, 1, 3.0), k, 1);
    FAIL() << "expected an overdamped error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kOverdamped);
  }
}

TEST(DampedFrequencies, AscendingAndConsistentUnits) {
  const StructureSpec spec = StructureSpec::heterogeneous_target();
  const SampleDraw draw{spec.elastic_modulus.mean, spec.density.mean, 6.0, std::nullopt};
  const StructuralSystem sys = build_system(spec, draw);
  const ModalFeatures f = damped_frequencies(sys.mass, sys.damping, sys.stiffness, 3);
  ASSERT_EQ(f.f_d.size(), 3);
  EXPECT_LT(f.f_d(0), f.f_d(1));
  EXPECT_LT(f.f_d(1), f.f_d(2));
  EXPECT_LT((f.omega_d / (2.0 * std::numbers::pi) - f.f_d).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Sampling, DrawOrderIsModulusDensityDamping) {
  const StructureSpec spec = StructureSpec::three_storey_target();
  Engine a(77);
  const SampleDraw d = draw_sample(spec, a, 3);
  Engine b(77);
  std::normal_distribution<double> e(spec.elastic_modulus.mean, std::sqrt(spec.elastic_modulus.variance));
  std::normal_distribution<double> rho(spec.density.mean, std::sqrt(spec.density.variance));
  std::gamma_distribution<double> c(spec.damping.shape, spec.damping.scale);
  EXPECT_EQ(d.elastic_modulus, e(b));
  EXPECT_EQ(d.density, rho(b));
  EXPECT_EQ(d.damping, c(b));
  EXPECT_EQ(d.damage_storey, 3);
}

TEST(Sampling, GenerateDomainLayoutAndStreams) {
  const StructureSpec spec = StructureSpec::three_storey_source();
  const LabeledDataset ds = generate_domain(spec, {{3, 2}, {0, 3}}, 5);
  EXPECT_EQ(*ds.labels(), (std::vector<ClassId>{0, 0, 0, 3, 3}));
  EXPECT_EQ(ds.domain_tag(), spec.name);
  EXPECT_EQ(ds.d(), 3u);
  // Row 4 is the second class-3 sample and uses stream derive_seed(5, 4).
  Engine engine(derive_seed(5, 4));
  const SampleDraw draw = draw_sample(spec, engine, 3);
  const StructuralSystem sys = build_system(spec, draw);
  const Vector f = damped_frequencies(sys.mass, sys.damping, sys.stiffness, 3).f_d;
  EXPECT_EQ(ds.features().row(4), f.transpose());
  EXPECT_THROW((void)generate_domain(spec, {{4, 1}}, 1), Error);
  EXPECT_THROW((void)generate_domain(spec, {{0, 0}}, 1), Error);
}

TEST(Sampling, TargetFrequenciesAboutTwiceTheSource) {
  const LabeledDataset s = generate_domain(StructureSpec::three_storey_source(), {{0, 400}}, 1);
  const LabeledDataset t = generate_domain(StructureSpec::three_storey_target(), {{0, 400}}, 2);
  const double ratio = t.features().col(0).mean() / s.features().col(0).mean();
  EXPECT_GE(ratio, 1.5);
  EXPECT_LE(ratio, 2.5);
}

TEST(Spec, ConfigRoundTripAndValidation) {
  for (const StructureSpec& spec : {StructureSpec::three_storey_target(), StructureSpec::heterogeneous_target()}) {
    const StructureSpec back = StructureSpec::from_config(KeyValueConfig::parse(spec.to_config()));
    EXPECT_EQ(back.storeys, spec.storeys);
    EXPECT_NEAR(back.beam_length, spec.beam_length, 1e-15);
    EXPECT_NEAR(back.crack_location, spec.crack_location, 1e-15);
    EXPECT_NEAR(back.elastic_modulus.variance / spec.elastic_modulus.variance, 1.0, 1e-12);
    EXPECT_EQ(back.damping.shape, spec.damping.shape);
  }
  StructureSpec bad = StructureSpec::three_storey_source();
  bad.crack_depth = bad.beam_width;
  EXPECT_THROW(bad.validate(), Error);
  bad = StructureSpec::three_storey_source();
  bad.n_features = 4;
  EXPECT_THROW(bad.validate(), Error);
  EXPECT_THROW((void)StructureSpec::from_config(KeyValueConfig::parse("storeys = 3\n")), Error);
}

TEST(Spec, ClassCounts) {
  EXPECT_EQ(parse_class_counts("0:200, 3:150"), (std::map<ClassId, std::size_t>{{0, 200}, {3, 150}}));
  EXPECT_THROW((void)parse_class_counts("0-200"), Error);
  EXPECT_THROW((void)parse_class_counts("0:1,0:2"), Error);
  EXPECT_THROW((void)parse_class_counts("-1:5"), Error);
}

}  // namespace
