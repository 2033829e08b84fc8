#include "properties.hpp"

#include <gtest/gtest.h>

#include <ostream>

namespace properties {

void PrintTo(const Named& n, std::ostream* os) { *os << n.name; }

}  // namespace properties

namespace {

class PropertyTest : public ::testing::TestWithParam<properties::Named> {};

TEST_P(PropertyTest, Holds) {
  const properties::Result r = GetParam().run();
  EXPECT_TRUE(r.passed) << r.name << ": residual " << r.residual << " > tolerance " << r.tolerance << " " << r.detail;
}

INSTANTIATE_TEST_SUITE_P(Suite, PropertyTest, ::testing::ValuesIn(properties::all()),
                         [](const auto& info) { return info.param.name; });

}  // namespace
